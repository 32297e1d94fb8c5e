//! Complex-coordinate stretching profiles and the point-wise PML
//! coefficients derived from them.
//!
//! Each axis carries a scaling profile `α_r ≥ 1` and an attenuation
//! profile `β_r ≥ 0`, both polynomial of order `m` in the normalized depth
//! into the layer. From them:
//!
//! * `a = α_x α_y`, `b = α_x β_y + α_y β_x`, `c = β_x β_y`;
//! * `Λ_e = diag(α_y, α_x)`, `Λ_p = diag(β_y, β_x)` scale stress columns;
//! * the reversed tensors `diag(α_x, α_y)`, `diag(β_x, β_y)` scale the
//!   Darcy terms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StretchingMode {
    /// Uniaxial stretching.
    #[default]
    Pml,
    /// Multiaxial variant: no scaling, attenuation leaks across axes.
    Mpml,
}

/// One planar face of the absorbing layer, e.g. the right side
/// (`axis = x`, `start = x_RD_max`, `normal = +1`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PmlFace {
    pub axis: Axis,
    /// Coordinate of the interface with the regular domain.
    pub start: f64,
    /// Sign of the outward normal component along `axis` (±1).
    pub normal: f64,
    /// Attenuation amplitude of this face, s⁻¹.
    pub beta0: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StretchingConfig {
    /// Profile order `m`.
    pub order: i32,
    /// Layer width, m.
    pub width: f64,
    /// Scaling amplitude.
    pub alpha0: f64,
    pub mode: StretchingMode,
    /// Multiaxial ratio applied to `β_y` inside `β*_x`.
    pub p_yx: f64,
    /// Multiaxial ratio applied to `β_x` inside `β*_y`.
    pub p_xy: f64,
    pub faces: Vec<PmlFace>,
    /// Domain bounding box `[[xmin, xmax], [ymin, ymax]]`.
    pub bounds: [[f64; 2]; 2],
}

/// Point-wise PML coefficients. Tensors are diagonal and stored as their
/// diagonals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PmlCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub lambda_e: [f64; 2],
    pub lambda_p: [f64; 2],
    pub lambda_e_rev: [f64; 2],
    pub lambda_p_rev: [f64; 2],
}

impl PmlCoefficients {
    /// Coefficients of the regular domain.
    pub const IDENTITY: PmlCoefficients = PmlCoefficients {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        lambda_e: [1.0, 1.0],
        lambda_p: [0.0, 0.0],
        lambda_e_rev: [1.0, 1.0],
        lambda_p_rev: [0.0, 0.0],
    };

    pub fn from_profiles(p: Profiles) -> Self {
        PmlCoefficients {
            a: p.alpha[0] * p.alpha[1],
            b: p.alpha[0] * p.beta[1] + p.alpha[1] * p.beta[0],
            c: p.beta[0] * p.beta[1],
            lambda_e: [p.alpha[1], p.alpha[0]],
            lambda_p: [p.beta[1], p.beta[0]],
            lambda_e_rev: [p.alpha[0], p.alpha[1]],
            lambda_p_rev: [p.beta[0], p.beta[1]],
        }
    }
}

/// Profile values `(α_x, α_y)` and `(β_x, β_y)` at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Profiles {
    pub alpha: [f64; 2],
    pub beta: [f64; 2],
}

fn check_reflection(r: f64) -> Result<f64> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::Stretching(format!("reflection coefficient must lie in (0, 1], got {r}")));
    }
    Ok((1.0 / r).ln())
}

/// `β₀ = (m+1) c_p / (2 L) · ln(1/R)`.
pub fn beta0_from_reflection(order: i32, c_p: f64, width: f64, reflection: f64) -> Result<f64> {
    Ok((order + 1) as f64 * c_p / (2.0 * width) * check_reflection(reflection)?)
}

/// Analogue of [`beta0_from_reflection`] with a characteristic length.
pub fn alpha0_from_reflection(order: i32, b_char: f64, width: f64, reflection: f64) -> Result<f64> {
    Ok((order + 1) as f64 * b_char / (2.0 * width) * check_reflection(reflection)?)
}

impl StretchingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.order < 1 {
            return Err(Error::Stretching("profile order must be at least 1".into()));
        }
        if !(self.width > 0.0) {
            return Err(Error::Stretching("layer width must be positive".into()));
        }
        for f in &self.faces {
            if f.normal.abs() != 1.0 {
                return Err(Error::Stretching("face normal must be +1 or -1".into()));
            }
            if !(f.beta0 >= 0.0) {
                return Err(Error::Stretching("beta0 must be non-negative".into()));
            }
        }
        Ok(())
    }

    /// Profiles at `(x, y)`. In multiaxial mode the scaling is disabled and
    /// each attenuation picks up a fraction of the other.
    pub fn profiles(&self, x: f64, y: f64) -> Result<Profiles> {
        let tol = 1e-9 * (1.0 + self.width);
        let p = [x, y];
        for d in 0..2 {
            if p[d] < self.bounds[d][0] - tol || p[d] > self.bounds[d][1] + tol {
                return Err(Error::Stretching(format!("point ({x}, {y}) lies outside the domain")));
            }
        }
        let mut alpha = [1.0; 2];
        let mut beta = [0.0; 2];
        let mut best = [0.0f64; 2];
        for f in &self.faces {
            let d = f.axis.index();
            let depth = ((p[d] - f.start) * f.normal / self.width).max(0.0);
            if depth > 1.0 + 1e-9 {
                return Err(Error::Stretching(format!("point ({x}, {y}) lies beyond a layer face")));
            }
            if depth > best[d] {
                best[d] = depth;
                let shape = depth.powi(self.order);
                alpha[d] = 1.0 + self.alpha0 * shape;
                beta[d] = f.beta0 * shape;
            }
        }
        if self.mode == StretchingMode::Mpml {
            alpha = [1.0, 1.0];
            beta = [beta[0] + self.p_yx * beta[1], beta[1] + self.p_xy * beta[0]];
        }
        Ok(Profiles { alpha, beta })
    }

    pub fn coefficients(&self, x: f64, y: f64) -> Result<PmlCoefficients> {
        Ok(PmlCoefficients::from_profiles(self.profiles(x, y)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn collar(mode: StretchingMode) -> StretchingConfig {
        StretchingConfig {
            order: 3,
            width: 10.0,
            alpha0: 5.0,
            mode,
            p_yx: 0.01,
            p_xy: 0.01,
            faces: vec![
                PmlFace { axis: Axis::X, start: 20.0, normal: 1.0, beta0: 300.0 },
                PmlFace { axis: Axis::X, start: -20.0, normal: -1.0, beta0: 300.0 },
                PmlFace { axis: Axis::Y, start: -15.0, normal: -1.0, beta0: 300.0 },
            ],
            bounds: [[-30.0, 30.0], [-25.0, 0.0]],
        }
    }

    #[test]
    fn beta0_examples() {
        let b = beta0_from_reflection(3, 2366.0, 78.0, 1e-4).unwrap();
        assert!((b - 558.76).abs() < 0.01, "{b}");
        assert_eq!(beta0_from_reflection(3, 2366.0, 78.0, 1.0).unwrap(), 0.0);
        let half = beta0_from_reflection(3, 2366.0, 156.0, 1e-4).unwrap();
        assert!((2.0 * half - b).abs() < 1e-12);
        assert!(beta0_from_reflection(3, 2366.0, 78.0, 0.0).is_err());
        assert!(beta0_from_reflection(3, 2366.0, 78.0, 1.5).is_err());
        let a = alpha0_from_reflection(3, 0.3, 78.0, 1e-4).unwrap();
        assert!((a - 4.0 * 0.3 / 156.0 * 1e4f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn profile_endpoints() {
        let cfg = collar(StretchingMode::Pml);
        let at_interface = cfg.profiles(20.0, -5.0).unwrap();
        assert_eq!(at_interface.alpha, [1.0, 1.0]);
        assert_eq!(at_interface.beta, [0.0, 0.0]);
        let outer = cfg.profiles(30.0, -5.0).unwrap();
        assert_eq!(outer.beta[0], 300.0);
        assert_eq!(outer.alpha[0], 6.0);
        assert!(cfg.profiles(31.0, -5.0).is_err());
    }

    #[test]
    fn mpml_corner() {
        let pml = collar(StretchingMode::Pml).profiles(-30.0, -25.0).unwrap();
        assert_eq!(pml.beta, [300.0, 300.0]);
        let mpml = collar(StretchingMode::Mpml).profiles(-30.0, -25.0).unwrap();
        assert!((mpml.beta[0] - 1.01 * 300.0).abs() < 1e-12);
        assert!((mpml.beta[1] - 1.01 * 300.0).abs() < 1e-12);
        assert_eq!(mpml.alpha, [1.0, 1.0]);
    }

    #[test]
    fn coefficient_arithmetic() {
        let c = PmlCoefficients::from_profiles(Profiles { alpha: [2.0, 2.0], beta: [3.0, 3.0] });
        assert_eq!((c.a, c.b, c.c), (4.0, 12.0, 9.0));
        let c = PmlCoefficients::from_profiles(Profiles { alpha: [2.0, 1.0], beta: [5.0, 0.0] });
        assert_eq!(c.lambda_e, [1.0, 2.0]);
        assert_eq!(c.lambda_p, [0.0, 5.0]);
        assert_eq!(c.lambda_e_rev, [2.0, 1.0]);
        assert_eq!(c.lambda_p_rev, [5.0, 0.0]);
        assert_eq!(c.c, 0.0);
        assert_eq!(c.b, 5.0);
        let rd = collar(StretchingMode::Pml).coefficients(0.0, -1.0).unwrap();
        assert_eq!(rd, PmlCoefficients::IDENTITY);
    }

    #[test]
    fn flat_derivative_at_interface() {
        let cfg = collar(StretchingMode::Pml);
        let h = 1e-4;
        let f = |x: f64| cfg.profiles(x, -5.0).unwrap().beta[0];
        let slope = (f(20.0 + h) - f(20.0 - h)) / (2.0 * h);
        assert!(slope.abs() < 1e-4, "{slope}");
    }

    #[test]
    fn mpml_without_coupling_equals_unscaled_pml() {
        let mut a = collar(StretchingMode::Mpml);
        a.p_yx = 0.0;
        a.p_xy = 0.0;
        let mut b = collar(StretchingMode::Pml);
        b.alpha0 = 0.0;
        for i in 0..=60 {
            for j in 0..=25 {
                let (x, y) = (-30.0 + i as f64, -(j as f64));
                assert_eq!(a.coefficients(x, y).unwrap(), b.coefficients(x, y).unwrap());
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn attenuation_monotone_and_nonnegative(d0 in 0.0f64..10.0, d1 in 0.0f64..10.0, y in -25.0f64..0.0) {
            let cfg = collar(StretchingMode::Pml);
            let (lo, hi) = (d0.min(d1), d0.max(d1));
            let p0 = cfg.profiles(20.0 + lo, y).unwrap();
            let p1 = cfg.profiles(20.0 + hi, y).unwrap();
            proptest::prop_assert!(p1.beta[0] >= p0.beta[0]);
            let c = cfg.coefficients(20.0 + hi, y).unwrap();
            proptest::prop_assert!(c.a >= 1.0 && c.b >= 0.0 && c.c >= 0.0);
        }
    }
}
