//! Poroelastic material parameters and derived quantities.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The ten physical parameters of a saturated porous medium.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaterialSet {
    /// Solid density, kg/m³.
    pub rho_s: f64,
    /// Fluid density, kg/m³.
    pub rho_f: f64,
    /// Solid grain bulk modulus, N/m².
    pub k_s: f64,
    /// Fluid bulk modulus, N/m².
    pub k_f: f64,
    /// Drained skeleton bulk modulus, N/m².
    pub k_b: f64,
    /// Skeleton shear modulus, N/m².
    pub mu_b: f64,
    pub tortuosity: f64,
    /// Intrinsic permeability, m².
    pub permeability: f64,
    pub porosity: f64,
    /// Dynamic fluid viscosity, Pa·s.
    pub viscosity: f64,
}

/// Built-in material names.
pub const PRESET_NAMES: [&str; 5] = ["set1", "set2", "set3", "set4", "set5"];

impl MaterialSet {
    /// Soft rock and four soil-like sets (loose to dense sands).
    pub fn preset(name: &str) -> Option<Self> {
        let s = |rho_s, rho_f, k_s, k_f, k_b, mu_b, tortuosity, permeability, porosity, viscosity| MaterialSet {
            rho_s,
            rho_f,
            k_s,
            k_f,
            k_b,
            mu_b,
            tortuosity,
            permeability,
            porosity,
            viscosity,
        };
        Some(match name {
            "set1" => s(2650.0, 900.0, 12e9, 2e9, 10e9, 5e9, 1.2, 1e-12, 0.3, 1e-3),
            "set2" => s(2600.0, 1.29, 2.3e8, 1.4e5, 1.5e8, 1.33e8, 1.0, 8e-9, 0.2, 2e-5),
            "set3" => s(2600.0, 1000.0, 2.3e8, 2e9, 1.5e8, 1.33e8, 1.0, 8e-9, 0.2, 1e-3),
            "set4" => s(2600.0, 1000.0, 2.5e8, 2e9, 1.7e8, 2.84e8, 1.0, 1e-10, 0.2, 1e-3),
            "set5" => s(2600.0, 1.29, 4.6e8, 1.4e5, 4.2e8, 4.44e8, 1.0, 1e-11, 0.2, 2e-5),
            _ => return None,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("rho_s", self.rho_s),
            ("rho_f", self.rho_f),
            ("k_s", self.k_s),
            ("k_f", self.k_f),
            ("k_b", self.k_b),
            ("mu_b", self.mu_b),
            ("tortuosity", self.tortuosity),
            ("permeability", self.permeability),
            ("porosity", self.porosity),
            ("viscosity", self.viscosity),
        ];
        for (name, v) in fields {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Material(format!("{name} must be positive, got {v}")));
            }
        }
        if self.porosity >= 1.0 {
            return Err(Error::Material("porosity must lie in (0, 1)".into()));
        }
        if self.k_b > self.k_s {
            return Err(Error::Material("drained bulk modulus exceeds grain modulus".into()));
        }
        Ok(())
    }
}

/// Isotropic elastic tensor acting on symmetric 2×2 tensors stored as
/// `[xx, yy, xy]` (tensor components, not engineering shear).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ElasticTensor {
    pub lambda: f64,
    pub mu: f64,
}

impl ElasticTensor {
    pub fn apply(&self, e: [f64; 3]) -> [f64; 3] {
        let tr = self.lambda * (e[0] + e[1]);
        [tr + 2.0 * self.mu * e[0], tr + 2.0 * self.mu * e[1], 2.0 * self.mu * e[2]]
    }

    /// Inverse of [`apply`](Self::apply) on the in-plane components.
    pub fn compliance(&self, s: [f64; 3]) -> [f64; 3] {
        let tr = s[0] + s[1];
        let k = self.lambda / (2.0 * (self.lambda + self.mu));
        let inv = 1.0 / (2.0 * self.mu);
        [inv * (s[0] - k * tr), inv * (s[1] - k * tr), inv * s[2]]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WaveSpeeds {
    pub c_1p: f64,
    pub c_2p: f64,
    pub c_s: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DerivedMaterial {
    pub base: MaterialSet,
    /// Effective density ρ_s(1−φ) + ρ_f φ.
    pub rho: f64,
    pub rho_f: f64,
    /// Apparent fluid density τ ρ_f / φ.
    pub rho_w: f64,
    /// Biot–Willis coefficient.
    pub alpha: f64,
    /// Coupling modulus.
    pub m: f64,
    pub lambda_b: f64,
    pub mu_b: f64,
    /// Darcy drag η/κ.
    pub drag: f64,
    /// Characteristic frequency, Hz.
    pub f_c: f64,
    pub speeds: WaveSpeeds,
}

impl DerivedMaterial {
    pub fn elastic(&self) -> ElasticTensor {
        ElasticTensor {
            lambda: self.lambda_b,
            mu: self.mu_b,
        }
    }
}

pub fn derive(m: &MaterialSet) -> Result<DerivedMaterial> {
    m.validate()?;
    let phi = m.porosity;
    let alpha = 1.0 - m.k_b / m.k_s;
    let inv_m = phi / m.k_f + (alpha - phi) / m.k_s;
    if !(inv_m > 0.0) {
        return Err(Error::Material(format!("coupling modulus is non-positive (1/M = {inv_m:e})")));
    }
    let mut d = DerivedMaterial {
        base: m.clone(),
        rho: m.rho_s * (1.0 - phi) + m.rho_f * phi,
        rho_f: m.rho_f,
        rho_w: m.tortuosity * m.rho_f / phi,
        alpha,
        m: 1.0 / inv_m,
        lambda_b: m.k_b - 2.0 / 3.0 * m.mu_b,
        mu_b: m.mu_b,
        drag: m.viscosity / m.permeability,
        f_c: m.viscosity * phi / (2.0 * std::f64::consts::PI * m.rho_f * m.tortuosity * m.permeability),
        speeds: WaveSpeeds {
            c_1p: 0.0,
            c_2p: 0.0,
            c_s: 0.0,
        },
    };
    d.speeds = wave_speeds(&d)?;
    Ok(d)
}

/// Inviscid (high-frequency) Biot wave speeds.
///
/// Dilatational speeds solve `det(K − c² R) = 0` with the undrained moduli
/// `K = [[λ + 2μ + α²M, αM], [αM, M]]` and density matrix
/// `R = [[ρ, ρ_f], [ρ_f, ρ_w]]`; the shear speed is `sqrt(μ / (ρ − ρ_f²/ρ_w))`.
pub fn wave_speeds(d: &DerivedMaterial) -> Result<WaveSpeeds> {
    let h = d.lambda_b + 2.0 * d.mu_b + d.alpha * d.alpha * d.m;
    let am = d.alpha * d.m;
    let qa = d.rho * d.rho_w - d.rho_f * d.rho_f;
    let qb = -(h * d.rho_w + d.m * d.rho - 2.0 * am * d.rho_f);
    let qc = h * d.m - am * am;
    let disc = qb * qb - 4.0 * qa * qc;
    if !(qa > 0.0) || disc < 0.0 {
        return Err(Error::Material("complex dilatational wave speeds".into()));
    }
    let q = -0.5 * (qb - disc.sqrt()); // qb < 0, so this is the large root times qa
    let (fast, slow) = (q / qa, qc / q);
    let shear = d.mu_b / (d.rho - d.rho_f * d.rho_f / d.rho_w);
    if !(slow > 0.0) || !(shear > 0.0) {
        return Err(Error::Material("non-positive squared wave speed".into()));
    }
    Ok(WaveSpeeds {
        c_1p: fast.sqrt(),
        c_2p: slow.sqrt(),
        c_s: shear.sqrt(),
    })
}
