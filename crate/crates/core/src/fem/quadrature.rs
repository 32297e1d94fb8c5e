//! Quadrature on the reference triangle `(0,0), (1,0), (0,1)` and the
//! reference edge `[0, 1]`.

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
    pub degree: u32,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Six-point symmetric rule, exact for polynomials of degree 4.
pub fn triangle_degree4() -> QuadratureRule {
    const A: f64 = 0.445_948_490_915_965;
    const WA: f64 = 0.223_381_589_678_011;
    const B: f64 = 0.091_576_213_509_771;
    const WB: f64 = 0.109_951_743_655_322;
    let orbit = |a: f64| [[a, a], [1.0 - 2.0 * a, a], [a, 1.0 - 2.0 * a]];
    let mut points = Vec::with_capacity(6);
    let mut weights = Vec::with_capacity(6);
    for (a, w) in [(A, WA), (B, WB)] {
        for p in orbit(a) {
            points.push(p);
            weights.push(0.5 * w);
        }
    }
    QuadratureRule {
        points,
        weights,
        degree: 4,
    }
}

/// Two-point Gauss–Legendre rule on `[0, 1]`, exact for cubics. Points are
/// stored as `[s, 0]`.
pub fn edge_gauss2() -> QuadratureRule {
    let h = 0.5 / 3f64.sqrt();
    QuadratureRule {
        points: vec![[0.5 - h, 0.0], [0.5 + h, 0.0]],
        weights: vec![0.5, 0.5],
        degree: 3,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    #[test]
    fn triangle_rule_integrates_monomials() {
        let q = triangle_degree4();
        assert!((q.weights.iter().sum::<f64>() - 0.5).abs() < 1e-14);
        for i in 0..=4u32 {
            for j in 0..=(4 - i) {
                let exact = factorial(i) * factorial(j) / factorial(i + j + 2);
                let approx: f64 = q
                    .points
                    .iter()
                    .zip(&q.weights)
                    .map(|(p, w)| w * p[0].powi(i as i32) * p[1].powi(j as i32))
                    .sum();
                assert!((approx - exact).abs() < 1e-13, "x^{i} y^{j}: {approx} vs {exact}");
            }
        }
    }

    #[test]
    fn edge_rule_integrates_cubics() {
        let q = edge_gauss2();
        for k in 0..=3 {
            let approx: f64 = q.points.iter().zip(&q.weights).map(|(p, w)| w * p[0].powi(k)).sum();
            assert!((approx - 1.0 / (k as f64 + 1.0)).abs() < 1e-15);
        }
    }
}
