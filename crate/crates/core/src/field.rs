//! Support functions on the circle sampled on a uniform periodic grid.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::vec2::Vec2;

/// Grid sample `h_k = h(2πk/N)` of a support function on `S^1`.
///
/// Derivatives use periodic 3-point central differences. A valid field is
/// positive and satisfies the discrete convexity condition
/// `(D²h + h)_k > 0` at every node.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportField {
    h: Vec<f64>,
    p_exponent: f64,
}

impl SupportField {
    pub fn new(h: Vec<f64>, p_exponent: f64) -> Result<Self> {
        let field = Self::new_unchecked(h, p_exponent)?;
        field.check_convex()?;
        Ok(field)
    }

    /// Checks positivity and size only; convexity is left to the caller.
    pub fn new_unchecked(h: Vec<f64>, p_exponent: f64) -> Result<Self> {
        if h.len() < 4 {
            return Err(Error::ResolutionTooSmall { got: h.len(), min: 4 });
        }
        if let Some((i, &v)) = h.iter().enumerate().find(|(_, v)| !(**v > 0.0) || !v.is_finite()) {
            return Err(Error::NonPositiveSupport { index: i, value: v });
        }
        if !p_exponent.is_finite() {
            return Err(Error::InvalidInput(format!("exponent {p_exponent}")));
        }
        Ok(Self { h, p_exponent })
    }

    /// Samples `f(θ)` on the uniform grid of `n` angles.
    pub fn from_fn(n: usize, p_exponent: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new((0..n).map(|k| f(theta(k, n))).collect(), p_exponent)
    }

    pub fn constant(n: usize, r: f64, p_exponent: f64) -> Result<Self> {
        Self::new(vec![r; n], p_exponent)
    }

    pub fn resolution(&self) -> usize {
        self.h.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.h
    }

    pub fn p_exponent(&self) -> f64 {
        self.p_exponent
    }

    pub fn step(&self) -> f64 {
        TAU / self.h.len() as f64
    }

    pub fn theta(&self, k: usize) -> f64 {
        theta(k, self.h.len())
    }

    /// Central first difference `(h_{k+1} - h_{k-1}) / 2Δ`.
    pub fn first_difference(&self) -> Vec<f64> {
        let n = self.h.len();
        let d = self.step();
        (0..n)
            .map(|k| (self.h[(k + 1) % n] - self.h[(k + n - 1) % n]) / (2.0 * d))
            .collect()
    }

    /// Central second difference `(h_{k+1} - 2h_k + h_{k-1}) / Δ²`.
    pub fn second_difference(&self) -> Vec<f64> {
        let n = self.h.len();
        let d2 = self.step() * self.step();
        (0..n)
            .map(|k| (self.h[(k + 1) % n] - 2.0 * self.h[k] + self.h[(k + n - 1) % n]) / d2)
            .collect()
    }

    /// `D²h + h` at each node.
    pub fn convexity(&self) -> Vec<f64> {
        self.second_difference()
            .into_iter()
            .zip(&self.h)
            .map(|(a, b)| a + b)
            .collect()
    }

    pub fn min_convexity(&self) -> f64 {
        self.convexity().into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn check_convex(&self) -> Result<()> {
        let c = self.convexity();
        match c.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
            Some((node, &value)) => Err(Error::ConvexityViolated { node, value }),
            None => Ok(()),
        }
    }

    /// Boundary point `x(θ) = h u + h' u⊥` at node `k`.
    pub fn boundary_points(&self) -> Vec<Vec2> {
        let dh = self.first_difference();
        (0..self.h.len())
            .map(|k| {
                let u = Vec2::from_angle(self.theta(k));
                u * self.h[k] + u.perp() * dh[k]
            })
            .collect()
    }

    /// Max asymmetry `|h(θ) - h(θ + π)|` (needs an even resolution).
    pub fn asymmetry(&self) -> f64 {
        let n = self.h.len();
        (0..n / 2)
            .map(|k| (self.h[k] - self.h[k + n / 2]).abs())
            .fold(0.0, f64::max)
    }
}

pub(crate) fn theta(k: usize, n: usize) -> f64 {
    TAU * k as f64 / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stencils_on_cosine() {
        let n = 256;
        let f = SupportField::from_fn(n, 1.0, |t| 2.0 + 0.1 * (2.0 * t).cos()).unwrap();
        let d = f.step();
        let dh = f.first_difference();
        let d2 = f.second_difference();
        for k in 0..n {
            let t = f.theta(k);
            // exact discrete symbols of the 3-point stencils on cos 2θ
            let first = -0.1 * (2.0 * d).sin() / d * (2.0 * t).sin();
            let second = -0.1 * 4.0 * (d).sin().powi(2) / (d * d) * (2.0 * t).cos();
            assert!((dh[k] - first).abs() < 1e-12);
            assert!((d2[k] - second).abs() < 1e-10);
        }
        assert!(f.asymmetry() < 1e-15);
    }

    #[test]
    fn rejects_bad_fields() {
        assert!(matches!(
            SupportField::new(vec![1.0, 1.0, -1.0, 1.0], 1.0),
            Err(Error::NonPositiveSupport { index: 2, .. })
        ));
        let mut h = vec![1.0; 64];
        h[10] = 3.0;
        assert!(matches!(
            SupportField::new(h, 1.0),
            Err(Error::ConvexityViolated { node: 10, .. })
        ));
        assert!(SupportField::new(vec![1.0; 3], 1.0).is_err());
    }
}
