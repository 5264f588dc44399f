//! One-dimensional quadrature rules used throughout the crate.
//!
//! Scale integrals of the form `∫ g(y) dy/y` are evaluated in the variable
//! `u = ln y`, where the measure becomes `du` and the integrands met here are
//! smooth and rapidly decaying.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, refined by Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss–Legendre rule on `[a, b]` with `panels` equal panels.
pub fn composite_gauss(a: f64, b: f64, panels: usize, order: usize) -> (Vec<f64>, Vec<f64>) {
    let (xs, ws) = gauss_legendre(order);
    let width = (b - a) / panels as f64;
    let mut nodes = Vec::with_capacity(panels * order);
    let mut weights = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let left = a + p as f64 * width;
        for (x, w) in xs.iter().zip(&ws) {
            nodes.push(left + 0.5 * width * (x + 1.0));
            weights.push(0.5 * width * w);
        }
    }
    (nodes, weights)
}

/// Nodes and weights for `∫_lo^hi g(y) dy/y`.
///
/// The weights already contain the `1/y` factor, so the integral is
/// `Σ weights[i] · g(nodes[i])`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleQuadrature {
    pub lo: f64,
    pub hi: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl ScaleQuadrature {
    /// Gauss–Legendre in `ln y` on `(lo, hi]`.
    pub fn gauss_log(lo: f64, hi: f64, n: usize) -> Result<Self> {
        Self::check(lo, hi, n)?;
        let (u, w) = composite_gauss(lo.ln(), hi.ln(), 1, n);
        Ok(Self {
            lo,
            hi,
            nodes: u.iter().map(|u| u.exp()).collect(),
            weights: w,
        })
    }

    /// Composite Gauss–Legendre in `ln y` with `panels` panels of `order` nodes.
    pub fn composite_gauss_log(lo: f64, hi: f64, panels: usize, order: usize) -> Result<Self> {
        Self::check(lo, hi, panels * order)?;
        let (u, w) = composite_gauss(lo.ln(), hi.ln(), panels, order);
        Ok(Self {
            lo,
            hi,
            nodes: u.iter().map(|u| u.exp()).collect(),
            weights: w,
        })
    }

    /// Trapezoid rule with `n` nodes uniformly spaced in `ln y`, endpoints included.
    pub fn trapezoid_log(lo: f64, hi: f64, n: usize) -> Result<Self> {
        Self::check(lo, hi, n)?;
        if n < 2 {
            return Err(Error::InvalidArgument(
                "trapezoid scale rule needs at least two nodes".into(),
            ));
        }
        let (a, b) = (lo.ln(), hi.ln());
        let du = (b - a) / (n - 1) as f64;
        let nodes = (0..n).map(|i| (a + i as f64 * du).exp()).collect();
        let weights = (0..n)
            .map(|i| if i == 0 || i == n - 1 { 0.5 * du } else { du })
            .collect();
        Ok(Self {
            lo,
            hi,
            nodes,
            weights,
        })
    }

    fn check(lo: f64, hi: f64, n: usize) -> Result<()> {
        if !(lo > 0.0 && hi > lo && lo.is_finite() && hi.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "scale band must satisfy 0 < lo < hi, got ({lo}, {hi}]"
            )));
        }
        if n == 0 {
            return Err(Error::InvalidArgument("scale rule needs nodes".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `∫_lo^hi g(y) dy/y`.
    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&y, &w)| w * g(y))
            .sum()
    }

    /// True when the rule was built for the band `(lo, hi]` (relative 1e-12).
    pub fn covers(&self, lo: f64, hi: f64) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b.abs().max(1e-300);
        close(self.lo, lo) && close(self.hi, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in 1..12 {
            let (x, w) = gauss_legendre(n);
            for deg in 0..(2 * n) {
                let approx: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 {
                    0.0
                } else {
                    2.0 / (deg as f64 + 1.0)
                };
                assert!((approx - exact).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn log_rules_integrate_dy_over_y() {
        let g = ScaleQuadrature::gauss_log(0.5, 1.0, 6).unwrap();
        assert!((g.integrate(|_| 1.0) - 2f64.ln()).abs() < 1e-14);
        // ∫ y dy/y = hi - lo
        assert!((g.integrate(|y| y) - 0.5).abs() < 1e-12);
        let t = ScaleQuadrature::trapezoid_log(0.1, 10.0, 401).unwrap();
        assert!((t.integrate(|_| 1.0) - 100f64.ln()).abs() < 1e-12);
        assert!(g.covers(0.5, 1.0));
        assert!(!g.covers(0.25, 0.5));
    }

    #[test]
    fn rejects_bad_bands() {
        assert!(ScaleQuadrature::gauss_log(1.0, 0.5, 4).is_err());
        assert!(ScaleQuadrature::gauss_log(0.0, 0.5, 4).is_err());
        assert!(ScaleQuadrature::trapezoid_log(0.1, 0.5, 1).is_err());
    }
}
