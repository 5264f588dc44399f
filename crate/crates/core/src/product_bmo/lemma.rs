//! Scale identity for the lattice samples of `F(Ψ_y)` over one dyadic scale band.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::wavelet::WaveletProfile;
use crate::quadrature::ScaleQuadrature;
use crate::{Error, Result};

pub const LEMMA_TOL: f64 = 1e-5;
/// Trapezoid points across the support of a dilated `ψ`.
pub const SPATIAL_POINTS: usize = 4097;
const START_NODES: usize = 16;
const MAX_NODES: usize = 256;
const CONVERGENCE_TOL: f64 = 1e-10;

/// `F(ψ(·/y)/y)(ξ)` by the trapezoid rule on `[−y, y]`, straight from the sampled profile.
fn dilated_transform(w: &WaveletProfile, y: f64, xi: f64) -> f64 {
    let n = SPATIAL_POINTS;
    let h = 2.0 * y / (n - 1) as f64;
    let mut acc = Complex64::default();
    for j in 0..n {
        let x = -y + j as f64 * h;
        let f = w.psi(x / y) / y;
        let wt = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
        acc += Complex64::from_polar(wt * f, -x * xi);
    }
    (acc * h / (2.0 * PI)).re
}

/// Samples `F(ψ_{y})(ξ)` at the nodes of a band quadrature.
fn band_samples(w: &WaveletProfile, q: &ScaleQuadrature, xi: f64) -> Vec<f64> {
    q.nodes.iter().map(|&y| dilated_transform(w, y, xi)).collect()
}

fn one_dim(w: &WaveletProfile, len: f64, k: u64, nodes: usize) -> Result<(f64, Vec<f64>, ScaleQuadrature)> {
    let q = ScaleQuadrature::gauss_log(0.5 * len, len, nodes)?;
    let s = band_samples(w, &q, 2.0 * PI * k as f64 / len);
    let v = q.weights.iter().zip(&s).map(|(wt, f)| wt * f * f).sum();
    Ok((v, s, q))
}

/// One-dimensional band integral with node doubling until two levels agree.
fn converged_one_dim(w: &WaveletProfile, len: f64, k: u64) -> Result<(f64, Vec<f64>, ScaleQuadrature)> {
    let mut n = START_NODES;
    let mut prev = one_dim(w, len, k, n)?;
    while n < MAX_NODES {
        n *= 2;
        let next = one_dim(w, len, k, n)?;
        if (next.0 - prev.0).abs() <= CONVERGENCE_TOL * next.0.abs().max(1e-300) {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Quadrature(format!(
        "band integral for k = {k}, |I| = {len} did not settle with {MAX_NODES} nodes"
    )))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub k: i64,
    pub l: i64,
    pub len_i: f64,
    pub len_j: f64,
    /// Tensor quadrature of `|F(Ψ_y)(Ak, Bl)|²` over the band.
    pub lhs: f64,
    /// Product of the two one-dimensional band integrals.
    pub lhs_factored: f64,
    pub rhs: f64,
    pub rhs_factors: (f64, f64),
    pub lhs_factors: (f64, f64),
    pub residual: f64,
    pub separability_residual: f64,
    pub passed: bool,
}

/// Both sides of the band identity for one lattice point `(k, l)` and interval lengths.
/// Negative `k` or `l` are evaluated at `|k|`, `|l|`.
pub fn lemma_scale_identity(w: &WaveletProfile, k: i64, l: i64, len_i: f64, len_j: f64) -> Result<LemmaReport> {
    if k == 0 || l == 0 {
        return Err(Error::InvalidArgument("k and l must be nonzero".into()));
    }
    for len in [len_i, len_j] {
        if !(len > 0.0 && len.is_finite()) {
            return Err(Error::InvalidArgument(format!("interval length {len} must be positive")));
        }
    }
    let (ka, la) = (k.unsigned_abs(), l.unsigned_abs());
    let (li, si, qi) = converged_one_dim(w, len_i, ka)?;
    let (lj, sj, qj) = converged_one_dim(w, len_j, la)?;
    let mut lhs = 0.0;
    for (a, fa) in si.iter().enumerate() {
        for (b, fb) in sj.iter().enumerate() {
            let v = fa * fb;
            lhs += qi.weights[a] * qj.weights[b] * v * v;
        }
    }
    let (ri, rj) = (w.band_weight(ka), w.band_weight(la));
    let rhs = ri * rj;
    let residual = (lhs - rhs).abs() / rhs.max(1e-15);
    let lhs_factored = li * lj;
    let separability_residual = (lhs - lhs_factored).abs() / lhs_factored.max(1e-15);
    Ok(LemmaReport {
        k,
        l,
        len_i,
        len_j,
        lhs,
        lhs_factored,
        rhs,
        rhs_factors: (ri, rj),
        lhs_factors: (li, lj),
        residual,
        separability_residual,
        passed: residual < LEMMA_TOL,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaTable {
    pub scales: Vec<(f64, f64)>,
    pub rows: Vec<LemmaReport>,
    pub max_residual: f64,
    /// Largest relative spread of the left side across the scale pairs, per `(k, l)`.
    pub max_scale_spread: f64,
    pub passed: bool,
}

pub const LEMMA_SCALES: [(f64, f64); 3] = [(1.0, 1.0), (0.25, 1.0), (0.0625, 0.25)];
pub const LEMMA_FREQUENCIES: [i64; 3] = [1, 2, 4];

pub fn lemma_table(w: &WaveletProfile, freqs: &[i64], scales: &[(f64, f64)]) -> Result<LemmaTable> {
    let mut rows = Vec::new();
    let mut max_scale_spread: f64 = 0.0;
    for &k in freqs {
        for &l in freqs {
            let start = rows.len();
            for &(li, lj) in scales {
                rows.push(lemma_scale_identity(w, k, l, li, lj)?);
            }
            let vals: Vec<f64> = rows[start..].iter().map(|r| r.lhs).collect();
            let hi = vals.iter().cloned().fold(f64::MIN, f64::max);
            let lo = vals.iter().cloned().fold(f64::MAX, f64::min);
            max_scale_spread = max_scale_spread.max((hi - lo) / hi.abs().max(1e-15));
        }
    }
    let max_residual = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    Ok(LemmaTable {
        scales: scales.to_vec(),
        passed: max_residual < LEMMA_TOL && max_scale_spread < LEMMA_TOL,
        rows,
        max_residual,
        max_scale_spread,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayTrend {
    pub k: Vec<u64>,
    pub weight: Vec<f64>,
    pub monotone: bool,
}

/// `W₁(k)` at `k = 1, 2, 4, …, 2^{levels−1}`.
pub fn decay_trend(w: &WaveletProfile, levels: u32) -> DecayTrend {
    let k: Vec<u64> = (0..levels).map(|j| 1u64 << j).collect();
    let weight: Vec<f64> = k.iter().map(|&k| w.band_weight(k)).collect();
    let monotone = weight.windows(2).all(|p| p[1] <= p[0]);
    DecayTrend { k, weight, monotone }
}
