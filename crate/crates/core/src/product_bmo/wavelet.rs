//! The admissible profile `ψ = c·d²/dx²[(1 − x²)^m]` on `[−1, 1]`.
//!
//! `ψ` is even and has mean zero. For `m ≥ 4` the zero extension is `C¹`.
//! Its transform `ψ̂(s) = ∫ψ(x)e^{−ixs}dx` is evaluated exactly from the
//! polynomial: by a Taylor series in `s` for small arguments and by repeated
//! integration by parts otherwise. `c` is chosen so that `∫₀^∞ ψ̂(s)² ds/s = 1`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::quadrature::{composite_gauss, ScaleQuadrature};
use crate::{Error, Result};

/// Exponent of the shipped profile.
pub const DEFAULT_EXPONENT: u32 = 4;
/// Smallest admissible number of profile samples on `[−1, 1]`.
pub const MIN_SAMPLES: usize = 1 << 10;

const S_MIN: f64 = 1e-3;
const S_MAX: f64 = 1e3;
const TAIL_TOL: f64 = 1e-9;
const CROSS_CHECK_TOL: f64 = 1e-8;
const TAYLOR_CUTOFF: f64 = 8.0;
const CACHE_POINTS: usize = 241;

/// Sampled profile, cached transform and normalisation data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveletProfile {
    pub schema_version: u32,
    pub exponent: u32,
    pub norm_const: f64,
    /// `ψ(x_j)`, `x_j = (2j − (n−1))/(n−1)`.
    pub samples: Vec<f64>,
    pub s_grid: Vec<f64>,
    /// `ψ̂(s)` on `s_grid`.
    pub psi_hat_cache: Vec<f64>,
    pub diagnostics: ProfileDiagnostics,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileDiagnostics {
    /// `∫₀^∞ ψ̂² ds/s` after normalisation (Gauss–Legendre in `ln s`).
    pub normalization: f64,
    /// The same integral by the trapezoid rule in `ln s`.
    pub normalization_check: f64,
    pub s_range: (f64, f64),
    /// Estimated `∫₀^{s_min} ψ̂² ds/s`.
    pub lower_tail: f64,
    /// Bound on `∫_{s_max}^∞ ψ̂² ds/s`.
    pub upper_tail: f64,
    /// Trapezoid integral of the samples.
    pub mean: f64,
    pub evenness_defect: f64,
    pub boundary_values: (f64, f64),
    /// `max |ψ(x+h) − 2ψ(x) + ψ(x−h)|/h²` over the samples, zero extended.
    pub second_difference_bound: f64,
    /// The same bound on every other sample.
    pub second_difference_bound_coarse: f64,
    /// Bounded second differences under refinement (ratio below 1.5).
    pub c1_consistent: bool,
}

/// Coefficients of `d²/dx²[(1 − x²)^m]` in powers of `x`.
fn profile_polynomial(m: u32) -> Vec<f64> {
    let m = m as usize;
    let mut g = vec![0.0; 2 * m + 1];
    let mut binom = 1.0;
    for k in 0..=m {
        g[2 * k] = if k % 2 == 0 { binom } else { -binom };
        binom = binom * (m - k) as f64 / (k + 1) as f64;
    }
    (2..g.len()).map(|n| n as f64 * (n - 1) as f64 * g[n]).collect()
}

fn derivative(p: &[f64]) -> Vec<f64> {
    p.iter().enumerate().skip(1).map(|(i, c)| i as f64 * c).collect()
}

fn horner(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// `ψ̂` of the unnormalised profile (`c = 1`).
#[derive(Clone, Debug)]
struct UnitTransform {
    moments: Vec<f64>,
    /// `(P^{(k)}(1), P^{(k)}(0))` for every nonvanishing derivative.
    ends: Vec<(f64, f64)>,
}

impl UnitTransform {
    fn new(p: &[f64]) -> Self {
        // M_q = ∫₀¹ P(x) x^q dx for even q, enough for the Taylor series
        let moments = (0..64)
            .map(|j| {
                let q = 2 * j;
                p.iter().enumerate().map(|(i, c)| c / (i + q + 1) as f64).sum()
            })
            .collect();
        let mut ends = Vec::new();
        let mut d = p.to_vec();
        while !d.is_empty() {
            ends.push((horner(&d, 1.0), horner(&d, 0.0)));
            d = derivative(&d);
        }
        Self { moments, ends }
    }

    fn eval(&self, s: f64) -> f64 {
        let s = s.abs();
        if s < TAYLOR_CUTOFF {
            let mut term = 1.0;
            let mut acc = 0.0;
            for (j, m) in self.moments.iter().enumerate() {
                if j > 0 {
                    term *= -s * s / ((2 * j - 1) * (2 * j)) as f64;
                }
                acc += term * m;
                if j > 4 && term.abs() < 1e-18 {
                    break;
                }
            }
            2.0 * acc
        } else {
            // ∫₀¹ P e^{isx} = Σ_k (−1)^k [P^{(k)}(1)e^{is} − P^{(k)}(0)] / (is)^{k+1}
            let (sn, cs) = s.sin_cos();
            let mut re = 0.0;
            let mut pow = s;
            for (k, &(p1, p0)) in self.ends.iter().enumerate() {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                // 1/(is)^{k+1} = (−i)^{k+1}/s^{k+1}
                let (ur, ui) = match (k + 1) % 4 {
                    0 => (1.0, 0.0),
                    1 => (0.0, -1.0),
                    2 => (-1.0, 0.0),
                    _ => (0.0, 1.0),
                };
                let (nr, ni) = (p1 * cs - p0, p1 * sn);
                re += sign * (nr * ur - ni * ui) / pow;
                pow *= s;
            }
            2.0 * re
        }
    }

    /// `A` with `|ψ̂(s)| ≤ A/s³` for `s ≥ s0`, valid when `P(1) = P′(1) = 0`.
    fn cubic_envelope(&self, s0: f64) -> f64 {
        self.ends
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &(p1, p0))| 2.0 * (p1.abs() + p0.abs()) * s0.powi(2 - k as i32))
            .sum()
    }
}

impl WaveletProfile {
    /// `ψ(x)`, zero outside `[−1, 1]`.
    #[inline]
    pub fn psi(&self, x: f64) -> f64 {
        unit_profile(self.exponent, x) * self.norm_const
    }

    /// `ψ̂(s) = ∫ψ(x)e^{−ixs}dx`.
    pub fn psi_hat(&self, s: f64) -> f64 {
        self.unit().eval(s) * self.norm_const
    }

    /// `F(ψ)(s) = (2π)^{-1}ψ̂(s)`.
    pub fn f_psi(&self, s: f64) -> f64 {
        self.psi_hat(s) / (2.0 * PI)
    }

    /// `F(Ψ)(s₁, s₂)` for `Ψ = Ψ_{(1,1)}`.
    pub fn f_psi_2d(&self, s1: f64, s2: f64) -> f64 {
        let u = self.unit();
        u.eval(s1) * u.eval(s2) * self.norm_const * self.norm_const / (4.0 * PI * PI)
    }

    /// `∫|ψ|`, from the antiderivative `g′` at the interior root of `ψ`.
    pub fn l1_mass(&self) -> f64 {
        let m = self.exponent as f64;
        let r = (1.0 / (2.0 * m - 1.0)).sqrt();
        8.0 * m * r * (1.0 - r * r).powf(m - 1.0) * self.norm_const.abs()
    }

    pub fn sample_points(&self) -> Vec<f64> {
        sample_points(self.samples.len())
    }

    fn unit(&self) -> UnitTransform {
        UnitTransform::new(&profile_polynomial(self.exponent))
    }

    /// `W₁(k) = ∫_{πk}^{2πk} F(ψ)(s)² ds/s`, with `W₁(0) = 0`.
    pub fn band_weight(&self, k: u64) -> f64 {
        if k == 0 {
            return 0.0;
        }
        let lo = PI * k as f64;
        let panels = (k as usize).clamp(4, 4096);
        let q = ScaleQuadrature::composite_gauss_log(lo, 2.0 * lo, panels, 16).expect("valid band");
        let u = self.unit();
        let c = self.norm_const / (2.0 * PI);
        q.integrate(|s| {
            let v = u.eval(s) * c;
            v * v
        })
    }

    /// `W₁(0), …, W₁(k_max)`.
    pub fn band_weights(&self, k_max: u64) -> Vec<f64> {
        (0..=k_max).map(|k| self.band_weight(k)).collect()
    }

    /// Check a deserialised profile against a fresh build.
    pub fn validate(&self) -> Result<()> {
        let fresh = build_psi_with_exponent(self.samples.len(), self.exponent)?;
        if (fresh.norm_const - self.norm_const).abs() > 1e-9 * fresh.norm_const.abs() {
            return Err(Error::InvalidArgument(format!(
                "profile norm_const {} disagrees with the rebuilt value {}",
                self.norm_const, fresh.norm_const
            )));
        }
        Ok(())
    }
}

/// `d²/dx²[(1 − x²)^m] = 2m(1 − x²)^{m−2}((2m − 1)x² − 1)` on `[−1, 1]`.
fn unit_profile(m: u32, x: f64) -> f64 {
    let u = x * x;
    if u >= 1.0 {
        return 0.0;
    }
    let mf = m as f64;
    2.0 * mf * (1.0 - u).powi(m as i32 - 2) * ((2.0 * mf - 1.0) * u - 1.0)
}

fn sample_points(n: usize) -> Vec<f64> {
    let d = (n - 1) as f64;
    (0..n).map(|j| (2.0 * j as f64 - d) / d).collect()
}

fn second_difference_bound(samples: &[f64], h: f64) -> f64 {
    let n = samples.len();
    let at = |j: isize| if j < 0 || j >= n as isize { 0.0 } else { samples[j as usize] };
    (-1..=n as isize)
        .map(|j| (at(j + 1) - 2.0 * at(j) + at(j - 1)).abs())
        .fold(0.0, f64::max)
        / (h * h)
}

/// Build the shipped profile with `n` samples on `[−1, 1]`.
pub fn build_psi(n: usize) -> Result<WaveletProfile> {
    build_psi_with_exponent(n, DEFAULT_EXPONENT)
}

pub fn build_psi_with_exponent(n: usize, exponent: u32) -> Result<WaveletProfile> {
    if n < MIN_SAMPLES {
        return Err(Error::UnderResolved(format!(
            "profile needs at least {MIN_SAMPLES} samples, got {n}"
        )));
    }
    if exponent < 3 {
        return Err(Error::InvalidArgument(format!(
            "profile exponent must be at least 3, got {exponent}"
        )));
    }
    let p = profile_polynomial(exponent);
    let unit = UnitTransform::new(&p);

    // ∫₀^∞ ψ̂² ds/s in u = ln s; panels of width ≈ 0.01 keep the oscillation resolved
    let (a, b) = (S_MIN.ln(), S_MAX.ln());
    let panels = ((b - a) / 0.01).ceil() as usize;
    let (us, ws) = composite_gauss(a, b, panels, 8);
    let raw: f64 = us
        .iter()
        .zip(&ws)
        .map(|(u, w)| {
            let v = unit.eval(u.exp());
            w * v * v
        })
        .sum();
    let trap = ScaleQuadrature::trapezoid_log(S_MIN, S_MAX, 1 << 18)?;
    let raw_check = trap.integrate(|s| unit.eval(s).powi(2));
    if !(raw > 0.0) || (raw - raw_check).abs() > CROSS_CHECK_TOL * raw {
        return Err(Error::Quadrature(format!(
            "normalisation integral did not converge on [{S_MIN}, {S_MAX}]: {raw} vs {raw_check}"
        )));
    }
    let lower_tail_raw = unit.eval(S_MIN).powi(2) / 4.0;
    let env = unit.cubic_envelope(S_MAX);
    let upper_tail_raw = env * env / (6.0 * S_MAX.powi(6));
    let c2 = 1.0 / raw;
    let (lower_tail, upper_tail) = (lower_tail_raw * c2, upper_tail_raw * c2);
    if lower_tail > TAIL_TOL || upper_tail > TAIL_TOL {
        return Err(Error::Quadrature(format!(
            "normalisation tails too large: lower {lower_tail:e}, upper {upper_tail:e}"
        )));
    }
    let norm_const = c2.sqrt();

    let xs = sample_points(n);
    let samples: Vec<f64> = xs.iter().map(|&x| unit_profile(exponent, x) * norm_const).collect();
    let h = 2.0 / (n - 1) as f64;
    let mean = h * (samples.iter().sum::<f64>() - 0.5 * (samples[0] + samples[n - 1]));
    let evenness_defect = (0..n)
        .map(|j| (samples[j] - samples[n - 1 - j]).abs())
        .fold(0.0, f64::max);
    let coarse: Vec<f64> = samples.iter().step_by(2).copied().collect();
    let sd = second_difference_bound(&samples, h);
    let sd_coarse = second_difference_bound(&coarse, 2.0 * h);

    let cache_q = ScaleQuadrature::trapezoid_log(S_MIN, S_MAX, CACHE_POINTS)?;
    let psi_hat_cache = cache_q.nodes.iter().map(|&s| unit.eval(s) * norm_const).collect();

    Ok(WaveletProfile {
        schema_version: crate::SCHEMA_VERSION,
        exponent,
        norm_const,
        samples: samples.clone(),
        s_grid: cache_q.nodes,
        psi_hat_cache,
        diagnostics: ProfileDiagnostics {
            normalization: raw * c2,
            normalization_check: raw_check * c2,
            s_range: (S_MIN, S_MAX),
            lower_tail,
            upper_tail,
            mean,
            evenness_defect,
            boundary_values: (samples[0], samples[n - 1]),
            second_difference_bound: sd,
            second_difference_bound_coarse: sd_coarse,
            c1_consistent: sd < 1.5 * sd_coarse,
        },
    })
}
