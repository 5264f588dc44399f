//! The two-parameter lift `λ(t, y) = (λ ∗ Ψ_y)(t)` and the square functions built on it.

use std::ops::Range;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dyadic::DyadicRectangle;
use super::wavelet::WaveletProfile;
use crate::quadrature::ScaleQuadrature;
use crate::spectral::{GridSpec, SampledFunction2D};
use crate::{Error, Result};

/// Fewest grid cells per unit of `y` accepted for a kernel half width.
pub const MIN_KERNEL_HALF_WIDTH: usize = 4;
const ALIGN_TOL: f64 = 1e-9;

/// `Ψ_y(x) = ψ(x₁/y₁)ψ(x₂/y₂)/(y₁y₂)` sampled on `grid`.
pub fn psi_y_kernel(w: &WaveletProfile, y: (f64, f64), grid: &GridSpec) -> Result<SampledFunction2D> {
    check_y(y)?;
    for (yi, h) in [(y.0, grid.cell.0), (y.1, grid.cell.1)] {
        if yi < MIN_KERNEL_HALF_WIDTH as f64 * h {
            return Err(Error::UnderResolved(format!(
                "scale {yi} spans fewer than {MIN_KERNEL_HALF_WIDTH} cells of width {h}"
            )));
        }
    }
    SampledFunction2D::from_fn(grid.clone(), |x1, x2| {
        Complex64::new(w.psi(x1 / y.0) * w.psi(x2 / y.1) / (y.0 * y.1), 0.0)
    })
}

fn check_y(y: (f64, f64)) -> Result<()> {
    if !(y.0 > 0.0 && y.1 > 0.0 && y.0.is_finite() && y.1.is_finite()) {
        return Err(Error::InvalidArgument(format!("scales must be positive, got {y:?}")));
    }
    Ok(())
}

/// Discrete 1-D kernel `k_j ≈ h ψ(jh/y)/y`, `|j| ≤ ⌊y/h⌋`, with its mean removed so
/// that constants are annihilated exactly.
pub fn axis_kernel(w: &WaveletProfile, y: f64, h: f64) -> Result<Vec<f64>> {
    let half = (y / h + ALIGN_TOL).floor() as usize;
    if half < MIN_KERNEL_HALF_WIDTH {
        return Err(Error::UnderResolved(format!(
            "scale {y} spans {half} cells of width {h}; need {MIN_KERNEL_HALF_WIDTH}"
        )));
    }
    let mut k: Vec<f64> = (0..=2 * half)
        .map(|j| {
            let x = (j as f64 - half as f64) * h;
            h * w.psi(x / y) / y
        })
        .collect();
    let mean = k.iter().sum::<f64>() / k.len() as f64;
    for v in &mut k {
        *v -= mean;
    }
    Ok(k)
}

fn aligned_index(origin: f64, h: f64, x: f64) -> Result<i64> {
    let u = (x - origin) / h;
    let r = u.round();
    if (u - r).abs() > ALIGN_TOL * u.abs().max(1.0) {
        return Err(Error::InvalidGrid(format!("coordinate {x} is not on the grid")));
    }
    Ok(r as i64)
}

/// Index box of the half-open region `[lo, hi)` on a grid whose points it must align with.
pub fn region_indices(grid: &GridSpec, lo: (f64, f64), hi: (f64, f64)) -> Result<(Range<i64>, Range<i64>)> {
    let r0 = aligned_index(grid.origin.0, grid.cell.0, lo.0)?;
    let r1 = aligned_index(grid.origin.0, grid.cell.0, hi.0)?;
    let c0 = aligned_index(grid.origin.1, grid.cell.1, lo.1)?;
    let c1 = aligned_index(grid.origin.1, grid.cell.1, hi.1)?;
    if r1 <= r0 || c1 <= c0 {
        return Err(Error::InvalidArgument(format!("empty region {lo:?}..{hi:?}")));
    }
    Ok((r0..r1, c0..c1))
}

fn inside(r: &Range<i64>, n: usize) -> bool {
    r.start >= 0 && r.end <= n as i64
}

/// Axis-1 pass: `out[i][c] = Σ_j k_j λ[i − j][c]` for `i ∈ rows`, `c ∈ cols`.
fn axis1_pass(lam: &SampledFunction2D, k: &[f64], rows: &Range<i64>, cols: &Range<i64>) -> Vec<Complex64> {
    let half = (k.len() / 2) as i64;
    let n2 = lam.shape().1;
    let vals = lam.values();
    let width = cols.end - cols.start;
    let mut out = vec![Complex64::default(); (rows.end - rows.start) as usize * width as usize];
    for (oi, i) in rows.clone().enumerate() {
        let dst = &mut out[oi * width as usize..(oi + 1) * width as usize];
        for (jj, &kv) in k.iter().enumerate() {
            if kv == 0.0 {
                continue;
            }
            let src_row = (i - (jj as i64 - half)) as usize;
            let src = &vals[src_row * n2 + cols.start as usize..src_row * n2 + cols.end as usize];
            for (d, s) in dst.iter_mut().zip(src) {
                *d += s * kv;
            }
        }
    }
    out
}

/// Axis-2 pass on a buffer of `rows × width` whose column 0 sits at `offset`
/// columns left of the first output column.
fn axis2_pass(buf: &[Complex64], rows: usize, width: usize, k: &[f64], offset: usize, out_cols: usize) -> Vec<Complex64> {
    let half = k.len() / 2;
    let mut out = vec![Complex64::default(); rows * out_cols];
    for r in 0..rows {
        let src = &buf[r * width..(r + 1) * width];
        let dst = &mut out[r * out_cols..(r + 1) * out_cols];
        for (c, d) in dst.iter_mut().enumerate() {
            let centre = c + offset;
            let mut acc = Complex64::default();
            for (jj, &kv) in k.iter().enumerate() {
                acc += src[centre + half - jj] * kv;
            }
            *d = acc;
        }
    }
    out
}

/// `λ ∗ Ψ_y` on a region of interest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpperHalfLift {
    pub y: (f64, f64),
    pub values: SampledFunction2D,
}

/// `(λ ∗ Ψ_y)(t)` for `t` in the half-open region `[lo, hi)`.
pub fn convolve_psi_y(
    lam: &SampledFunction2D,
    w: &WaveletProfile,
    y: (f64, f64),
    lo: (f64, f64),
    hi: (f64, f64),
) -> Result<UpperHalfLift> {
    check_y(y)?;
    let fam = LiftFamily::build(
        lam,
        w,
        lo,
        hi,
        ScaleQuadrature {
            lo: y.0,
            hi: y.0,
            nodes: vec![y.0],
            weights: vec![1.0],
        },
        ScaleQuadrature {
            lo: y.1,
            hi: y.1,
            nodes: vec![y.1],
            weights: vec![1.0],
        },
    )?;
    Ok(UpperHalfLift {
        y,
        values: fam.lifts.into_iter().next().expect("one node"),
    })
}

/// Lifts `λ ∗ Ψ_y` over a tensor grid of scale nodes `y₁ × y₂`.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftFamily {
    roi: GridSpec,
    y1: ScaleQuadrature,
    y2: ScaleQuadrature,
    lifts: Vec<SampledFunction2D>,
}

impl LiftFamily {
    /// Requires `λ` to be sampled on `[lo, hi)` widened by the largest scale on each axis.
    pub fn build(
        lam: &SampledFunction2D,
        w: &WaveletProfile,
        lo: (f64, f64),
        hi: (f64, f64),
        y1: ScaleQuadrature,
        y2: ScaleQuadrature,
    ) -> Result<Self> {
        let g = lam.grid();
        let (rows, cols) = region_indices(g, lo, hi)?;
        let k1s = y1
            .nodes
            .iter()
            .map(|&y| axis_kernel(w, y, g.cell.0))
            .collect::<Result<Vec<_>>>()?;
        let k2s = y2
            .nodes
            .iter()
            .map(|&y| axis_kernel(w, y, g.cell.1))
            .collect::<Result<Vec<_>>>()?;
        let h1 = k1s.iter().map(|k| k.len() / 2).max().unwrap_or(0) as i64;
        let h2 = k2s.iter().map(|k| k.len() / 2).max().unwrap_or(0) as i64;
        let need_rows = rows.start - h1..rows.end + h1;
        let ext_cols = cols.start - h2..cols.end + h2;
        if !inside(&need_rows, g.shape.0) || !inside(&ext_cols, g.shape.1) {
            return Err(Error::OutOfWindow(format!(
                "lift region {lo:?}..{hi:?} needs a margin of {} x {} cells beyond it",
                h1, h2
            )));
        }
        let n_rows = (rows.end - rows.start) as usize;
        let n_cols = (cols.end - cols.start) as usize;
        let width = (ext_cols.end - ext_cols.start) as usize;
        let pass1: Vec<Vec<Complex64>> = k1s.par_iter().map(|k| axis1_pass(lam, k, &rows, &ext_cols)).collect();
        let roi = GridSpec::window(
            g.point(rows.start as usize, cols.start as usize),
            g.cell,
            (n_rows, n_cols),
        )?;
        let pairs: Vec<(usize, usize)> = (0..k1s.len()).flat_map(|a| (0..k2s.len()).map(move |b| (a, b))).collect();
        let lifts = pairs
            .par_iter()
            .map(|&(a, b)| {
                let k = &k2s[b];
                let vals = axis2_pass(&pass1[a], n_rows, width, k, h2 as usize, n_cols);
                SampledFunction2D::new(roi.clone(), vals)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { roi, y1, y2, lifts })
    }

    pub fn roi(&self) -> &GridSpec {
        &self.roi
    }

    pub fn y1(&self) -> &ScaleQuadrature {
        &self.y1
    }

    pub fn y2(&self) -> &ScaleQuadrature {
        &self.y2
    }

    /// The lift at scale nodes `(y1.nodes[a], y2.nodes[b])`.
    pub fn lift(&self, a: usize, b: usize) -> &SampledFunction2D {
        &self.lifts[a * self.y2.len() + b]
    }

    /// Iterate `(y, weight, lift)` with `weight` integrating `dy₁dy₂/(y₁y₂)`.
    pub fn nodes(&self) -> impl Iterator<Item = ((f64, f64), f64, &SampledFunction2D)> + '_ {
        (0..self.y1.len()).flat_map(move |a| {
            (0..self.y2.len()).map(move |b| {
                (
                    (self.y1.nodes[a], self.y2.nodes[b]),
                    self.y1.weights[a] * self.y2.weights[b],
                    self.lift(a, b),
                )
            })
        })
    }

    /// Index box of `R` inside the region of interest.
    pub fn rectangle_indices(&self, r: &DyadicRectangle) -> Result<(Range<usize>, Range<usize>)> {
        let (rows, cols) = region_indices(&self.roi, r.lo(), r.hi())?;
        if !inside(&rows, self.roi.shape.0) || !inside(&cols, self.roi.shape.1) {
            return Err(Error::OutOfWindow(format!("rectangle {r:?} outside the lift region")));
        }
        Ok((rows.start as usize..rows.end as usize, cols.start as usize..cols.end as usize))
    }

    pub fn covers(&self, r: &DyadicRectangle) -> bool {
        self.y1.covers(0.5 * r.i.len(), r.i.len()) && self.y2.covers(0.5 * r.j.len(), r.j.len())
    }
}

fn band_check(family: &LiftFamily, r: &DyadicRectangle) -> Result<()> {
    if !family.covers(r) {
        let (lo, hi) = if family.y1.covers(0.5 * r.i.len(), r.i.len()) {
            (0.5 * r.j.len(), r.j.len())
        } else {
            (0.5 * r.i.len(), r.i.len())
        };
        return Err(Error::ScaleBandNotCovered { lo, hi });
    }
    Ok(())
}

/// `S_R²(φ) = ∬_{R₊} |φ(t, y)|² dt dy/(y₁y₂)`.
pub fn s_r_squared(family: &LiftFamily, r: &DyadicRectangle) -> Result<f64> {
    band_check(family, r)?;
    let (rows, cols) = family.rectangle_indices(r)?;
    let cell = family.roi.cell.0 * family.roi.cell.1;
    let mut total = 0.0;
    for (_, wt, lift) in family.nodes() {
        let mut e = 0.0;
        for i in rows.clone() {
            for j in cols.clone() {
                e += lift.get(i, j).norm_sqr();
            }
        }
        total += wt * cell * e;
    }
    Ok(total)
}

/// A double S-function value with its truncation data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SFunctionValue {
    pub value: f64,
    /// Scale range actually integrated.
    pub y_range: ((f64, f64), (f64, f64)),
    /// Smallest fraction of a cone cross-section inside the region of interest.
    pub min_coverage: f64,
    pub truncated: bool,
}

/// Overlap of the sample cells `[t − h/2, t + h/2)` with `(x − y, x + y)`.
fn overlap_weights(origin: f64, h: f64, n: usize, x: f64, y: f64) -> (Vec<(usize, f64)>, f64) {
    let (lo, hi) = (x - y, x + y);
    let first = (((lo - origin) / h) - 0.5).floor().max(0.0) as usize;
    let last = ((((hi - origin) / h) + 0.5).ceil().max(0.0) as usize).min(n);
    let mut out = Vec::new();
    let mut covered = 0.0;
    for i in first..last {
        let t = origin + i as f64 * h;
        let ov = ((t + 0.5 * h).min(hi) - (t - 0.5 * h).max(lo)).max(0.0);
        if ov > 0.0 {
            out.push((i, ov));
            covered += ov;
        }
    }
    (out, covered / (2.0 * y))
}

/// `S(f)(x) = (∬_{Γ(x)} |f(t, y)|² dt dy/(y₁²y₂²))^{1/2}`, with `y` restricted to the
/// family's scale range and `t` to its region of interest.
pub fn s_function(family: &LiftFamily, x: (f64, f64)) -> Result<SFunctionValue> {
    let g = &family.roi;
    let mut total = 0.0;
    let mut min_coverage: f64 = 1.0;
    let mut any = false;
    for a in 0..family.y1.len() {
        let y1 = family.y1.nodes[a];
        let (w1, c1) = overlap_weights(g.origin.0, g.cell.0, g.shape.0, x.0, y1);
        for b in 0..family.y2.len() {
            let y2 = family.y2.nodes[b];
            let (w2, c2) = overlap_weights(g.origin.1, g.cell.1, g.shape.1, x.1, y2);
            min_coverage = min_coverage.min(c1 * c2);
            if w1.is_empty() || w2.is_empty() {
                continue;
            }
            any = true;
            let lift = family.lift(a, b);
            let mut e = 0.0;
            for &(i, o1) in &w1 {
                for &(j, o2) in &w2 {
                    e += o1 * o2 * lift.get(i, j).norm_sqr();
                }
            }
            total += family.y1.weights[a] * family.y2.weights[b] * e / (y1 * y2);
        }
    }
    if !any {
        return Err(Error::EmptyFamily("cone after truncation"));
    }
    Ok(SFunctionValue {
        value: total.sqrt(),
        y_range: ((family.y1.lo, family.y1.hi), (family.y2.lo, family.y2.hi)),
        min_coverage,
        truncated: min_coverage < 1.0 - 1e-12,
    })
}
