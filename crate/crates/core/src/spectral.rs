//! Sampled functions on uniform grids and the Fourier conventions used by the
//! rest of the crate.
//!
//! Three transforms are provided, all with the `2π` factors on the forward side:
//!
//! * torus coefficients `f̂(n) = (2π)^{-2} ∫_{T²} f(x) e^{-in·x} dx`;
//! * `ε`-periodic coefficients on `T²_ε = [-π/ε₁, π/ε₁) × [-π/ε₂, π/ε₂)`,
//!   `f̂(εα) = ε₁ε₂ (2π)^{-2} ∫ f(x) e^{-ix·(ε₁α₁, ε₂α₂)} dx`, whose inverse is
//!   `f(x) = Σ_α f̂(εα) e^{ix·(ε₁α₁, ε₂α₂)}` (the torus case is `ε = (1, 1)`);
//! * the continuous transform `F(f)(ξ) = (2π)^{-2} ∫_{R²} f(x) e^{-ix·ξ} dx`.
//!
//! Periodic integrals use the trapezoid rule on the period cell, which on a
//! uniform grid is the plain grid mean and is exact for trigonometric
//! polynomials below the Nyquist limit.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const TWO_PI: f64 = 2.0 * PI;

/// Relative tolerance for "the grid tiles the period cell exactly".
const PERIOD_TOL: f64 = 1e-9;

/// Uniform grid description; serialised as `{origin, cell, shape, period?}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub origin: (f64, f64),
    pub cell: (f64, f64),
    pub shape: (usize, usize),
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<(f64, f64)>,
}

impl GridSpec {
    /// A non-periodic sample window.
    pub fn window(origin: (f64, f64), cell: (f64, f64), shape: (usize, usize)) -> Result<Self> {
        let g = Self {
            origin,
            cell,
            shape,
            period: None,
        };
        g.validate()?;
        Ok(g)
    }

    /// A grid tiling the period cell `[origin, origin + period)` with `shape` points.
    pub fn periodic(origin: (f64, f64), period: (f64, f64), shape: (usize, usize)) -> Result<Self> {
        let g = Self {
            origin,
            cell: (period.0 / shape.0 as f64, period.1 / shape.1 as f64),
            shape,
            period: Some(period),
        };
        g.validate()?;
        Ok(g)
    }

    /// `[0, 2π)²` sampled with `n1 × n2` points.
    pub fn torus(n1: usize, n2: usize) -> Result<Self> {
        Self::periodic((0.0, 0.0), (TWO_PI, TWO_PI), (n1, n2))
    }

    /// `T²_ε` (centred period cell) sampled with `n1 × n2` points.
    pub fn eps_torus(eps: (f64, f64), n1: usize, n2: usize) -> Result<Self> {
        if !(eps.0 > 0.0 && eps.1 > 0.0) {
            return Err(Error::InvalidGrid(format!("eps must be positive, got {eps:?}")));
        }
        let p = (TWO_PI / eps.0, TWO_PI / eps.1);
        Self::periodic((-0.5 * p.0, -0.5 * p.1), p, (n1, n2))
    }

    pub fn validate(&self) -> Result<()> {
        let (n1, n2) = self.shape;
        if n1 < 2 || n2 < 2 {
            return Err(Error::InvalidGrid(format!(
                "shape must be at least 2x2, got {n1}x{n2}"
            )));
        }
        let finite = self.origin.0.is_finite() && self.origin.1.is_finite();
        if !finite || !(self.cell.0 > 0.0 && self.cell.1 > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "cell must be positive and origin finite (cell {:?}, origin {:?})",
                self.cell, self.origin
            )));
        }
        if let Some((p1, p2)) = self.period {
            let t1 = n1 as f64 * self.cell.0;
            let t2 = n2 as f64 * self.cell.1;
            if (t1 - p1).abs() > PERIOD_TOL * p1 || (t2 - p2).abs() > PERIOD_TOL * p2 {
                return Err(Error::InvalidGrid(format!(
                    "grid {n1}x{n2} with cell {:?} does not tile the period ({p1}, {p2})",
                    self.cell
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.shape.0 * self.shape.1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn x1(&self, i: usize) -> f64 {
        self.origin.0 + i as f64 * self.cell.0
    }

    #[inline]
    pub fn x2(&self, j: usize) -> f64 {
        self.origin.1 + j as f64 * self.cell.1
    }

    #[inline]
    pub fn point(&self, i: usize, j: usize) -> (f64, f64) {
        (self.x1(i), self.x2(j))
    }

    /// Frequency spacing `εᵢ = 2π/Pᵢ` of a periodic grid.
    pub fn eps(&self) -> Option<(f64, f64)> {
        self.period.map(|(p1, p2)| (TWO_PI / p1, TWO_PI / p2))
    }

    /// Largest symmetric coefficient window with `2K + 1 ≤ N` on each axis.
    pub fn nyquist_window(&self) -> (usize, usize) {
        ((self.shape.0 - 1) / 2, (self.shape.1 - 1) / 2)
    }
}

/// Complex samples on a [`GridSpec`], row `i` along `x₁`, column `j` along `x₂`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledFunction2D {
    grid: GridSpec,
    values: Vec<Complex64>,
}

impl SampledFunction2D {
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        grid.validate()?;
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64) -> Complex64) -> Result<Self> {
        grid.validate()?;
        let (n1, n2) = grid.shape;
        let mut values = Vec::with_capacity(n1 * n2);
        for i in 0..n1 {
            let x1 = grid.x1(i);
            for j in 0..n2 {
                values.push(f(x1, grid.x2(j)));
            }
        }
        Ok(Self { grid, values })
    }

    /// Outer product `f(x₁, x₂) = a(x₁) b(x₂)` from per-axis samples.
    pub fn separable(grid: GridSpec, a: &[Complex64], b: &[Complex64]) -> Result<Self> {
        if a.len() != grid.shape.0 || b.len() != grid.shape.1 {
            return Err(Error::InvalidGrid("factor lengths do not match grid".into()));
        }
        let mut values = Vec::with_capacity(a.len() * b.len());
        for &ai in a {
            values.extend(b.iter().map(|&bj| ai * bj));
        }
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn shape(&self) -> (usize, usize) {
        self.grid.shape
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.grid.shape.1 + j]
    }

    pub fn is_periodic(&self) -> bool {
        self.grid.period.is_some()
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        self.map(|v| v * c)
    }

    /// Pointwise product with another function on the same grid.
    pub fn pointwise(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::InvalidGrid("grids differ".into()));
        }
        Ok(Self {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// Grid mean of `|f|^p`; for a periodic grid this is the normalised
    /// `L^p` integral over the period cell.
    pub fn mean_abs_pow(&self, p: f64) -> f64 {
        self.values.iter().map(|v| v.norm().powf(p)).sum::<f64>() / self.values.len() as f64
    }

    /// Normalised `L¹` norm over the period cell (`(2π)^{-2}∫|f|` on the torus).
    pub fn l1_mean(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).sum::<f64>() / self.values.len() as f64
    }

    /// Unnormalised rectangle-rule integral `Δ₁Δ₂ Σ f`.
    pub fn riemann_sum(&self) -> Complex64 {
        let s: Complex64 = self.values.iter().sum();
        s * self.grid.cell.0 * self.grid.cell.1
    }

    /// Restriction to the index block `rows × cols`, as a new non-periodic window.
    pub fn subgrid(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Result<Self> {
        let (n1, n2) = self.grid.shape;
        if rows.end > n1 || cols.end > n2 || rows.len() < 2 || cols.len() < 2 {
            return Err(Error::OutOfWindow(format!(
                "index block {rows:?} x {cols:?} not inside {n1}x{n2}"
            )));
        }
        let grid = GridSpec::window(
            self.grid.point(rows.start, cols.start),
            self.grid.cell,
            (rows.len(), cols.len()),
        )?;
        let mut values = Vec::with_capacity(grid.len());
        for i in rows {
            let row = &self.values[i * n2..(i + 1) * n2];
            values.extend_from_slice(&row[cols.clone()]);
        }
        Ok(Self { grid, values })
    }

    /// Reinterpret the samples as one period of a periodic function.
    pub fn with_period(mut self, period: (f64, f64)) -> Result<Self> {
        self.grid.period = Some(period);
        self.grid.validate()?;
        Ok(self)
    }

    /// The samples as one period, with the period equal to the sampled extent `Nᵢ·Δxᵢ`.
    pub fn as_period_cell(self) -> Result<Self> {
        let p = (
            self.grid.shape.0 as f64 * self.grid.cell.0,
            self.grid.shape.1 as f64 * self.grid.cell.1,
        );
        self.with_period(p)
    }
}

/// Which transform a [`SpectralArray`] holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Convention {
    /// `f̂(εα)` of an `ε`-periodic function.
    PeriodicEps,
    /// Samples `F(f)(εα)` of the continuous transform on the lattice `εZ²`.
    Continuous,
}

/// Values indexed by `α ∈ [-K₁, K₁] × [-K₂, K₂]` at frequencies `(ε₁α₁, ε₂α₂)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralArray {
    pub window: (usize, usize),
    pub eps: (f64, f64),
    pub convention: Convention,
    coeffs: Vec<Complex64>,
}

impl SpectralArray {
    pub fn new(
        window: (usize, usize),
        eps: (f64, f64),
        convention: Convention,
        coeffs: Vec<Complex64>,
    ) -> Result<Self> {
        if !(eps.0 > 0.0 && eps.1 > 0.0) {
            return Err(Error::InvalidArgument(format!("eps must be positive, got {eps:?}")));
        }
        if coeffs.len() != (2 * window.0 + 1) * (2 * window.1 + 1) {
            return Err(Error::InvalidArgument("coefficient count does not match window".into()));
        }
        Ok(Self {
            window,
            eps,
            convention,
            coeffs,
        })
    }

    pub fn zeros(window: (usize, usize), eps: (f64, f64), convention: Convention) -> Result<Self> {
        let n = (2 * window.0 + 1) * (2 * window.1 + 1);
        Self::new(window, eps, convention, vec![Complex64::new(0.0, 0.0); n])
    }

    #[inline]
    fn offset(&self, a1: i64, a2: i64) -> Option<usize> {
        let (k1, k2) = (self.window.0 as i64, self.window.1 as i64);
        if a1.abs() > k1 || a2.abs() > k2 {
            return None;
        }
        Some(((a1 + k1) * (2 * k2 + 1) + (a2 + k2)) as usize)
    }

    pub fn get(&self, a1: i64, a2: i64) -> Option<Complex64> {
        self.offset(a1, a2).map(|o| self.coeffs[o])
    }

    /// Coefficient at `α`, zero outside the window.
    pub fn at(&self, a1: i64, a2: i64) -> Complex64 {
        self.get(a1, a2).unwrap_or_default()
    }

    pub fn set(&mut self, a1: i64, a2: i64, v: Complex64) -> Result<()> {
        let o = self
            .offset(a1, a2)
            .ok_or_else(|| Error::OutOfWindow(format!("index ({a1}, {a2}) outside window")))?;
        self.coeffs[o] = v;
        Ok(())
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Iterate `((α₁, α₂), value)` in row-major window order.
    pub fn iter(&self) -> impl Iterator<Item = ((i64, i64), Complex64)> + '_ {
        let (k1, k2) = (self.window.0 as i64, self.window.1 as i64);
        let w2 = 2 * k2 + 1;
        self.coeffs.iter().enumerate().map(move |(o, &v)| {
            let o = o as i64;
            ((o / w2 - k1, o % w2 - k2), v)
        })
    }

    /// `Σ |c_α|²` over the window.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `Σ_{α≠0} |c_α|²`.
    pub fn energy_without_zero(&self) -> f64 {
        self.energy() - self.at(0, 0).norm_sqr()
    }
}

/// All `N₁ × N₂` discrete coefficients of a periodic grid function.
///
/// Bin `b` on an axis of length `N` carries the signed frequency `b` for
/// `b < N/2` and `b − N` otherwise, so an even-length axis assigns its Nyquist
/// bin to `−N/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicSpectrum {
    pub shape: (usize, usize),
    pub eps: (f64, f64),
    pub origin: (f64, f64),
    coeffs: Vec<Complex64>,
}

#[inline]
pub fn signed_frequency(bin: usize, n: usize) -> i64 {
    if bin < n.div_ceil(2) {
        bin as i64
    } else {
        bin as i64 - n as i64
    }
}

#[inline]
fn bin_of(freq: i64, n: usize) -> usize {
    freq.rem_euclid(n as i64) as usize
}

impl PeriodicSpectrum {
    /// Coefficient at signed frequency `(α₁, α₂)`; zero if not representable.
    pub fn at(&self, a1: i64, a2: i64) -> Complex64 {
        let (n1, n2) = self.shape;
        let b1 = bin_of(a1, n1);
        let b2 = bin_of(a2, n2);
        if signed_frequency(b1, n1) != a1 || signed_frequency(b2, n2) != a2 {
            return Complex64::default();
        }
        self.coeffs[b1 * n2 + b2]
    }

    /// Iterate `((α₁, α₂), c)` over every bin.
    pub fn iter(&self) -> impl Iterator<Item = ((i64, i64), Complex64)> + '_ {
        let (n1, n2) = self.shape;
        self.coeffs.iter().enumerate().map(move |(o, &c)| {
            ((signed_frequency(o / n2, n1), signed_frequency(o % n2, n2)), c)
        })
    }

    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Restrict to a symmetric window (which must fit under Nyquist).
    pub fn window(&self, k: (usize, usize)) -> Result<SpectralArray> {
        let (n1, n2) = self.shape;
        let max = ((n1 - 1) / 2, (n2 - 1) / 2);
        if k.0 > max.0 || k.1 > max.1 {
            return Err(Error::NyquistExceeded {
                k1: k.0,
                k2: k.1,
                max1: max.0,
                max2: max.1,
            });
        }
        let mut out = SpectralArray::zeros(k, self.eps, Convention::PeriodicEps)?;
        let (k1, k2) = (k.0 as i64, k.1 as i64);
        for a1 in -k1..=k1 {
            for a2 in -k2..=k2 {
                out.set(a1, a2, self.at(a1, a2))?;
            }
        }
        Ok(out)
    }

    /// Multiply every coefficient by `g(α₁, α₂, c)`.
    pub fn map_with_frequency(&self, g: impl Fn(i64, i64, Complex64) -> Complex64) -> Self {
        let (n1, n2) = self.shape;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(o, &c)| g(signed_frequency(o / n2, n1), signed_frequency(o % n2, n2), c))
            .collect();
        Self {
            coeffs,
            ..self.clone()
        }
    }

    /// Evaluate `Σ_α c_α e^{ix·εα}` back on the grid it came from.
    pub fn synthesize(&self, grid: &GridSpec) -> Result<SampledFunction2D> {
        if grid.shape != self.shape || grid.eps().is_none() {
            return Err(Error::InvalidGrid("spectrum does not belong to this grid".into()));
        }
        let (n1, n2) = self.shape;
        let mut buf: Vec<Complex64> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(o, &c)| {
                let a1 = signed_frequency(o / n2, n1) as f64;
                let a2 = signed_frequency(o % n2, n2) as f64;
                c * Complex64::from_polar(1.0, self.eps.0 * a1 * grid.origin.0 + self.eps.1 * a2 * grid.origin.1)
            })
            .collect();
        fft2(&mut buf, n1, n2, true);
        SampledFunction2D::new(grid.clone(), buf)
    }
}

/// In-place 2-D FFT of a row-major `n1 × n2` buffer (unnormalised).
pub(crate) fn fft2(buf: &mut [Complex64], n1: usize, n2: usize, inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let (row, col) = if inverse {
        (planner.plan_fft_inverse(n2), planner.plan_fft_inverse(n1))
    } else {
        (planner.plan_fft_forward(n2), planner.plan_fft_forward(n1))
    };
    row.process(buf);
    let mut t = vec![Complex64::default(); n1 * n2];
    for i in 0..n1 {
        for j in 0..n2 {
            t[j * n1 + i] = buf[i * n2 + j];
        }
    }
    col.process(&mut t);
    for j in 0..n2 {
        for i in 0..n1 {
            buf[i * n2 + j] = t[j * n1 + i];
        }
    }
}

/// Normalised 1-D DFT `c_k = N^{-1} Σ_j v_j e^{-2πi jk/N}`, bins in FFT order.
pub fn dft_1d(values: &[Complex64]) -> Vec<Complex64> {
    let n = values.len();
    let mut buf = values.to_vec();
    FftPlanner::<f64>::new().plan_fft_forward(n).process(&mut buf);
    let inv = 1.0 / n as f64;
    buf.iter_mut().for_each(|c| *c *= inv);
    buf
}

/// Every discrete coefficient of a periodic function (trapezoid rule on the period cell).
pub fn periodic_spectrum(f: &SampledFunction2D) -> Result<PeriodicSpectrum> {
    let grid = f.grid();
    let eps = grid.eps().ok_or(Error::NotPeriodic)?;
    let (n1, n2) = grid.shape;
    let mut buf = f.values().to_vec();
    fft2(&mut buf, n1, n2, false);
    let inv = 1.0 / (n1 * n2) as f64;
    for (o, c) in buf.iter_mut().enumerate() {
        let a1 = signed_frequency(o / n2, n1) as f64;
        let a2 = signed_frequency(o % n2, n2) as f64;
        // shift from the grid's own origin to x = 0
        let phase = -(eps.0 * a1 * grid.origin.0 + eps.1 * a2 * grid.origin.1);
        *c *= Complex64::from_polar(inv, phase);
    }
    Ok(PeriodicSpectrum {
        shape: (n1, n2),
        eps,
        origin: grid.origin,
        coeffs: buf,
    })
}

/// `f̂(εα)` for `|αᵢ| ≤ Kᵢ`, with `ε = 2π/period`.
pub fn fourier_coeffs(f: &SampledFunction2D, window: (usize, usize)) -> Result<SpectralArray> {
    if !f.is_periodic() {
        return Err(Error::NotPeriodic);
    }
    let (n1, n2) = f.shape();
    let max = ((n1 - 1) / 2, (n2 - 1) / 2);
    if window.0 > max.0 || window.1 > max.1 {
        return Err(Error::NyquistExceeded {
            k1: window.0,
            k2: window.1,
            max1: max.0,
            max2: max.1,
        });
    }
    periodic_spectrum(f)?.window(window)
}

/// `Σ_α c_α e^{ix·εα}` evaluated on `grid`, which must be periodic with `Pᵢ εᵢ = 2π`.
pub fn inverse_fourier(c: &SpectralArray, grid: &GridSpec) -> Result<SampledFunction2D> {
    if c.convention != Convention::PeriodicEps {
        return Err(Error::InvalidArgument(
            "inverse_fourier expects periodic coefficients".into(),
        ));
    }
    grid.validate()?;
    let (p1, p2) = grid.period.ok_or(Error::NotPeriodic)?;
    let (e1, e2) = c.eps;
    if (p1 * e1 - TWO_PI).abs() > PERIOD_TOL * TWO_PI || (p2 * e2 - TWO_PI).abs() > PERIOD_TOL * TWO_PI {
        return Err(Error::PeriodMismatch { p1, p2, e1, e2 });
    }
    let (k1, k2) = (c.window.0 as i64, c.window.1 as i64);
    let (n1, n2) = grid.shape;
    let w1 = (2 * k1 + 1) as usize;
    let w2 = (2 * k2 + 1) as usize;
    // partial[a1][j] = Σ_{a2} c[a1][a2] e^{i ε₂ a2 x₂_j}
    let e2tab: Vec<Complex64> = (0..n2)
        .flat_map(|j| {
            let x2 = grid.x2(j);
            (-k2..=k2).map(move |a2| Complex64::from_polar(1.0, e2 * a2 as f64 * x2))
        })
        .collect();
    let mut partial = vec![Complex64::default(); w1 * n2];
    for a in 0..w1 {
        let row = &c.coeffs()[a * w2..(a + 1) * w2];
        for j in 0..n2 {
            let phases = &e2tab[j * w2..(j + 1) * w2];
            partial[a * n2 + j] = row.iter().zip(phases).map(|(x, p)| x * p).sum();
        }
    }
    let mut values = vec![Complex64::default(); n1 * n2];
    for i in 0..n1 {
        let x1 = grid.x1(i);
        let out = &mut values[i * n2..(i + 1) * n2];
        for (a, a1) in (-k1..=k1).enumerate() {
            let ph = Complex64::from_polar(1.0, e1 * a1 as f64 * x1);
            let src = &partial[a * n2..(a + 1) * n2];
            for (o, s) in out.iter_mut().zip(src) {
                *o += ph * s;
            }
        }
    }
    SampledFunction2D::new(grid.clone(), values)
}

/// Quadrature weights for integrals over a sample window.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowRule {
    /// Trapezoid rule on the closed window (half weights on edge samples).
    Trapezoid,
    /// Rectangle rule on the half-open window; pairs with the discrete
    /// Plancherel identity on the dual lattice.
    Rectangle,
}

fn axis_weights(n: usize, h: f64, rule: WindowRule) -> Vec<f64> {
    (0..n)
        .map(|i| match rule {
            WindowRule::Trapezoid if i == 0 || i == n - 1 => 0.5 * h,
            _ => h,
        })
        .collect()
}

/// Samples of `F(f)(ξ)` on the lattice `ξ = (ε₁α₁, ε₂α₂)`, `|αᵢ| ≤ Kᵢ`,
/// with `f` treated as zero outside its sample window.
pub fn continuous_transform(
    f: &SampledFunction2D,
    eps: (f64, f64),
    window: (usize, usize),
    rule: WindowRule,
) -> Result<SpectralArray> {
    let xi1: Vec<f64> = (-(window.0 as i64)..=window.0 as i64).map(|a| eps.0 * a as f64).collect();
    let xi2: Vec<f64> = (-(window.1 as i64)..=window.1 as i64).map(|a| eps.1 * a as f64).collect();
    let coeffs = transform_on_axes(f, &xi1, &xi2, rule);
    SpectralArray::new(window, eps, Convention::Continuous, coeffs)
}

/// `F(f)(ξ)` at a single frequency.
pub fn continuous_transform_at(f: &SampledFunction2D, xi: (f64, f64), rule: WindowRule) -> Complex64 {
    transform_on_axes(f, &[xi.0], &[xi.1], rule)[0]
}

/// `F(f)` on the tensor grid `xi1 × xi2`, row-major.
pub fn transform_on_axes(f: &SampledFunction2D, xi1: &[f64], xi2: &[f64], rule: WindowRule) -> Vec<Complex64> {
    let g = f.grid();
    let (n1, n2) = g.shape;
    let w1 = axis_weights(n1, g.cell.0, rule);
    let w2 = axis_weights(n2, g.cell.1, rule);
    // t[i][b] = Σ_j w2_j f_ij e^{-i x2_j ξ2_b}
    let e2: Vec<Complex64> = (0..n2)
        .flat_map(|j| {
            let x2 = g.x2(j);
            let w = w2[j];
            xi2.iter().map(move |&xi| Complex64::from_polar(w, -x2 * xi))
        })
        .collect();
    let m2 = xi2.len();
    let mut t = vec![Complex64::default(); n1 * m2];
    for i in 0..n1 {
        let row = &f.values()[i * n2..(i + 1) * n2];
        let out = &mut t[i * m2..(i + 1) * m2];
        for (j, v) in row.iter().enumerate() {
            if *v == Complex64::default() {
                continue;
            }
            for (o, e) in out.iter_mut().zip(&e2[j * m2..(j + 1) * m2]) {
                *o += v * e;
            }
        }
    }
    let scale = 1.0 / (TWO_PI * TWO_PI);
    let mut out = vec![Complex64::default(); xi1.len() * m2];
    for (a, &x1i) in xi1.iter().enumerate() {
        let dst = &mut out[a * m2..(a + 1) * m2];
        for i in 0..n1 {
            let e = Complex64::from_polar(w1[i] * scale, -g.x1(i) * x1i);
            for (o, s) in dst.iter_mut().zip(&t[i * m2..(i + 1) * m2]) {
                *o += e * s;
            }
        }
    }
    out
}

/// Both sides of `f̂(εα) = (f(·/ε))^(α)` on a coefficient window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RescaleReport {
    pub eps: (f64, f64),
    pub window: (usize, usize),
    pub max_discrepancy: f64,
    pub energy: f64,
}

/// Compare the `ε`-periodic coefficients of `f` with the torus coefficients of
/// `f(·/ε)`; the two sides use different quadrature code paths.
pub fn rescale_check(f: &SampledFunction2D, window: (usize, usize)) -> Result<RescaleReport> {
    let eps = f.grid().eps().ok_or(Error::NotPeriodic)?;
    let lhs = fourier_coeffs(f, window)?;

    // f(·/ε) lives on the 2π-torus at the points εx.
    let g = f.grid();
    let rescaled = GridSpec {
        origin: (g.origin.0 * eps.0, g.origin.1 * eps.1),
        cell: (g.cell.0 * eps.0, g.cell.1 * eps.1),
        shape: g.shape,
        period: Some((TWO_PI, TWO_PI)),
    };
    let (n1, n2) = g.shape;
    let (k1, k2) = (window.0 as i64, window.1 as i64);
    let mut max_discrepancy: f64 = 0.0;
    for a1 in -k1..=k1 {
        for a2 in -k2..=k2 {
            let mut acc = Complex64::default();
            for i in 0..n1 {
                let e1 = Complex64::from_polar(1.0, -(a1 as f64) * rescaled.x1(i));
                let mut row = Complex64::default();
                for j in 0..n2 {
                    row += f.get(i, j) * Complex64::from_polar(1.0, -(a2 as f64) * rescaled.x2(j));
                }
                acc += e1 * row;
            }
            acc /= (n1 * n2) as f64;
            max_discrepancy = max_discrepancy.max((acc - lhs.at(a1, a2)).norm());
        }
    }
    Ok(RescaleReport {
        eps,
        window,
        max_discrepancy,
        energy: lhs.energy(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_character_has_a_single_coefficient() {
        let eps = (1.0, 1.0);
        let grid = GridSpec::eps_torus(eps, 64, 64).unwrap();
        let f = SampledFunction2D::from_fn(grid, |x, y| Complex64::from_polar(1.0, 3.0 * x + 2.0 * y)).unwrap();
        let s = fourier_coeffs(&f, (10, 10)).unwrap();
        for ((a1, a2), v) in s.iter() {
            let expect = if (a1, a2) == (3, 2) { 1.0 } else { 0.0 };
            assert!((v - c(expect, 0.0)).norm() < 1e-12, "({a1},{a2}) {v}");
        }
    }

    #[test]
    fn constant_function_has_only_the_zero_coefficient() {
        let grid = GridSpec::torus(16, 8).unwrap();
        let f = SampledFunction2D::from_fn(grid, |_, _| c(2.5, -1.0)).unwrap();
        let s = fourier_coeffs(&f, (7, 3)).unwrap();
        assert!((s.at(0, 0) - c(2.5, -1.0)).norm() < 1e-14);
        assert!(s.energy_without_zero() < 1e-28);
    }

    #[test]
    fn nyquist_and_periodicity_are_enforced() {
        let grid = GridSpec::torus(16, 16).unwrap();
        let f = SampledFunction2D::from_fn(grid, |_, _| c(1.0, 0.0)).unwrap();
        assert!(matches!(fourier_coeffs(&f, (8, 2)), Err(Error::NyquistExceeded { .. })));
        assert!(fourier_coeffs(&f, (7, 7)).is_ok());
        let w = GridSpec::window((0.0, 0.0), (0.1, 0.1), (16, 16)).unwrap();
        let g = SampledFunction2D::from_fn(w, |_, _| c(1.0, 0.0)).unwrap();
        assert!(matches!(fourier_coeffs(&g, (2, 2)), Err(Error::NotPeriodic)));
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::window((0.0, 0.0), (0.1, 0.1), (1, 4)).is_err());
        assert!(GridSpec::window((0.0, 0.0), (0.0, 0.1), (4, 4)).is_err());
        let bad = GridSpec {
            origin: (0.0, 0.0),
            cell: (0.1, 0.1),
            shape: (4, 4),
            period: Some((1.0, 0.4)),
        };
        assert!(bad.validate().is_err());
        let json = serde_json::to_string(&GridSpec::torus(8, 8).unwrap()).unwrap();
        let back: GridSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, GridSpec::torus(8, 8).unwrap());
    }

    #[test]
    fn inverse_of_delta_is_constant_one() {
        let mut s = SpectralArray::zeros((3, 3), (1.0, 1.0), Convention::PeriodicEps).unwrap();
        s.set(0, 0, c(1.0, 0.0)).unwrap();
        let f = inverse_fourier(&s, &GridSpec::torus(12, 10).unwrap()).unwrap();
        assert!(f.values().iter().all(|v| (v - c(1.0, 0.0)).norm() < 1e-15));
    }

    #[test]
    fn inverse_rejects_inconsistent_period() {
        let s = SpectralArray::zeros((1, 1), (2.0, 1.0), Convention::PeriodicEps).unwrap();
        let err = inverse_fourier(&s, &GridSpec::torus(8, 8).unwrap()).unwrap_err();
        assert!(matches!(err, Error::PeriodMismatch { .. }));
    }

    #[test]
    fn fejer_slice_matches_closed_form() {
        // coefficients (1 - |j|/5) on one axis, δ on the other
        let n = 4i64;
        let mut s = SpectralArray::zeros((6, 0), (1.0, 1.0), Convention::PeriodicEps).unwrap();
        for j in -n..=n {
            s.set(j, 0, c(1.0 - j.abs() as f64 / (n + 1) as f64, 0.0)).unwrap();
        }
        let f = inverse_fourier(&s, &GridSpec::torus(64, 2).unwrap()).unwrap();
        for i in 1..64 {
            let x = f.grid().x1(i);
            let closed = ((2.5 * x).sin() / (0.5 * x).sin()).powi(2) / 5.0;
            assert!((f.get(i, 0) - c(closed, 0.0)).norm() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn box_indicator_transform() {
        // the window is exactly [-1, 1]², so the trapezoid rule integrates the box
        let n = 2049;
        let h = 2.0 / (n - 1) as f64;
        let grid = GridSpec::window((-1.0, -1.0), (h, h), (n, n)).unwrap();
        let f = SampledFunction2D::from_fn(grid, |_, _| c(1.0, 0.0)).unwrap();
        let xi1: Vec<f64> = vec![-10.0, -3.3, 0.0, 0.7, 4.0, 10.0];
        let out = transform_on_axes(&f, &xi1, &xi1, WindowRule::Trapezoid);
        let sinc2 = |x: f64| if x == 0.0 { 2.0 } else { 2.0 * x.sin() / x };
        for (a, &x1) in xi1.iter().enumerate() {
            for (b, &x2) in xi1.iter().enumerate() {
                let exact = sinc2(x1) * sinc2(x2) / (TWO_PI * TWO_PI);
                assert!((out[a * xi1.len() + b] - c(exact, 0.0)).norm() < 1e-6);
            }
        }
    }

    #[test]
    fn even_real_function_has_real_even_transform() {
        let n = 65;
        let h = 4.0 / (n - 1) as f64;
        let grid = GridSpec::window((-2.0, -2.0), (h, h), (n, n)).unwrap();
        let f = SampledFunction2D::from_fn(grid, |x, y| c((-(x * x) - 2.0 * y * y).exp(), 0.0)).unwrap();
        let s = continuous_transform(&f, (0.5, 0.25), (6, 6), WindowRule::Trapezoid).unwrap();
        for ((a1, a2), v) in s.iter() {
            assert!(v.im.abs() < 1e-15);
            assert!((v - s.at(-a1, -a2)).norm() < 1e-15);
        }
    }

    #[test]
    fn rescale_identity_degenerate_and_shifted_cases() {
        let grid = GridSpec::torus(32, 32).unwrap();
        let f = SampledFunction2D::from_fn(grid, |x, y| c((2.0 * x).cos(), (x - y).sin())).unwrap();
        let r = rescale_check(&f, (5, 5)).unwrap();
        assert!(r.max_discrepancy < 1e-12);

        let grid = GridSpec::eps_torus((0.5, 1.0), 32, 32).unwrap();
        let f = SampledFunction2D::from_fn(grid, |x, _| Complex64::from_polar(1.0, 0.5 * x)).unwrap();
        let r = rescale_check(&f, (4, 4)).unwrap();
        assert!(r.max_discrepancy < 1e-12);
        let s = fourier_coeffs(&f, (4, 4)).unwrap();
        assert!((s.at(1, 0) - c(1.0, 0.0)).norm() < 1e-12);
        assert!(s.energy_without_zero() - 1.0 < 1e-12);
    }

    #[test]
    fn spectrum_synthesis_round_trips() {
        let grid = GridSpec::periodic((0.3, -1.0), (3.0, 5.0), (16, 32)).unwrap();
        let f = SampledFunction2D::from_fn(grid.clone(), |x, y| c(x.sin() * y, (x * y).cos())).unwrap();
        let back = periodic_spectrum(&f).unwrap().synthesize(&grid).unwrap();
        for (a, b) in f.values().iter().zip(back.values()) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
