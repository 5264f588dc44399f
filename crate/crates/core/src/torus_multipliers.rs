//! Multipliers from `H¹(T×T)` into `ℓ²`.
//!
//! A sequence `λ(m, n)` is bounded into `ℓ²` exactly when its energy over the
//! dyadic blocks `D_m × D_n`, `D_k = {2^k, …, 2^{k+1} − 1}`, is uniformly
//! bounded. This module computes those block energies, the Fejér witnesses
//! that force the bound, and the block-by-block majorant that gives the
//! converse on concrete inputs.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::spectral::{dft_1d, periodic_spectrum, signed_frequency, GridSpec, PeriodicSpectrum, SampledFunction2D};
use crate::{Error, Result};

/// Forbidden coefficients above this modulus reject `H¹` membership.
pub const H1_TOLERANCE: f64 = 1e-9;

/// Multiplier symbol on the window `[0, rows) × [0, cols)`, row-major.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MultiplierGrid {
    pub rows: usize,
    pub cols: usize,
    lam: Vec<Complex64>,
}

impl MultiplierGrid {
    pub fn new(rows: usize, cols: usize, lam: Vec<Complex64>) -> Result<Self> {
        if lam.len() != rows * cols {
            return Err(Error::InvalidArgument(format!(
                "multiplier window {rows}x{cols} needs {} entries, got {}",
                rows * cols,
                lam.len()
            )));
        }
        if lam.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidArgument("multiplier entries must be finite".into()));
        }
        Ok(Self { rows, cols, lam })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let lam = (0..rows).flat_map(|m| (0..cols).map(move |n| (m, n))).map(|(m, n)| f(m, n)).collect();
        Self { rows, cols, lam }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| Complex64::default())
    }

    /// Value at `(m, n)`, zero outside the window.
    #[inline]
    pub fn get(&self, m: usize, n: usize) -> Complex64 {
        if m < self.rows && n < self.cols {
            self.lam[m * self.cols + n]
        } else {
            Complex64::default()
        }
    }

    pub fn set(&mut self, m: usize, n: usize, v: Complex64) {
        self.lam[m * self.cols + n] = v;
    }

    pub fn values(&self) -> &[Complex64] {
        &self.lam
    }

    /// Indicator of a lacunary support on a window.
    pub fn indicator(rows: usize, cols: usize, support: &LacunarySupport) -> Self {
        let mut g = Self::zeros(rows, cols);
        for &(m, n) in &support.points {
            if (m as usize) < rows && (n as usize) < cols {
                g.set(m as usize, n as usize, Complex64::new(1.0, 0.0));
            }
        }
        g
    }
}

/// The block `D_m × D_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DyadicBlock {
    pub m: u32,
    pub n: u32,
}

impl DyadicBlock {
    pub fn new(m: u32, n: u32) -> Self {
        Self { m, n }
    }

    pub fn rows(&self) -> std::ops::Range<usize> {
        (1usize << self.m)..(1usize << (self.m + 1))
    }

    pub fn cols(&self) -> std::ops::Range<usize> {
        (1usize << self.n)..(1usize << (self.n + 1))
    }

    pub fn fits(&self, rows: usize, cols: usize) -> bool {
        self.rows().end <= rows && self.cols().end <= cols
    }

    pub fn meets(&self, rows: usize, cols: usize) -> bool {
        self.rows().start < rows && self.cols().start < cols
    }
}

/// Dyadic class of a nonnegative index: `0` is its own class, `k ≥ 1` lies in `D_{⌊log₂ k⌋}`.
fn dyadic_class(k: u64) -> Option<u32> {
    (k > 0).then(|| 63 - k.leading_zeros())
}

/// Points with at most one element in each dyadic rectangle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(u64, u64)>", into = "Vec<(u64, u64)>")]
pub struct LacunarySupport {
    points: Vec<(u64, u64)>,
}

impl LacunarySupport {
    pub fn new(mut points: Vec<(u64, u64)>) -> Result<Self> {
        points.sort_unstable();
        points.dedup();
        let mut seen = BTreeMap::new();
        for &(m, n) in &points {
            let key = (dyadic_class(m), dyadic_class(n));
            if let Some(prev) = seen.insert(key, (m, n)) {
                return Err(Error::InvalidArgument(format!(
                    "points {prev:?} and {:?} share a dyadic rectangle",
                    (m, n)
                )));
            }
        }
        Ok(Self { points })
    }

    /// `{(2^j, 2^j) : 0 ≤ j ≤ max_j}`.
    pub fn diagonal(max_j: u32) -> Self {
        Self {
            points: (0..=max_j).map(|j| (1u64 << j, 1u64 << j)).collect(),
        }
    }

    pub fn points(&self) -> &[(u64, u64)] {
        &self.points
    }
}

impl TryFrom<Vec<(u64, u64)>> for LacunarySupport {
    type Error = Error;
    fn try_from(v: Vec<(u64, u64)>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<LacunarySupport> for Vec<(u64, u64)> {
    fn from(s: LacunarySupport) -> Self {
        s.points
    }
}

fn torus_axis(grid: &GridSpec, axis: usize) -> Result<()> {
    let p = grid.period.ok_or(Error::NotPeriodic)?;
    let p = if axis == 0 { p.0 } else { p.1 };
    if (p - 2.0 * PI).abs() > 1e-9 {
        return Err(Error::InvalidGrid(format!("torus grids need period 2π, got {p}")));
    }
    Ok(())
}

/// Fejér kernel `F_n` synthesised from its coefficients `1 − |j|/(n+1)`.
pub fn fejer_1d(n: usize, points: &[f64]) -> Vec<f64> {
    let inv = 1.0 / (n as f64 + 1.0);
    points
        .iter()
        .map(|&x| {
            let mut s = 1.0;
            for j in 1..=n {
                s += 2.0 * (1.0 - j as f64 * inv) * (j as f64 * x).cos();
            }
            s
        })
        .collect()
}

/// `F_{k,l}(x, y) = F_k(x) F_l(y)` on a torus grid.
pub fn fejer_product(k: usize, l: usize, grid: &GridSpec) -> Result<SampledFunction2D> {
    torus_axis(grid, 0)?;
    torus_axis(grid, 1)?;
    let (n1, n2) = grid.shape;
    if 2 * k + 1 > n1 || 2 * l + 1 > n2 {
        return Err(Error::UnderResolved(format!(
            "Fejér kernel F_({k},{l}) on a {n1}x{n2} grid"
        )));
    }
    let xs: Vec<f64> = (0..n1).map(|i| grid.x1(i)).collect();
    let ys: Vec<f64> = (0..n2).map(|j| grid.x2(j)).collect();
    let a: Vec<Complex64> = fejer_1d(k, &xs).into_iter().map(|v| Complex64::new(v, 0.0)).collect();
    let b: Vec<Complex64> = fejer_1d(l, &ys).into_iter().map(|v| Complex64::new(v, 0.0)).collect();
    SampledFunction2D::separable(grid.clone(), &a, &b)
}

/// How the forbidden index set of `H¹(T×T)` is read.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForbiddenSet {
    /// `f̂(m, n) = 0` whenever `m < 0` or `n < 0` (the bidisc space).
    #[default]
    Either,
    /// `f̂(m, n) = 0` only when both `m < 0` and `n < 0`.
    Both,
}

impl ForbiddenSet {
    fn contains(self, m: i64, n: i64) -> bool {
        match self {
            ForbiddenSet::Either => m < 0 || n < 0,
            ForbiddenSet::Both => m < 0 && n < 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub max_forbidden: f64,
    pub worst_index: Option<(i64, i64)>,
    pub l1_norm: f64,
    pub pass: bool,
    pub tolerance: f64,
    pub forbidden_set: ForbiddenSet,
}

fn membership_from_spectrum(spec: &PeriodicSpectrum, l1_norm: f64, set: ForbiddenSet) -> MembershipReport {
    let mut max_forbidden = 0.0;
    let mut worst_index = None;
    for ((m, n), c) in spec.iter() {
        if set.contains(m, n) && c.norm() > max_forbidden {
            max_forbidden = c.norm();
            worst_index = Some((m, n));
        }
    }
    MembershipReport {
        max_forbidden,
        worst_index,
        l1_norm,
        pass: max_forbidden < H1_TOLERANCE,
        tolerance: H1_TOLERANCE,
        forbidden_set: set,
    }
}

/// Check the vanishing of forbidden coefficients and report `‖f‖_{L¹}`.
pub fn h1_membership(f: &SampledFunction2D, set: ForbiddenSet) -> Result<MembershipReport> {
    let spec = periodic_spectrum(f)?;
    Ok(membership_from_spectrum(&spec, f.l1_mean(), set))
}

/// `Σ_{α∈D_m} Σ_{β∈D_n} |λ(α, β)|²`.
pub fn block_energy(lam: &MultiplierGrid, b: DyadicBlock) -> Result<f64> {
    if !b.fits(lam.rows, lam.cols) {
        return Err(Error::OutOfWindow(format!(
            "block {b:?} does not fit the {}x{} multiplier window",
            lam.rows, lam.cols
        )));
    }
    Ok(partial_block_energy(lam, b))
}

/// Block energy of the zero extension of `λ` (the block may overhang the window).
fn partial_block_energy(lam: &MultiplierGrid, b: DyadicBlock) -> f64 {
    let rows = b.rows().start..b.rows().end.min(lam.rows);
    let cols = b.cols().start..b.cols().end.min(lam.cols);
    rows.map(|m| cols.clone().map(|n| lam.get(m, n).norm_sqr()).sum::<f64>())
        .sum()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub constant: f64,
    pub attaining_block: Option<DyadicBlock>,
    pub blocks: Vec<(DyadicBlock, f64)>,
    /// Blocks that meet the window without fitting it; excluded from `constant`.
    pub partial_blocks: Vec<(DyadicBlock, f64)>,
}

/// Largest block energy over complete blocks inside the window.
pub fn condition_constant(lam: &MultiplierGrid) -> ConditionReport {
    let mut blocks = Vec::new();
    let mut partial_blocks = Vec::new();
    let top = |len: usize| if len < 2 { 0 } else { 64 - (len as u64 - 1).leading_zeros() };
    for m in 0..top(lam.rows) {
        for n in 0..top(lam.cols) {
            let b = DyadicBlock::new(m, n);
            if !b.meets(lam.rows, lam.cols) {
                continue;
            }
            let e = partial_block_energy(lam, b);
            if b.fits(lam.rows, lam.cols) {
                blocks.push((b, e));
            } else {
                partial_blocks.push((b, e));
            }
        }
    }
    let mut constant = 0.0;
    let mut attaining_block = None;
    for &(b, e) in &blocks {
        if attaining_block.is_none() || e > constant {
            constant = e;
            attaining_block = Some(b);
        }
    }
    ConditionReport {
        constant,
        attaining_block,
        blocks,
        partial_blocks,
    }
}

/// `(Σ_{(m,n)∈s} |f̂(m,n)|²)^{1/2} / ‖f‖_{L¹}` for `f ∈ H¹(T×T)`.
///
/// Support points beyond the grid's resolvable band contribute zero.
pub fn paley_ratio(f: &SampledFunction2D, s: &LacunarySupport) -> Result<f64> {
    let spec = periodic_spectrum(f)?;
    let l1 = f.l1_mean();
    let report = membership_from_spectrum(&spec, l1, ForbiddenSet::Either);
    ensure_member(&report)?;
    if l1 == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let energy: f64 = s
        .points()
        .iter()
        .map(|&(m, n)| spec.at(m as i64, n as i64).norm_sqr())
        .sum();
    Ok(energy.sqrt() / l1)
}

fn ensure_member(report: &MembershipReport) -> Result<()> {
    if report.pass {
        return Ok(());
    }
    let (m, n) = report.worst_index.unwrap_or((0, 0));
    Err(Error::NotInHardySpace {
        m,
        n,
        value: report.max_forbidden,
    })
}

/// The modulated Fejér function `g = e^{i2^{m+1}x} e^{i2^{n+1}y} F_{2^{m+1}, 2^{n+1}}`
/// together with `‖(λ ĝ)‖²_{ℓ²}`.
///
/// `g` is separable, so it is kept as two axis factors; [`NecessityWitness::sample`]
/// materialises it on the full grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NecessityWitness {
    pub block: DyadicBlock,
    pub grid_n: usize,
    /// `‖(λ(α,β) ĝ(α,β))‖²_{ℓ²}`, a lower bound for `‖M‖²` since `‖g‖_{L¹} = 1`.
    pub value: f64,
    pub block_energy: f64,
    /// `min_{D_m × D_n} |ĝ|²`, strictly above 1/16.
    pub min_block_coefficient_sq: f64,
    /// `block_energy · min_block_coefficient_sq`, the bound the witness guarantees.
    pub guaranteed_bound: f64,
    /// Whether `value ≥ block_energy / 4` on this input.
    pub quarter_bound_holds: bool,
    pub l1_norm: f64,
    #[serde(skip)]
    factor_x: Vec<Complex64>,
    #[serde(skip)]
    factor_y: Vec<Complex64>,
}

impl NecessityWitness {
    pub fn sample(&self) -> Result<SampledFunction2D> {
        SampledFunction2D::separable(GridSpec::torus(self.grid_n, self.grid_n)?, &self.factor_x, &self.factor_y)
    }
}

fn modulated_fejer(order: usize, n: usize) -> (Vec<Complex64>, Vec<Complex64>) {
    let h = 2.0 * PI / n as f64;
    let xs: Vec<f64> = (0..n).map(|i| i as f64 * h).collect();
    let fej = fejer_1d(order, &xs);
    let samples: Vec<Complex64> = xs
        .iter()
        .zip(fej)
        .map(|(&x, v)| Complex64::from_polar(v, order as f64 * x))
        .collect();
    let coeffs = dft_1d(&samples);
    (samples, coeffs)
}

/// Smallest power-of-two torus grid resolving the witness of block `b`.
pub fn witness_grid_size(b: DyadicBlock) -> usize {
    1usize << (b.m.max(b.n) + 4)
}

pub fn necessity_witness(lam: &MultiplierGrid, b: DyadicBlock, grid_n: usize) -> Result<NecessityWitness> {
    let top = 1usize << (b.m.max(b.n) + 2);
    if 2 * top + 1 > grid_n {
        return Err(Error::UnderResolved(format!(
            "witness frequencies up to {top} need more than {grid_n} points per axis"
        )));
    }
    let block_energy = block_energy(lam, b)?;
    let (fx, cx) = modulated_fejer(1 << (b.m + 1), grid_n);
    let (fy, cy) = modulated_fejer(1 << (b.n + 1), grid_n);
    let coeff = |c: &[Complex64], k: usize| -> Complex64 {
        if signed_frequency(k, grid_n) == k as i64 {
            c[k]
        } else {
            Complex64::default()
        }
    };
    let ax: Vec<f64> = (0..lam.rows).map(|k| coeff(&cx, k).norm_sqr()).collect();
    let ay: Vec<f64> = (0..lam.cols).map(|k| coeff(&cy, k).norm_sqr()).collect();
    let mut value = 0.0;
    for (m, &wx) in ax.iter().enumerate() {
        if wx == 0.0 {
            continue;
        }
        value += wx * (0..lam.cols).map(|n| lam.get(m, n).norm_sqr() * ay[n]).sum::<f64>();
    }
    let min_x = b.rows().map(|k| ax[k]).fold(f64::INFINITY, f64::min);
    let min_y = b.cols().map(|k| ay[k]).fold(f64::INFINITY, f64::min);
    let min_block_coefficient_sq = min_x * min_y;
    let guaranteed_bound = block_energy * min_block_coefficient_sq;
    if value < guaranteed_bound * (1.0 - 1e-12) {
        return Err(Error::Invariant(format!(
            "witness value {value} below block bound {guaranteed_bound} for {b:?}"
        )));
    }
    let l1 = |v: &[Complex64]| v.iter().map(|c| c.norm()).sum::<f64>() / v.len() as f64;
    Ok(NecessityWitness {
        block: b,
        grid_n,
        value,
        block_energy,
        min_block_coefficient_sq,
        guaranteed_bound,
        quarter_bound_holds: value >= 0.25 * block_energy * (1.0 - 1e-12),
        l1_norm: l1(&fx) * l1(&fy),
        factor_x: fx,
        factor_y: fy,
    })
}

/// `Λf = (λ(m,n) f̂(m,n))` and the block majorant bounding its norm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplierApplication {
    #[serde(skip)]
    pub sequence: MultiplierGrid,
    /// `ℓ²` norm of the whole sequence on the window.
    pub l2_norm: f64,
    /// `ℓ²` norm over indices `m, n ≥ 1`, the part covered by dyadic blocks.
    pub block_l2_norm: f64,
    /// Largest block energy of the zero-extended `λ` over every block meeting the window.
    pub block_constant: f64,
    /// `Σ_{k,l} sup_{D_k×D_l} |f̂|²`.
    pub coefficient_sup_sum: f64,
    /// `block_constant^{1/2} · coefficient_sup_sum^{1/2}`.
    pub majorant: f64,
    pub majorant_holds: bool,
}

pub fn apply_multiplier(lam: &MultiplierGrid, f: &SampledFunction2D) -> Result<MultiplierApplication> {
    let spec = periodic_spectrum(f)?;
    ensure_member(&membership_from_spectrum(&spec, f.l1_mean(), ForbiddenSet::Either))?;
    let coeff = |m: usize, n: usize| spec.at(m as i64, n as i64);
    let sequence = MultiplierGrid::from_fn(lam.rows, lam.cols, |m, n| lam.get(m, n) * coeff(m, n));
    let l2_norm = sequence.values().iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let mut block_sq = 0.0;
    for m in 1..lam.rows {
        for n in 1..lam.cols {
            block_sq += sequence.get(m, n).norm_sqr();
        }
    }
    let top = |len: usize| if len < 2 { 0 } else { 64 - (len as u64 - 1).leading_zeros() };
    let mut block_constant: f64 = 0.0;
    let mut coefficient_sup_sum = 0.0;
    for k in 0..top(lam.rows) {
        for l in 0..top(lam.cols) {
            let b = DyadicBlock::new(k, l);
            if !b.meets(lam.rows, lam.cols) {
                continue;
            }
            block_constant = block_constant.max(partial_block_energy(lam, b));
            let mut sup: f64 = 0.0;
            for m in b.rows().start..b.rows().end.min(lam.rows) {
                for n in b.cols().start..b.cols().end.min(lam.cols) {
                    sup = sup.max(coeff(m, n).norm_sqr());
                }
            }
            coefficient_sup_sum += sup;
        }
    }
    let majorant = (block_constant * coefficient_sup_sum).sqrt();
    let block_l2_norm = block_sq.sqrt();
    Ok(MultiplierApplication {
        sequence,
        l2_norm,
        block_l2_norm,
        block_constant,
        coefficient_sup_sum,
        majorant,
        majorant_holds: block_l2_norm <= majorant * (1.0 + 1e-12) + 1e-300,
    })
}

/// Evaluate `paley_ratio` for many functions in parallel, preserving order.
pub fn paley_ratios(fs: &[SampledFunction2D], s: &LacunarySupport) -> Vec<Result<f64>> {
    fs.par_iter().map(|f| paley_ratio(f, s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::fourier_coeffs;

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn fejer_zero_is_constant_one() {
        let f = fejer_product(0, 0, &GridSpec::torus(8, 8).unwrap()).unwrap();
        assert!(f.values().iter().all(|v| (v - one()).norm() < 1e-15));
    }

    #[test]
    fn fejer_value_at_origin() {
        let v = fejer_1d(4, &[0.0]);
        assert!((v[0] - 5.0).abs() < 1e-14);
    }

    #[test]
    fn fejer_coefficients_are_triangular() {
        let grid = GridSpec::torus(64, 64).unwrap();
        let f = fejer_product(4, 4, &grid).unwrap();
        let s = fourier_coeffs(&f, (8, 8)).unwrap();
        for ((j, k), v) in s.iter() {
            let t = |j: i64| (1.0 - j.abs() as f64 / 5.0).max(0.0);
            assert!((v - Complex64::new(t(j) * t(k), 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn fejer_is_nonnegative_with_unit_mass() {
        let grid = GridSpec::torus(128, 128).unwrap();
        for (k, l) in [(1, 4), (16, 16), (4, 1)] {
            let f = fejer_product(k, l, &grid).unwrap();
            assert!(f.values().iter().all(|v| v.re >= -1e-12 && v.im == 0.0));
            assert!((f.l1_mean() - 1.0).abs() < 1e-12);
        }
        assert!(fejer_product(64, 1, &grid).is_err());
    }

    #[test]
    fn membership_examples() {
        let grid = GridSpec::torus(32, 32).unwrap();
        let f = SampledFunction2D::from_fn(grid.clone(), |x, y| Complex64::from_polar(1.0, 3.0 * x + 2.0 * y)).unwrap();
        let r = h1_membership(&f, ForbiddenSet::Either).unwrap();
        assert!(r.pass);
        assert!((r.l1_norm - 1.0).abs() < 1e-12);

        let g = SampledFunction2D::from_fn(grid.clone(), |x, y| Complex64::from_polar(1.0, -(x + y))).unwrap();
        let r = h1_membership(&g, ForbiddenSet::Either).unwrap();
        assert!(!r.pass);
        assert_eq!(r.worst_index, Some((-1, -1)));

        // mixed quadrant: rejected by the bidisc reading only
        let h = SampledFunction2D::from_fn(grid, |x, y| Complex64::from_polar(1.0, 2.0 * x - y)).unwrap();
        assert!(!h1_membership(&h, ForbiddenSet::Either).unwrap().pass);
        assert!(h1_membership(&h, ForbiddenSet::Both).unwrap().pass);
    }

    #[test]
    fn modulated_fejer_lands_in_the_quadrant() {
        for (m, n) in [(0, 0), (1, 2), (3, 1)] {
            let b = DyadicBlock::new(m, n);
            let lam = MultiplierGrid::zeros(1 << (m + 1), 1 << (n + 1));
            let w = necessity_witness(&lam, b, witness_grid_size(b)).unwrap();
            let g = w.sample().unwrap();
            assert!(h1_membership(&g, ForbiddenSet::Either).unwrap().pass);
            assert!((w.l1_norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn block_energy_examples() {
        let ones = MultiplierGrid::from_fn(64, 64, |_, _| one());
        assert_eq!(block_energy(&ones, DyadicBlock::new(2, 3)).unwrap(), 32.0);
        assert!(block_energy(&ones, DyadicBlock::new(6, 0)).is_err());

        let inv = MultiplierGrid::from_fn(16, 16, |a, b| Complex64::new(1.0 / (a * b).max(1) as f64, 0.0));
        let mut brute = 0.0;
        for a in 8..16 {
            for b in 8..16 {
                brute += 1.0 / ((a * a * b * b) as f64);
            }
        }
        assert!((block_energy(&inv, DyadicBlock::new(3, 3)).unwrap() - brute).abs() < 1e-15);
    }

    #[test]
    fn lacunary_support_validation() {
        assert!(LacunarySupport::new(vec![(4, 4), (5, 7)]).is_err());
        assert!(LacunarySupport::new(vec![(4, 4), (8, 7), (0, 5), (0, 9)]).is_ok());
        assert!(LacunarySupport::new(vec![(0, 0), (0, 0)]).is_ok());
        let json = serde_json::to_string(&LacunarySupport::diagonal(2)).unwrap();
        assert_eq!(json, "[[1,1],[2,2],[4,4]]");
        assert!(serde_json::from_str::<LacunarySupport>("[[2,2],[3,3]]").is_err());
    }

    #[test]
    fn condition_constant_examples() {
        let s = LacunarySupport::new(vec![(1, 1), (2, 3), (5, 9), (12, 30), (20, 20)]).unwrap();
        let r = condition_constant(&MultiplierGrid::indicator(32, 32, &s));
        assert_eq!(r.constant, 1.0);

        let ones = MultiplierGrid::from_fn(1024, 1024, |_, _| one());
        let r = condition_constant(&ones);
        assert_eq!(r.constant, (512 * 512) as f64);
        assert_eq!(r.attaining_block, Some(DyadicBlock::new(9, 9)));
        assert!(r.partial_blocks.is_empty());

        let r = condition_constant(&MultiplierGrid::from_fn(24, 16, |_, _| one()));
        assert!(r.partial_blocks.iter().any(|(b, _)| b.m == 4));
        assert!(r.blocks.iter().all(|(b, _)| b.m <= 3 && b.n <= 3));
    }

    #[test]
    fn apply_multiplier_on_a_character() {
        let grid = GridSpec::torus(16, 16).unwrap();
        let f = SampledFunction2D::from_fn(grid, |x, y| Complex64::from_polar(1.0, 3.0 * x + 2.0 * y)).unwrap();
        let lam = MultiplierGrid::from_fn(8, 8, |_, _| one());
        let r = apply_multiplier(&lam, &f).unwrap();
        assert!((r.l2_norm - 1.0).abs() < 1e-12);
        assert!((r.sequence.get(3, 2) - one()).norm() < 1e-12);
        assert!(r.majorant_holds);

        let bad = f.map(|v| v.conj());
        assert!(matches!(apply_multiplier(&lam, &bad), Err(Error::NotInHardySpace { .. })));
    }

    #[test]
    fn paley_ratio_examples() {
        let grid = GridSpec::torus(16, 16).unwrap();
        let f = SampledFunction2D::from_fn(grid, |x, y| Complex64::from_polar(1.0, 2.0 * x + 2.0 * y)).unwrap();
        let s = LacunarySupport::new(vec![(2, 2)]).unwrap();
        assert!((paley_ratio(&f, &s).unwrap() - 1.0).abs() < 1e-12);
        let g = f.scaled(Complex64::new(3.5, 0.0));
        assert!((paley_ratio(&g, &s).unwrap() - 1.0).abs() < 1e-12);
        let z = f.scaled(Complex64::default());
        assert!(matches!(paley_ratio(&z, &s), Err(Error::ZeroNorm)));
    }

    #[test]
    fn quarter_bound_fails_for_a_corner_spike() {
        // all of the block energy sits where the modulated Fejér coefficients are smallest
        let b = DyadicBlock::new(3, 3);
        let mut lam = MultiplierGrid::zeros(16, 16);
        lam.set(8, 8, one());
        let w = necessity_witness(&lam, b, witness_grid_size(b)).unwrap();
        assert_eq!(w.block_energy, 1.0);
        assert!(w.value >= w.guaranteed_bound);
        assert!(w.guaranteed_bound > 1.0 / 16.0);
        assert!(!w.quarter_bound_holds, "value {}", w.value);
    }

    #[test]
    fn quarter_bound_holds_for_ones() {
        let lam = MultiplierGrid::from_fn(64, 64, |_, _| one());
        for m in 0..6 {
            for n in 0..6 {
                let b = DyadicBlock::new(m, n);
                let w = necessity_witness(&lam, b, witness_grid_size(b)).unwrap();
                assert!(w.quarter_bound_holds, "{b:?}");
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn grid_strategy() -> impl Strategy<Value = MultiplierGrid> {
            (1usize..20, 1usize..20).prop_flat_map(|(r, c)| {
                proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), r * c).prop_map(move |v| {
                    MultiplierGrid::new(r, c, v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()).unwrap()
                })
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn condition_constant_is_max_over_blocks(lam in grid_strategy()) {
                let r = condition_constant(&lam);
                let mut brute: f64 = 0.0;
                for m in 0..6 {
                    for n in 0..6 {
                        let b = DyadicBlock::new(m, n);
                        if b.meets(lam.rows, lam.cols) {
                            brute = brute.max(partial_block_energy(&lam, b));
                        }
                    }
                }
                prop_assert_eq!(r.constant.max(r.partial_blocks.iter().map(|(_, e)| *e).fold(0.0, f64::max)), brute);
            }

            #[test]
            fn witness_dominates_its_guarantee(lam in grid_strategy(), m in 0u32..3, n in 0u32..3) {
                let b = DyadicBlock::new(m, n);
                prop_assume!(b.fits(lam.rows, lam.cols));
                let w = necessity_witness(&lam, b, witness_grid_size(b)).unwrap();
                prop_assert!(w.value >= w.guaranteed_bound * (1.0 - 1e-12));
                prop_assert!(w.min_block_coefficient_sq > 1.0 / 16.0);
            }

            #[test]
            fn majorant_bounds_block_norm(lam in grid_strategy(), seed in 0u64..1000) {
                use rand::SeedableRng;
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                let k = lam.rows.max(lam.cols) - 1;
                let f = crate::corpus::H1Witness::random(&mut rng, k).sample((2 * k + 2).next_power_of_two()).unwrap();
                let a = apply_multiplier(&lam, &f).unwrap();
                prop_assert!(a.majorant_holds);
            }
        }
    }
}
