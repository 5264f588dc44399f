//! Classical BMO on the plane.
//!
//! Cubes are half-open squares `[c − s/2, c + s/2)²` sampled by the grid points
//! they contain; averages and oscillations use the same rectangle rule, so
//! constants are annihilated exactly. Measures are finite sums of point masses
//! in any dimension.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::ops::Range;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::spectral::{fft2, periodic_spectrum, SampledFunction2D};
use crate::{Error, Result};

const TWO_PI: f64 = 2.0 * PI;
const ALIGN_TOL: f64 = 1e-9;

/// Default tolerance for the oscillation identity.
pub const IDENTITY_TOL: f64 = 1e-8;

/// Half-open square `[c − s/2, c + s/2)²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubeSpec {
    pub center: (f64, f64),
    pub side: f64,
}

impl CubeSpec {
    pub fn new(center: (f64, f64), side: f64) -> Result<Self> {
        if !(side > 0.0 && side.is_finite()) || !center.0.is_finite() || !center.1.is_finite() {
            return Err(Error::InvalidArgument(format!("cube side must be positive, got {side}")));
        }
        Ok(Self { center, side })
    }

    pub fn translated(&self, h: (f64, f64)) -> Self {
        Self {
            center: (self.center.0 + h.0, self.center.1 + h.1),
            side: self.side,
        }
    }

    /// Frequency spacing `2π/side` of the cube viewed as a period cell.
    pub fn eps(&self) -> f64 {
        TWO_PI / self.side
    }
}

fn axis_range(lo: f64, hi: f64, origin: f64, h: f64, n: usize) -> Result<Range<usize>> {
    let a = ((lo - origin) / h - ALIGN_TOL).ceil();
    let b = ((hi - origin) / h - ALIGN_TOL).ceil();
    if a < 0.0 || b > n as f64 || b <= a {
        return Err(Error::OutOfWindow(format!(
            "interval [{lo}, {hi}) not inside the sample window"
        )));
    }
    Ok(a as usize..b as usize)
}

/// Grid index ranges of the samples inside `Q`.
pub fn cube_indices(f: &SampledFunction2D, q: &CubeSpec) -> Result<(Range<usize>, Range<usize>)> {
    let g = f.grid();
    let h = 0.5 * q.side;
    let rows = axis_range(q.center.0 - h, q.center.0 + h, g.origin.0, g.cell.0, g.shape.0)?;
    let cols = axis_range(q.center.1 - h, q.center.1 + h, g.origin.1, g.cell.1, g.shape.1)?;
    Ok((rows, cols))
}

fn cube_samples(f: &SampledFunction2D, q: &CubeSpec) -> Result<Vec<Complex64>> {
    let (rows, cols) = cube_indices(f, q)?;
    let mut out = Vec::with_capacity(rows.len() * cols.len());
    for i in rows {
        for j in cols.clone() {
            out.push(f.get(i, j));
        }
    }
    Ok(out)
}

fn oscillation_of(samples: &[Complex64], p: f64) -> f64 {
    let n = samples.len() as f64;
    let avg = samples.iter().sum::<Complex64>() / n;
    let m = samples.iter().map(|v| (v - avg).norm().powf(p)).sum::<f64>() / n;
    m.powf(1.0 / p)
}

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidArgument(format!("oscillation exponent must lie in [1, ∞), got {p}")));
    }
    Ok(())
}

/// `((1/|Q|)∫_Q |f − f_Q|^p)^{1/p}`.
pub fn cube_oscillation(f: &SampledFunction2D, q: &CubeSpec, p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(oscillation_of(&cube_samples(f, q)?, p))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BmoReport {
    /// Largest oscillation over the family; a lower bound for the BMO norm.
    pub value: f64,
    pub p: f64,
    pub attaining_cube: CubeSpec,
    pub per_cube: Vec<(CubeSpec, f64)>,
}

/// Maximum of [`cube_oscillation`] over a finite cube family.
pub fn bmo_norm(f: &SampledFunction2D, cubes: &[CubeSpec], p: f64) -> Result<BmoReport> {
    check_p(p)?;
    if cubes.is_empty() {
        return Err(Error::EmptyFamily("cube family"));
    }
    let per_cube = cubes
        .par_iter()
        .map(|q| cube_oscillation(f, q, p).map(|v| (*q, v)))
        .collect::<Result<Vec<_>>>()?;
    let (mut attaining_cube, mut value) = per_cube[0];
    for &(q, v) in &per_cube[1..] {
        if v > value {
            value = v;
            attaining_cube = q;
        }
    }
    Ok(BmoReport {
        value,
        p,
        attaining_cube,
        per_cube,
    })
}

/// The cube `[corner, corner + side)²` and its dyadic subcubes down to `levels` halvings.
pub fn dyadic_cubes(corner: (f64, f64), side: f64, levels: u32) -> Vec<CubeSpec> {
    let mut out = Vec::new();
    for l in 0..=levels {
        let k = 1usize << l;
        let s = side / k as f64;
        for a in 0..k {
            for b in 0..k {
                out.push(CubeSpec {
                    center: (corner.0 + (a as f64 + 0.5) * s, corner.1 + (b as f64 + 0.5) * s),
                    side: s,
                });
            }
        }
    }
    out
}

/// Both sides of the mean-square oscillation identity on one cube.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscillationIdentityReport {
    pub cube: CubeSpec,
    pub eps: f64,
    pub window: (usize, usize),
    /// `(1/|Q|)∫_Q |λ − λ_Q|²`.
    pub lhs: f64,
    /// `Σ_{0 < |α|_∞, α ∈ window} |λ̂(εα)|²`.
    pub rhs: f64,
    pub residual: f64,
    /// Energy of nonzero frequencies outside the window.
    pub truncated_energy: f64,
    pub band_limited: bool,
    pub passed: bool,
}

/// Compare the mean-square oscillation of `λ` on `Q` with the coefficient energy of
/// `λ` on `Q` viewed as a period cell. `window = None` takes the Nyquist window.
pub fn spectral_oscillation_identity(
    lam: &SampledFunction2D,
    q: &CubeSpec,
    window: Option<(usize, usize)>,
) -> Result<OscillationIdentityReport> {
    let (rows, cols) = cube_indices(lam, q)?;
    let g = lam.grid();
    for (len, h) in [(rows.len(), g.cell.0), (cols.len(), g.cell.1)] {
        if (len as f64 * h - q.side).abs() > ALIGN_TOL * q.side {
            return Err(Error::InvalidArgument(format!(
                "cube side {} is not a whole number of cells ({len} x {h})",
                q.side
            )));
        }
    }
    let cell = lam.subgrid(rows, cols)?.as_period_cell()?;
    let nyquist = cell.grid().nyquist_window();
    let window = window.unwrap_or(nyquist);
    if window.0 > nyquist.0 || window.1 > nyquist.1 {
        return Err(Error::NyquistExceeded {
            k1: window.0,
            k2: window.1,
            max1: nyquist.0,
            max2: nyquist.1,
        });
    }
    let lhs = oscillation_of(cell.values(), 2.0).powi(2);
    let spec = periodic_spectrum(&cell)?;
    let (k1, k2) = (window.0 as i64, window.1 as i64);
    let mut rhs = 0.0;
    let mut outside = 0.0;
    for ((a1, a2), c) in spec.iter() {
        if a1 == 0 && a2 == 0 {
            continue;
        }
        if a1.abs() <= k1 && a2.abs() <= k2 {
            rhs += c.norm_sqr();
        } else {
            outside += c.norm_sqr();
        }
    }
    let residual = (lhs - rhs).abs() / lhs.max(1e-15);
    let band_limited = outside <= IDENTITY_TOL * lhs.max(1e-15);
    Ok(OscillationIdentityReport {
        cube: *q,
        eps: q.eps(),
        window,
        lhs,
        rhs,
        residual,
        truncated_energy: outside,
        band_limited,
        passed: residual < IDENTITY_TOL,
    })
}

/// A finite sum of point masses in `R^d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Atom>", into = "Vec<Atom>")]
pub struct MeasureAtoms {
    atoms: Vec<Atom>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub point: Vec<f64>,
    pub weight: f64,
}

impl MeasureAtoms {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        let dim = atoms.first().map_or(0, |a| a.point.len());
        for a in &atoms {
            if a.point.is_empty() || a.point.len() != dim {
                return Err(Error::InvalidArgument("atoms must share a positive dimension".into()));
            }
            if a.point.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidArgument("atom coordinates must be finite".into()));
            }
            if a.point.iter().all(|&x| x == 0.0) {
                return Err(Error::InvalidArgument("atom at the origin".into()));
            }
            if !(a.weight >= 0.0 && a.weight.is_finite()) {
                return Err(Error::InvalidArgument(format!("atom weight {} must be finite and nonnegative", a.weight)));
            }
        }
        Ok(Self { atoms })
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn dim(&self) -> usize {
        self.atoms.first().map_or(0, |a| a.point.len())
    }

    /// `Σ_{j=1}^{count} δ_{2^j e₁}` in `R^dim`.
    pub fn lacunary(count: u32, dim: usize) -> Self {
        let atoms = (1..=count)
            .map(|j| {
                let mut point = vec![0.0; dim];
                point[0] = 2f64.powi(j as i32);
                Atom { point, weight: 1.0 }
            })
            .collect();
        Self { atoms }
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        let mut atoms = self.atoms.clone();
        atoms.extend_from_slice(&other.atoms);
        Self::new(atoms)
    }
}

impl TryFrom<Vec<Atom>> for MeasureAtoms {
    type Error = Error;
    fn try_from(v: Vec<Atom>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<MeasureAtoms> for Vec<Atom> {
    fn from(m: MeasureAtoms) -> Self {
        m.atoms
    }
}

/// Index `α` of the half-open cell `Q_α^ε ∋ x`; boundary points go to the upper cell.
pub fn cell_index(x: &[f64], eps: f64) -> Vec<i64> {
    x.iter().map(|&t| (t / eps + 0.5).floor() as i64).collect()
}

/// Masses `μ(Q_α^ε)` of the occupied cells.
pub fn cell_masses(mu: &MeasureAtoms, eps: f64) -> BTreeMap<Vec<i64>, f64> {
    let mut cells = BTreeMap::new();
    for a in mu.atoms() {
        *cells.entry(cell_index(&a.point, eps)).or_insert(0.0) += a.weight;
    }
    cells
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlStEntry {
    pub eps: f64,
    pub value: f64,
    pub occupied_cells: usize,
    /// Mass in the cell at the origin, excluded from `value`.
    pub origin_mass: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlStReport {
    pub per_eps: Vec<SlStEntry>,
    pub max: f64,
    pub attaining_eps: f64,
}

/// `(Σ_{α≠0} μ(Q_α^ε)²)^{1/2}` for each `ε` of the ladder.
pub fn slst_condition(mu: &MeasureAtoms, eps_list: &[f64]) -> Result<SlStReport> {
    if eps_list.is_empty() {
        return Err(Error::EmptyFamily("eps ladder"));
    }
    if let Some(e) = eps_list.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {e}")));
    }
    let per_eps: Vec<SlStEntry> = eps_list
        .par_iter()
        .map(|&eps| {
            let cells = cell_masses(mu, eps);
            let mut sum = 0.0;
            let mut origin_mass = 0.0;
            for (alpha, m) in &cells {
                if alpha.iter().all(|&a| a == 0) {
                    origin_mass += m;
                } else {
                    sum += m * m;
                }
            }
            SlStEntry {
                eps,
                value: sum.sqrt(),
                occupied_cells: cells.len(),
                origin_mass,
            }
        })
        .collect();
    let mut best = &per_eps[0];
    for e in &per_eps[1..] {
        if e.value > best.value {
            best = e;
        }
    }
    Ok(SlStReport {
        max: best.value,
        attaining_eps: best.eps,
        per_eps,
    })
}

/// Plancherel pairing of one witness against `λ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessPairing {
    /// `∫|F(f)F(λ)| dξ` on the dual lattice of the window.
    pub s: f64,
    /// `(2π)^{-2}∫ f λ̄` on the space side.
    pub pairing_space: Complex64,
    /// `∫ F(f) conj F(λ) dξ` on the frequency side.
    pub pairing_frequency: Complex64,
    pub pairing_discrepancy: f64,
    /// `s ≥ |pairing_space|`.
    pub ordered: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualityChainReport {
    pub s: f64,
    pub attaining_witness: usize,
    pub witnesses: Vec<WitnessPairing>,
    /// `bmo_norm(λ, cubes, 2)`.
    pub b2: f64,
    /// `bmo_norm(λ, cubes, 1)`.
    pub b1: f64,
    /// Largest `(Σ_{α≠0} |λ̂(εα)|²)^{1/2}` over the cubes, `ε = 2π/side`.
    pub g: f64,
    pub s_over_b2: Option<f64>,
    pub b2_over_g: Option<f64>,
    /// `b2 / b1`, a realised John–Nirenberg ratio.
    pub b2_over_b1: Option<f64>,
    pub chain_ordered: bool,
    pub identities: Vec<OscillationIdentityReport>,
}

fn ratio(a: f64, b: f64) -> Option<f64> {
    (b > 0.0).then(|| a / b)
}

/// Lower-bound chain for the multiplier norm of `λ` from finite witness and cube families.
///
/// Witnesses share `λ`'s window grid and are rescaled to unit `L¹` norm.
/// Transforms are sampled on the dual lattice `2πα/L` with the rectangle rule,
/// for which the discrete Plancherel identity is exact.
pub fn duality_lower_bound(
    lam: &SampledFunction2D,
    witnesses: &[SampledFunction2D],
    cubes: &[CubeSpec],
    window: Option<(usize, usize)>,
) -> Result<DualityChainReport> {
    if witnesses.is_empty() {
        return Err(Error::EmptyFamily("witness family"));
    }
    let g = lam.grid();
    let (n1, n2) = g.shape;
    let area = g.cell.0 * g.cell.1;
    let mut lam_hat = lam.values().to_vec();
    fft2(&mut lam_hat, n1, n2, false);

    let witnesses: Vec<WitnessPairing> = witnesses
        .par_iter()
        .map(|f| {
            if f.grid() != g {
                return Err(Error::InvalidGrid("witness grid differs from the multiplier grid".into()));
            }
            let mass = area * f.values().iter().map(|v| v.norm()).sum::<f64>();
            if mass == 0.0 {
                return Err(Error::ZeroNorm);
            }
            let values: Vec<Complex64> = f.values().iter().map(|v| v / mass).collect();
            let scale = area / (TWO_PI * TWO_PI);
            let pairing_space = values
                .iter()
                .zip(lam.values())
                .map(|(a, b)| a * b.conj())
                .sum::<Complex64>()
                * scale;
            let mut f_hat = values;
            fft2(&mut f_hat, n1, n2, false);
            let norm = scale / (n1 * n2) as f64;
            let mut s = 0.0;
            let mut pairing_frequency = Complex64::default();
            for (a, b) in f_hat.iter().zip(&lam_hat) {
                s += a.norm() * b.norm();
                pairing_frequency += a * b.conj();
            }
            s *= norm;
            pairing_frequency *= norm;
            let pairing_discrepancy = (pairing_space - pairing_frequency).norm();
            Ok(WitnessPairing {
                s,
                pairing_space,
                pairing_frequency,
                pairing_discrepancy,
                // |pairing_frequency| ≤ s exactly; the two pairings differ only by rounding
                ordered: s * (1.0 + 1e-12) + pairing_discrepancy >= pairing_space.norm(),
            })
        })
        .collect::<Result<_>>()?;

    let mut attaining_witness = 0;
    for (i, w) in witnesses.iter().enumerate() {
        if w.s > witnesses[attaining_witness].s {
            attaining_witness = i;
        }
    }
    let s = witnesses[attaining_witness].s;
    let b2 = bmo_norm(lam, cubes, 2.0)?.value;
    let b1 = bmo_norm(lam, cubes, 1.0)?.value;
    let identities = cubes
        .par_iter()
        .map(|q| spectral_oscillation_identity(lam, q, window))
        .collect::<Result<Vec<_>>>()?;
    let g_val = identities.iter().map(|r| r.rhs.sqrt()).fold(0.0, f64::max);
    Ok(DualityChainReport {
        s,
        attaining_witness,
        chain_ordered: witnesses.iter().all(|w| w.ordered),
        witnesses,
        b2,
        b1,
        g: g_val,
        s_over_b2: ratio(s, b2),
        b2_over_g: ratio(b2, g_val),
        b2_over_b1: ratio(b2, b1),
        identities,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::GridSpec;

    fn window_grid(half: f64, n: usize) -> GridSpec {
        GridSpec::window((-half, -half), (2.0 * half / n as f64, 2.0 * half / n as f64), (n, n)).unwrap()
    }

    fn cos_x(grid: GridSpec) -> SampledFunction2D {
        SampledFunction2D::from_fn(grid, |x, _| Complex64::new(x.cos(), 0.0)).unwrap()
    }

    #[test]
    fn constant_has_no_oscillation() {
        let f = SampledFunction2D::from_fn(window_grid(PI, 32), |_, _| Complex64::new(2.5, -1.0)).unwrap();
        let q = CubeSpec::new((0.0, 0.0), 2.0 * PI).unwrap();
        for p in [1.0, 2.0, 4.0] {
            assert!(cube_oscillation(&f, &q, p).unwrap() < 1e-15);
        }
    }

    #[test]
    fn cosine_oscillation_on_the_period_cube() {
        let f = cos_x(window_grid(PI, 64));
        let q = CubeSpec::new((0.0, 0.0), 2.0 * PI).unwrap();
        let v = cube_oscillation(&f, &q, 2.0).unwrap();
        assert!((v - 0.5f64.sqrt()).abs() < 1e-12);
        let v1 = cube_oscillation(&f, &q, 1.0).unwrap();
        assert!(v1 <= v);
    }

    #[test]
    fn cube_outside_window_is_rejected() {
        let f = cos_x(window_grid(PI, 32));
        let q = CubeSpec::new((1.0, 0.0), 2.0 * PI).unwrap();
        assert!(matches!(cube_oscillation(&f, &q, 2.0), Err(Error::OutOfWindow(_))));
        assert!(cube_oscillation(&f, &CubeSpec::new((0.0, 0.0), 1.0).unwrap(), 0.5).is_err());
    }

    #[test]
    fn bmo_over_dyadic_cubes_attains_at_the_full_cube() {
        let f = cos_x(window_grid(PI, 64));
        let cubes = dyadic_cubes((-PI, -PI), 2.0 * PI, 3);
        assert_eq!(cubes.len(), 1 + 4 + 16 + 64);
        let r = bmo_norm(&f, &cubes, 2.0).unwrap();
        assert!((r.value - 0.5f64.sqrt()).abs() < 1e-12);
        assert_eq!(r.attaining_cube.side, 2.0 * PI);
        // brute-force oracle
        let brute = cubes.iter().map(|q| cube_oscillation(&f, q, 2.0).unwrap()).fold(0.0, f64::max);
        assert_eq!(brute, r.value);
        assert!(bmo_norm(&f, &[], 2.0).is_err());
    }

    #[test]
    fn identity_examples() {
        let grid = window_grid(2.0 * PI, 64);
        let f = cos_x(grid.clone());
        let q = CubeSpec::new((0.0, 0.0), 2.0 * PI).unwrap();
        let r = spectral_oscillation_identity(&f, &q, None).unwrap();
        assert!((r.lhs - 0.5).abs() < 1e-12 && (r.rhs - 0.5).abs() < 1e-12);
        assert!(r.passed && r.band_limited);

        // a single character at the cube's own spacing, at several centers
        let side = PI;
        for c in [(0.0, 0.0), (PI / 2.0, -PI / 4.0), (-PI, PI)] {
            let q = CubeSpec::new(c, side).unwrap();
            let e = q.eps();
            let g = SampledFunction2D::from_fn(grid.clone(), move |x, _| Complex64::from_polar(1.0, e * x)).unwrap();
            let r = spectral_oscillation_identity(&g, &q, None).unwrap();
            assert!((r.lhs - 1.0).abs() < 1e-12 && (r.rhs - 1.0).abs() < 1e-12);
        }

        let z = f.map(|_| Complex64::new(3.0, 0.0));
        let r = spectral_oscillation_identity(&z, &q, None).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert!(r.rhs < 1e-28);
    }

    #[test]
    fn identity_flags_truncation() {
        let f = SampledFunction2D::from_fn(window_grid(PI, 64), |x, y| Complex64::new((9.0 * x).cos() + y.sin(), 0.0)).unwrap();
        let q = CubeSpec::new((0.0, 0.0), 2.0 * PI).unwrap();
        let r = spectral_oscillation_identity(&f, &q, Some((4, 4))).unwrap();
        assert!(!r.band_limited && !r.passed);
        assert!((r.truncated_energy - 0.5).abs() < 1e-12);
        assert!(spectral_oscillation_identity(&f, &q, Some((40, 4))).is_err());
    }

    #[test]
    fn slst_examples() {
        let one = |p: Vec<f64>, w| Atom { point: p, weight: w };
        let mu = MeasureAtoms::new(vec![one(vec![3.2, 1.0], 2.5)]).unwrap();
        assert_eq!(slst_condition(&mu, &[1.0]).unwrap().max, 2.5);

        let same = MeasureAtoms::new(vec![one(vec![2.1, 0.0], 1.0), one(vec![2.3, 0.2], 1.0)]).unwrap();
        assert_eq!(slst_condition(&same, &[1.0]).unwrap().max, 2.0);
        let apart = MeasureAtoms::new(vec![one(vec![2.1, 0.0], 1.0), one(vec![4.0, 0.0], 1.0)]).unwrap();
        assert_eq!(slst_condition(&apart, &[1.0]).unwrap().max, 2f64.sqrt());

        for j in [1, 4, 9, 16] {
            let r = slst_condition(&MeasureAtoms::lacunary(j, 2), &[1.0]).unwrap();
            assert_eq!(r.max, (j as f64).sqrt());
        }

        // near the origin the mass is dropped, boundary points go up
        let near = MeasureAtoms::new(vec![one(vec![0.4], 1.0), one(vec![0.5], 3.0)]).unwrap();
        let r = slst_condition(&near, &[1.0]).unwrap();
        assert_eq!(r.max, 3.0);
        assert_eq!(r.per_eps[0].origin_mass, 1.0);
        assert!(MeasureAtoms::new(vec![one(vec![0.0, 0.0], 1.0)]).is_err());
        assert!(slst_condition(&near, &[]).is_err());
    }

    #[test]
    fn plancherel_pairing_two_ways() {
        let grid = window_grid(2.0 * PI, 64);
        let lam = cos_x(grid.clone());
        let f = SampledFunction2D::from_fn(grid.clone(), |x, y| {
            let bump = (-(x * x + y * y)).exp();
            Complex64::new(bump * x.cos(), 0.0)
        })
        .unwrap();
        let cubes = vec![CubeSpec::new((0.0, 0.0), 2.0 * PI).unwrap()];
        let r = duality_lower_bound(&lam, &[f], &cubes, None).unwrap();
        let w = &r.witnesses[0];
        assert!(w.pairing_discrepancy < 1e-12);
        assert!(w.pairing_space.norm() > 1e-3);
        assert!(r.chain_ordered);
        assert!((r.b2_over_g.unwrap() - 1.0).abs() < 1e-10);

        let c = lam.map(|_| Complex64::new(1.0, 0.0));
        let r = duality_lower_bound(&c, &[cos_x(grid)], &cubes, None).unwrap();
        assert!(r.b2 < 1e-15 && r.g < 1e-7);
    }
}
