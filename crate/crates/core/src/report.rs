//! Command implementations behind the CLI. Each returns a JSON report, CSV tables and
//! any artifacts to persist; the binary only parses flags and writes files.

use std::f64::consts::PI;
use std::path::PathBuf;

use num_complex::Complex64;
use serde::Serialize;

use crate::classical_bmo::{
    slst_condition, spectral_oscillation_identity, duality_lower_bound, CubeSpec, MeasureAtoms, OscillationIdentityReport,
    SlStEntry,
};
use crate::corpus::{generate_corpus, paley_statistics, random_trig_poly, seeded_rng, CorpusSpec, H1Witness, Summary};
use crate::fixtures::{self, to_json_string, FunctionSpec, TrigTerm};
use crate::product_bmo::dyadic::{enumerate_dyadic_rectangles, OpenSetMask};
use crate::product_bmo::functionals::{
    carleson_lifts, conjecture_functional, product_bmo_b, product_bmo_c, square_functional_from_lifts, square_functional,
    symbol_sup_functional, ProductConfig, Symbol,
};
use crate::product_bmo::lemma::{decay_trend, lemma_table, DecayTrend, LEMMA_FREQUENCIES, LEMMA_SCALES};
use crate::product_bmo::wavelet::{build_psi, WaveletProfile};
use crate::spectral::{GridSpec, SampledFunction2D};
use crate::torus_multipliers::{
    apply_multiplier, condition_constant, necessity_witness, witness_grid_size, DyadicBlock, LacunarySupport,
    MultiplierGrid,
};
use crate::{Error, Result, SCHEMA_VERSION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ASSERTION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// Result of one command.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub exit: i32,
    /// Pretty JSON report.
    pub report: String,
    /// `(file name, contents)` pairs: CSV tables and persisted artifacts.
    pub files: Vec<(String, String)>,
}

fn outcome<T: Serialize>(passed: bool, report: &T, files: Vec<(String, String)>) -> Result<Outcome> {
    Ok(Outcome {
        exit: if passed { EXIT_OK } else { EXIT_ASSERTION },
        report: to_json_string(report)?,
        files,
    })
}

fn csv_table<I, R>(header: &[&str], rows: I) -> Result<String>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Error::InvalidArgument(e.to_string());
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(r).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

// ---------------------------------------------------------------- multiplier-check

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MultiplierFixture {
    /// `λ ≡ 1` on the window.
    Ones,
    /// Indicator of the diagonal `{(2^j, 2^j)}`.
    Lacunary,
}

#[derive(Clone, Debug)]
pub struct MultiplierCheckConfig {
    pub input: Option<PathBuf>,
    pub fixture: MultiplierFixture,
    /// Window side for built-in fixtures.
    pub window: usize,
    /// Torus grid for the majorant checks; derived from the window when absent.
    pub grid: Option<usize>,
    pub seed: u64,
    pub samples: usize,
    pub tol: f64,
}

impl Default for MultiplierCheckConfig {
    fn default() -> Self {
        Self {
            input: None,
            fixture: MultiplierFixture::Ones,
            window: 256,
            grid: None,
            seed: 0,
            samples: 8,
            tol: 1e-12,
        }
    }
}

#[derive(Serialize)]
struct WitnessRow {
    block: DyadicBlock,
    grid_n: usize,
    value: f64,
    block_energy: f64,
    guaranteed_bound: f64,
    quarter_bound_holds: bool,
    holds: bool,
}

#[derive(Serialize)]
struct MajorantRow {
    sample: usize,
    block_l2_norm: f64,
    majorant: f64,
    holds: bool,
}

#[derive(Serialize)]
struct MultiplierReport {
    schema_version: u32,
    command: &'static str,
    source: String,
    window: (usize, usize),
    seed: u64,
    condition_constant: f64,
    attaining_block: Option<DyadicBlock>,
    witness_lower_bounds: Vec<WitnessRow>,
    majorant_checks: Vec<MajorantRow>,
    failures: Vec<String>,
    passed: bool,
}

pub fn cmd_multiplier_check(cfg: &MultiplierCheckConfig) -> Result<Outcome> {
    let (lam, source) = match &cfg.input {
        Some(p) => (fixtures::load_multiplier(p)?, p.display().to_string()),
        None => {
            let w = cfg.window;
            match cfg.fixture {
                MultiplierFixture::Ones => (MultiplierGrid::from_fn(w, w, |_, _| Complex64::new(1.0, 0.0)), "ones".into()),
                MultiplierFixture::Lacunary => {
                    let top = w.max(2).ilog2();
                    (MultiplierGrid::indicator(w, w, &LacunarySupport::diagonal(top)), "lacunary".into())
                }
            }
        }
    };
    if lam.rows == 0 || lam.cols == 0 {
        return Err(Error::InvalidArgument("empty multiplier window".into()));
    }
    let cond = condition_constant(&lam);
    let mut failures = Vec::new();

    let mut witness_lower_bounds = Vec::new();
    let top = |len: usize| if len < 2 { 0 } else { (len as u64).ilog2() };
    for m in 0..top(lam.rows) {
        for n in 0..top(lam.cols) {
            let b = DyadicBlock::new(m, n);
            if !b.fits(lam.rows, lam.cols) {
                continue;
            }
            let grid_n = witness_grid_size(b);
            match necessity_witness(&lam, b, grid_n) {
                Ok(w) => witness_lower_bounds.push(WitnessRow {
                    block: b,
                    grid_n,
                    value: w.value,
                    block_energy: w.block_energy,
                    guaranteed_bound: w.guaranteed_bound,
                    quarter_bound_holds: w.quarter_bound_holds,
                    holds: true,
                }),
                Err(Error::Invariant(msg)) => failures.push(msg),
                Err(e) => return Err(e),
            }
        }
    }

    let k_max = lam.rows.max(lam.cols) - 1;
    let grid_n = cfg.grid.unwrap_or_else(|| (2 * k_max + 2).next_power_of_two());
    let mut rng = seeded_rng(cfg.seed);
    let mut majorant_checks = Vec::new();
    for sample in 0..cfg.samples {
        let f = H1Witness::random(&mut rng, k_max).sample(grid_n)?;
        let a = apply_multiplier(&lam, &f)?;
        let holds = a.block_l2_norm <= a.majorant * (1.0 + cfg.tol) + 1e-300;
        if !holds {
            failures.push(format!(
                "sample {sample}: block norm {} exceeds majorant {}",
                a.block_l2_norm, a.majorant
            ));
        }
        majorant_checks.push(MajorantRow {
            sample,
            block_l2_norm: a.block_l2_norm,
            majorant: a.majorant,
            holds,
        });
    }

    let table = csv_table(
        &["m", "n", "grid_n", "value", "block_energy", "guaranteed_bound", "quarter_bound_holds"],
        witness_lower_bounds.iter().map(|w| {
            vec![
                w.block.m.to_string(),
                w.block.n.to_string(),
                w.grid_n.to_string(),
                w.value.to_string(),
                w.block_energy.to_string(),
                w.guaranteed_bound.to_string(),
                w.quarter_bound_holds.to_string(),
            ]
        }),
    )?;
    let report = MultiplierReport {
        schema_version: SCHEMA_VERSION,
        command: "multiplier-check",
        source,
        window: (lam.rows, lam.cols),
        seed: cfg.seed,
        condition_constant: cond.constant,
        attaining_block: cond.attaining_block,
        passed: failures.is_empty(),
        witness_lower_bounds,
        majorant_checks,
        failures,
    };
    outcome(report.passed, &report, vec![("witnesses.csv".into(), table)])
}

// ---------------------------------------------------------------- bmo-suite

#[derive(Clone, Debug)]
pub struct BmoSuiteConfig {
    pub input: Option<PathBuf>,
    pub measure: Option<PathBuf>,
    /// Sample cells per unit length for analytic fixtures.
    pub grid: usize,
    pub window: Option<usize>,
    pub seed: u64,
    pub tol: f64,
}

impl Default for BmoSuiteConfig {
    fn default() -> Self {
        Self {
            input: None,
            measure: None,
            grid: 32,
            window: None,
            seed: 0,
            tol: 1e-8,
        }
    }
}

/// `cos(2π(4x₁ + 8x₂))`, periodic on every suite cube.
pub fn cos_fixture() -> FunctionSpec {
    FunctionSpec::TrigPoly {
        terms: vec![
            TrigTerm {
                freq: [4.0, 8.0],
                coeff: [0.5, 0.0],
            },
            TrigTerm {
                freq: [-4.0, -8.0],
                coeff: [0.5, 0.0],
            },
        ],
    }
}

/// Three cube sides times three centres inside `[0, 2)²`.
pub fn suite_cubes() -> Vec<CubeSpec> {
    let mut out = Vec::new();
    for side in [1.0, 0.5, 0.25] {
        for center in [(0.5, 0.5), (1.0, 1.0), (0.75, 1.25)] {
            out.push(CubeSpec::new(center, side).expect("positive side"));
        }
    }
    out
}

pub const SLST_LADDER: [f64; 7] = [0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0];

#[derive(Serialize)]
struct BmoReport {
    schema_version: u32,
    command: &'static str,
    source: String,
    grid: GridSpec,
    identities: Vec<OscillationIdentityReport>,
    max_residual: f64,
    warnings: Vec<String>,
    slst: Vec<SlStEntry>,
    slst_max: f64,
    chain: ChainSummary,
    passed: bool,
}

#[derive(Serialize)]
struct ChainSummary {
    s: f64,
    b2: f64,
    b1: f64,
    g: f64,
    s_over_b2: Option<f64>,
    b2_over_g: Option<f64>,
    b2_over_b1: Option<f64>,
    max_pairing_discrepancy: f64,
    chain_ordered: bool,
}

fn sample_window(spec: &FunctionSpec, lo: f64, hi: f64, cells_per_unit: usize) -> Result<SampledFunction2D> {
    if let Some(g) = spec.own_grid() {
        return spec.sample(g);
    }
    if cells_per_unit == 0 {
        return Err(Error::InvalidArgument("grid must be positive".into()));
    }
    let h = 1.0 / cells_per_unit as f64;
    let n = ((hi - lo) * cells_per_unit as f64).round() as usize;
    spec.sample(&GridSpec::window((lo, lo), (h, h), (n, n))?)
}

pub fn cmd_bmo_suite(cfg: &BmoSuiteConfig) -> Result<Outcome> {
    let (spec, source) = match &cfg.input {
        Some(p) => (fixtures::load_function(p)?, p.display().to_string()),
        None => (cos_fixture(), "cos".into()),
    };
    let lam = sample_window(&spec, -1.0, 3.0, cfg.grid)?;
    let cubes = suite_cubes();

    let identities = cubes
        .iter()
        .map(|q| spectral_oscillation_identity(&lam, q, cfg.window.map(|k| (k, k))))
        .collect::<Result<Vec<_>>>()?;
    let mut warnings = Vec::new();
    let mut passed = true;
    for r in &identities {
        if !r.band_limited {
            warnings.push(format!(
                "cube {:?}: energy {:e} lies outside the window {:?}",
                r.cube, r.truncated_energy, r.window
            ));
        } else if r.residual >= cfg.tol {
            passed = false;
        }
    }
    let max_residual = identities.iter().map(|r| r.residual).fold(0.0, f64::max);

    let mu = match &cfg.measure {
        Some(p) => fixtures::load_measure(p)?,
        None => MeasureAtoms::lacunary(4, 2),
    };
    let slst = slst_condition(&mu, &SLST_LADDER)?;

    let mut rng = seeded_rng(cfg.seed);
    let witnesses = (0..4)
        .map(|_| random_trig_poly(&mut rng, 3, 8).sample(lam.grid()))
        .collect::<Result<Vec<_>>>()?;
    let t = duality_lower_bound(&lam, &witnesses, &cubes, None)?;
    let chain = ChainSummary {
        s: t.s,
        b2: t.b2,
        b1: t.b1,
        g: t.g,
        s_over_b2: t.s_over_b2,
        b2_over_g: t.b2_over_g,
        b2_over_b1: t.b2_over_b1,
        max_pairing_discrepancy: t.witnesses.iter().map(|w| w.pairing_discrepancy).fold(0.0, f64::max),
        chain_ordered: t.chain_ordered,
    };
    passed &= chain.chain_ordered;

    let identity_table = csv_table(
        &["center_x", "center_y", "side", "lhs", "rhs", "residual", "band_limited"],
        identities.iter().map(|r| {
            vec![
                r.cube.center.0.to_string(),
                r.cube.center.1.to_string(),
                r.cube.side.to_string(),
                r.lhs.to_string(),
                r.rhs.to_string(),
                r.residual.to_string(),
                r.band_limited.to_string(),
            ]
        }),
    )?;
    let slst_table = csv_table(
        &["eps", "value", "occupied_cells", "origin_mass"],
        slst.per_eps.iter().map(|e| {
            vec![
                e.eps.to_string(),
                e.value.to_string(),
                e.occupied_cells.to_string(),
                e.origin_mass.to_string(),
            ]
        }),
    )?;
    let report = BmoReport {
        schema_version: SCHEMA_VERSION,
        command: "bmo-suite",
        source,
        grid: lam.grid().clone(),
        identities,
        max_residual,
        warnings,
        slst_max: slst.max,
        slst: slst.per_eps,
        chain,
        passed,
    };
    outcome(
        passed,
        &report,
        vec![("identities.csv".into(), identity_table), ("slst_ladder.csv".into(), slst_table)],
    )
}

// ---------------------------------------------------------------- product-suite

#[derive(Clone, Debug)]
pub struct ProductSuiteConfig {
    pub input: Option<PathBuf>,
    pub mask: Option<PathBuf>,
    pub psi: Option<PathBuf>,
    /// Sample cells per unit length for analytic fixtures.
    pub grid: usize,
    pub depth: u32,
    pub tol: f64,
}

impl Default for ProductSuiteConfig {
    fn default() -> Self {
        Self {
            input: None,
            mask: None,
            psi: None,
            grid: 32,
            depth: 2,
            tol: 1e-6,
        }
    }
}

/// `e^{2πi(2x₁ + x₂)}`.
pub fn character_fixture() -> FunctionSpec {
    FunctionSpec::TrigPoly {
        terms: vec![TrigTerm {
            freq: [2.0, 1.0],
            coeff: [1.0, 0.0],
        }],
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PsiInvariants {
    pub evenness_defect: f64,
    pub mean: f64,
    pub normalization: f64,
    pub normalization_check: f64,
    pub second_difference_bound: f64,
    pub second_difference_bound_coarse: f64,
    pub c1_consistent: bool,
    pub passed: bool,
}

pub fn psi_invariants(w: &WaveletProfile) -> PsiInvariants {
    let d = &w.diagnostics;
    let passed = d.evenness_defect == 0.0
        && d.mean.abs() < 1e-10
        && (d.normalization - 1.0).abs() < 1e-6
        && (d.normalization_check - 1.0).abs() < 1e-6
        && d.second_difference_bound.is_finite()
        && d.c1_consistent;
    PsiInvariants {
        evenness_defect: d.evenness_defect,
        mean: d.mean,
        normalization: d.normalization,
        normalization_check: d.normalization_check,
        second_difference_bound: d.second_difference_bound,
        second_difference_bound_coarse: d.second_difference_bound_coarse,
        c1_consistent: d.c1_consistent,
        passed,
    }
}

#[derive(Serialize)]
struct RectangleRow {
    scales: (i32, i32),
    index: (i64, i64),
    bracket: f64,
    s_r_squared: f64,
    residual: f64,
}

#[derive(Serialize)]
struct ProductReport {
    schema_version: u32,
    command: &'static str,
    source: String,
    depth: u32,
    rectangles: usize,
    psi_invariants: PsiInvariants,
    rectangle_identity_residuals: Vec<RectangleRow>,
    max_rectangle_residual: f64,
    lemma_max_residual: f64,
    lemma_max_scale_spread: f64,
    lemma_passed: bool,
    band_weight_decay: DecayTrend,
    c_value: f64,
    b_value: f64,
    b_over_c: Option<f64>,
    square_value: f64,
    symbol_sup_value: f64,
    symbol_sup_attaining_symbol: String,
    identity_symbol_matches: bool,
    conjecture_value: f64,
    conjecture_vs_square_ratio: Option<f64>,
    warnings: Vec<String>,
    passed: bool,
}

/// Sample `spec` on the bounding box of `Ω` widened by the largest rectangle side.
pub fn sample_for_mask(spec: &FunctionSpec, omega: &OpenSetMask, depth: u32, cells_per_unit: usize) -> Result<SampledFunction2D> {
    if let Some(g) = spec.own_grid() {
        return spec.sample(g);
    }
    let margin = enumerate_dyadic_rectangles(omega, depth)
        .iter()
        .map(|r| r.i.len().max(r.j.len()))
        .fold(0.0, f64::max);
    let ((x0, y0), (x1, y1)) = omega.bbox();
    let h = 1.0 / cells_per_unit as f64;
    let cells = |len: f64| -> Result<usize> {
        let c = len / h;
        if (c - c.round()).abs() > 1e-9 || c.round() < 1.0 {
            return Err(Error::InvalidGrid(format!("length {len} is not a whole number of cells of width {h}")));
        }
        Ok(c.round() as usize)
    };
    let shape = (cells(x1 - x0 + 2.0 * margin)?, cells(y1 - y0 + 2.0 * margin)?);
    cells(x0.abs().max(h))?;
    cells(y0.abs().max(h))?;
    spec.sample(&GridSpec::window((x0 - margin, y0 - margin), (h, h), shape)?)
}

fn symbol_family(cells_per_unit: usize) -> Vec<Symbol> {
    vec![
        Symbol::Identity,
        Symbol::Constant(Complex64::new(0.0, 0.5)),
        Symbol::PhaseAlign,
        Symbol::LowPass {
            radius: 2.0 * PI * cells_per_unit as f64 / 4.0,
        },
    ]
}

pub fn cmd_product_suite(cfg: &ProductSuiteConfig) -> Result<Outcome> {
    let (spec, source) = match &cfg.input {
        Some(p) => (fixtures::load_function(p)?, p.display().to_string()),
        None => (character_fixture(), "character".into()),
    };
    let omega = match &cfg.mask {
        Some(p) => fixtures::load_mask(p)?,
        None => OpenSetMask::unit_square(),
    };
    let w = match &cfg.psi {
        Some(p) => fixtures::load_profile(p)?,
        None => build_psi(crate::product_bmo::wavelet::MIN_SAMPLES + 1)?,
    };
    let psi = psi_invariants(&w);
    let lam = sample_for_mask(&spec, &omega, cfg.depth, cfg.grid)?;
    let pc = ProductConfig::default();
    let lifts = carleson_lifts(&lam, &w, &omega, cfg.depth, &pc)?;
    let square = square_functional_from_lifts(&lifts)?;
    let c = product_bmo_c(&lifts)?;
    let b = product_bmo_b(&lifts, &w)?;
    let symbol_sup = symbol_sup_functional(&lam, &w, &omega, &symbol_family(cfg.grid), cfg.depth, &pc)?;
    let identity_symbol_matches = symbol_sup.per_symbol[0].value.to_bits() == square.value.to_bits();
    let conj = conjecture_functional(&lam, &w, &omega, cfg.depth)?;
    let lemma = lemma_table(&w, &LEMMA_FREQUENCIES, &LEMMA_SCALES)?;

    let max_rectangle_residual = square.max_residual;
    let identity_ok = max_rectangle_residual < cfg.tol;
    let passed = psi.passed && identity_ok && lemma.passed && identity_symbol_matches;
    let warnings: Vec<String> = [square.warning.clone(), c.warning.clone(), b.warning.clone()]
        .into_iter()
        .flatten()
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();

    let rect_table = csv_table(
        &["scale_i", "index_i", "scale_j", "index_j", "bracket", "s_r_squared", "residual"],
        square.per_rectangle.iter().map(|p| {
            vec![
                p.rect.i.scale.to_string(),
                p.rect.i.index.to_string(),
                p.rect.j.scale.to_string(),
                p.rect.j.index.to_string(),
                p.bracket.to_string(),
                p.s_r_squared.to_string(),
                p.residual.to_string(),
            ]
        }),
    )?;
    let lemma_csv = csv_table(
        &["k", "l", "len_i", "len_j", "lhs", "rhs", "residual"],
        lemma.rows.iter().map(|r| {
            vec![
                r.k.to_string(),
                r.l.to_string(),
                r.len_i.to_string(),
                r.len_j.to_string(),
                r.lhs.to_string(),
                r.rhs.to_string(),
                r.residual.to_string(),
            ]
        }),
    )?;
    let report = ProductReport {
        schema_version: SCHEMA_VERSION,
        command: "product-suite",
        source,
        depth: cfg.depth,
        rectangles: lifts.rectangles().len(),
        psi_invariants: psi,
        rectangle_identity_residuals: square
            .per_rectangle
            .iter()
            .map(|p| RectangleRow {
                scales: p.rect.scales(),
                index: (p.rect.i.index, p.rect.j.index),
                bracket: p.bracket,
                s_r_squared: p.s_r_squared,
                residual: p.residual,
            })
            .collect(),
        max_rectangle_residual,
        lemma_max_residual: lemma.max_residual,
        lemma_max_scale_spread: lemma.max_scale_spread,
        lemma_passed: lemma.passed,
        band_weight_decay: decay_trend(&w, 12),
        c_value: c.value,
        b_value: b.value,
        b_over_c: b.ratio_b_over_c,
        square_value: square.value,
        symbol_sup_value: symbol_sup.value,
        symbol_sup_attaining_symbol: symbol_sup.attaining_symbol,
        identity_symbol_matches,
        conjecture_value: conj.value,
        conjecture_vs_square_ratio: (square.value > 0.0).then(|| conj.value / square.value),
        warnings,
        passed,
    };
    outcome(
        passed,
        &report,
        vec![("rectangles.csv".into(), rect_table), ("lemma_table.csv".into(), lemma_csv)],
    )
}

// ---------------------------------------------------------------- corpus

#[derive(Clone, Debug)]
pub struct CorpusConfig {
    pub seed: u64,
    pub size: usize,
    /// Top frequency of the H¹ witnesses.
    pub window: usize,
    /// Cells per unit length for the conjecture study.
    pub grid: usize,
    pub depth: u32,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            size: 100,
            window: 8,
            grid: 32,
            depth: 2,
        }
    }
}

/// One band-limited sample of the conjecture study.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConjectureSample {
    pub index: usize,
    pub conjecture: f64,
    pub square: f64,
    pub ratio: Option<f64>,
    pub identity_holds: bool,
}

/// Stream separation so the conjecture corpus differs from the witness corpus.
const STUDY_STREAM: u64 = 0x5eed_0000_0000_0001;

/// Random trigonometric polynomials of top frequency 4 on the unit square:
/// conjecture functional against the spectral functional.
pub fn conjecture_study(
    w: &WaveletProfile,
    seed: u64,
    size: usize,
    cells_per_unit: usize,
    depth: u32,
) -> Result<Vec<ConjectureSample>> {
    let mut rng = seeded_rng(seed ^ STUDY_STREAM);
    let omega = OpenSetMask::unit_square();
    let pc = ProductConfig::default();
    let mut out = Vec::with_capacity(size);
    for index in 0..size {
        let spec = random_trig_poly(&mut rng, 4, 6);
        let lam = sample_for_mask(&spec, &omega, depth, cells_per_unit)?;
        let t = square_functional(&lam, w, &omega, depth, &pc)?;
        let c = conjecture_functional(&lam, w, &omega, depth)?;
        out.push(ConjectureSample {
            index,
            conjecture: c.value,
            square: t.value,
            ratio: (t.value > 0.0).then(|| c.value / t.value),
            identity_holds: t.identity_holds,
        });
    }
    Ok(out)
}

pub fn conjecture_csv(samples: &[ConjectureSample]) -> Result<String> {
    csv_table(
        &["index", "conjecture", "square", "ratio"],
        samples.iter().map(|s| {
            vec![
                s.index.to_string(),
                s.conjecture.to_string(),
                s.square.to_string(),
                opt(s.ratio),
            ]
        }),
    )
}

#[derive(Serialize)]
struct CorpusReport {
    schema_version: u32,
    command: &'static str,
    spec: CorpusSpec,
    paley_support: LacunarySupport,
    paley_ratio: Summary,
    conjecture_ratio: Summary,
    conjecture_identity_failures: usize,
    passed: bool,
}

pub fn cmd_corpus(cfg: &CorpusConfig) -> Result<Outcome> {
    let spec = CorpusSpec {
        seed: cfg.seed,
        size: cfg.size,
        k_max: cfg.window,
        grid_n: (2 * cfg.window + 2).next_power_of_two(),
    };
    let corpus = generate_corpus(spec);
    let support = LacunarySupport::diagonal(cfg.window.max(1).ilog2());
    let (ratios, paley) = paley_statistics(&corpus, &support)?;
    let w = build_psi(crate::product_bmo::wavelet::MIN_SAMPLES + 1)?;
    let study = conjecture_study(&w, cfg.seed, cfg.size, cfg.grid, cfg.depth)?;
    let conj_ratios: Vec<f64> = study.iter().filter_map(|s| s.ratio).collect();
    let failures = study.iter().filter(|s| !s.identity_holds).count();
    let paley_csv = csv_table(
        &["index", "paley_ratio"],
        ratios.iter().enumerate().map(|(i, r)| vec![i.to_string(), r.to_string()]),
    )?;
    let report = CorpusReport {
        schema_version: SCHEMA_VERSION,
        command: "corpus",
        spec,
        paley_support: support,
        paley_ratio: paley,
        conjecture_ratio: Summary::of(&conj_ratios),
        conjecture_identity_failures: failures,
        passed: failures == 0 && ratios.iter().all(|r| r.is_finite()),
    };
    outcome(
        report.passed,
        &report,
        vec![
            ("corpus.json".into(), to_json_string(&corpus)?),
            ("paley_ratios.csv".into(), paley_csv),
            ("conjecture_ratios.csv".into(), conjecture_csv(&study)?),
        ],
    )
}

// ---------------------------------------------------------------- psi-build

#[derive(Serialize)]
struct PsiReport {
    schema_version: u32,
    command: &'static str,
    samples: usize,
    exponent: u32,
    norm_const: f64,
    l1_mass: f64,
    invariants: PsiInvariants,
    passed: bool,
}

pub fn cmd_psi_build(samples: usize) -> Result<Outcome> {
    let w = build_psi(samples)?;
    let inv = psi_invariants(&w);
    let report = PsiReport {
        schema_version: SCHEMA_VERSION,
        command: "psi-build",
        samples,
        exponent: w.exponent,
        norm_const: w.norm_const,
        l1_mass: w.l1_mass(),
        passed: inv.passed,
        invariants: inv,
    };
    outcome(report.passed, &report, vec![("psi_profile.json".into(), to_json_string(&w)?)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lacunary_multiplier_has_unit_constant() {
        let cfg = MultiplierCheckConfig {
            fixture: MultiplierFixture::Lacunary,
            window: 64,
            samples: 2,
            ..Default::default()
        };
        let o = cmd_multiplier_check(&cfg).unwrap();
        assert_eq!(o.exit, EXIT_OK);
        let v: serde_json::Value = serde_json::from_str(&o.report).unwrap();
        assert_eq!(v["condition_constant"], 1.0);
    }

    #[test]
    fn ones_multiplier_witnesses() {
        let cfg = MultiplierCheckConfig {
            window: 32,
            samples: 2,
            ..Default::default()
        };
        let o = cmd_multiplier_check(&cfg).unwrap();
        assert_eq!(o.exit, EXIT_OK);
        let v: serde_json::Value = serde_json::from_str(&o.report).unwrap();
        assert_eq!(v["condition_constant"], 256.0);
        assert_eq!(v["witness_lower_bounds"].as_array().unwrap().len(), 25);
    }

    #[test]
    fn bmo_suite_on_constants_is_zero() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.json");
        std::fs::write(&p, fixtures::function_to_json(&FunctionSpec::Constant { value: [3.0, 0.0] }).unwrap()).unwrap();
        let o = cmd_bmo_suite(&BmoSuiteConfig {
            input: Some(p),
            ..Default::default()
        })
        .unwrap();
        assert_eq!(o.exit, EXIT_OK);
        let v: serde_json::Value = serde_json::from_str(&o.report).unwrap();
        for r in v["identities"].as_array().unwrap() {
            assert_eq!(r["lhs"], 0.0);
            assert_eq!(r["rhs"].as_f64().unwrap().abs() < 1e-24, true);
        }
    }

    #[test]
    fn bmo_suite_window_truncation_warns() {
        let o = cmd_bmo_suite(&BmoSuiteConfig {
            window: Some(0),
            ..Default::default()
        })
        .unwrap();
        assert_eq!(o.exit, EXIT_OK);
        let v: serde_json::Value = serde_json::from_str(&o.report).unwrap();
        assert!(!v["warnings"].as_array().unwrap().is_empty());
    }

    #[test]
    fn empty_corpus() {
        let o = cmd_corpus(&CorpusConfig {
            size: 0,
            ..Default::default()
        })
        .unwrap();
        assert_eq!(o.exit, EXIT_OK);
        let v: serde_json::Value = serde_json::from_str(&o.report).unwrap();
        assert_eq!(v["paley_ratio"]["count"], 0);
    }
}
