//! Seeded random test corpora.
//!
//! All generators draw from a ChaCha8 stream so a seed fixes every artifact bit for bit.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fixtures::{FunctionSpec, TrigTerm};
use crate::spectral::{fft2, GridSpec, SampledFunction2D};
use crate::torus_multipliers::{paley_ratio, LacunarySupport, MultiplierGrid};
use crate::{Error, Result, SCHEMA_VERSION};

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn normal_complex<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Trigonometric polynomial with spectrum in the quadrant `[0, k_max]²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct H1Witness {
    pub k_max: usize,
    /// Row-major `[re, im]` coefficients of `e^{i(mx₁ + nx₂)}`.
    pub coeffs: Vec<[f64; 2]>,
}

impl H1Witness {
    pub fn random<R: Rng>(rng: &mut R, k_max: usize) -> Self {
        let side = k_max + 1;
        let coeffs = (0..side * side)
            .map(|_| {
                let c = normal_complex(rng);
                [c.re, c.im]
            })
            .collect();
        Self { k_max, coeffs }
    }

    /// Samples on the `n × n` grid of `[0, 2π)²`, scaled to unit `L¹` mean.
    pub fn sample(&self, n: usize) -> Result<SampledFunction2D> {
        if n < 2 * self.k_max + 2 {
            return Err(Error::UnderResolved(format!(
                "frequency {} on a grid of {n} points per axis",
                self.k_max
            )));
        }
        let side = self.k_max + 1;
        let mut buf = vec![Complex64::default(); n * n];
        for m in 0..side {
            for k in 0..side {
                let c = self.coeffs[m * side + k];
                buf[m * n + k] = Complex64::new(c[0], c[1]);
            }
        }
        fft2(&mut buf, n, n, true);
        let f = SampledFunction2D::new(GridSpec::torus(n, n)?, buf)?;
        let l1 = f.l1_mean();
        if l1 == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(f.scaled(Complex64::new(1.0 / l1, 0.0)))
    }
}

/// `Σ c e^{2πi(k·x)}` with `terms` integer frequencies drawn from `[−k_max, k_max]²`.
pub fn random_trig_poly<R: Rng>(rng: &mut R, k_max: i64, terms: usize) -> FunctionSpec {
    let terms = (0..terms)
        .map(|_| {
            let c = normal_complex(rng);
            TrigTerm {
                freq: [rng.random_range(-k_max..=k_max) as f64, rng.random_range(-k_max..=k_max) as f64],
                coeff: [c.re, c.im],
            }
        })
        .collect();
    FunctionSpec::TrigPoly { terms }
}

/// A multiplier on `rows × cols` drawn from one of three families: bounded random
/// entries, a random lacunary indicator, or entries decaying across dyadic blocks.
pub fn random_multiplier<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> MultiplierGrid {
    match rng.random_range(0..3) {
        0 => {
            let vals: Vec<Complex64> = (0..rows * cols)
                .map(|_| Complex64::from_polar(rng.random::<f64>(), rng.random_range(0.0..std::f64::consts::TAU)))
                .collect();
            MultiplierGrid::new(rows, cols, vals).expect("finite entries")
        }
        1 => {
            let top = rows.max(cols).max(2).ilog2();
            let mut pts = Vec::new();
            for j in 0..=top {
                if rng.random_bool(0.7) {
                    pts.push((1u64 << j, 1u64 << rng.random_range(0..=top)));
                }
            }
            let support = LacunarySupport::new(pts).expect("lacunary by construction");
            MultiplierGrid::indicator(rows, cols, &support)
        }
        _ => {
            let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            MultiplierGrid::from_fn(rows, cols, |m, n| {
                Complex64::from_polar(1.0 / ((1 + m) * (1 + n)) as f64, phase * (m + n) as f64)
            })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub seed: u64,
    pub size: usize,
    pub k_max: usize,
    pub grid_n: usize,
}

/// H¹ witnesses plus the generator parameters that produced them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub schema_version: u32,
    pub spec: CorpusSpec,
    pub witnesses: Vec<H1Witness>,
}

pub fn generate_corpus(spec: CorpusSpec) -> Corpus {
    let mut rng = seeded_rng(spec.seed);
    let witnesses = (0..spec.size).map(|_| H1Witness::random(&mut rng, spec.k_max)).collect();
    Corpus {
        schema_version: SCHEMA_VERSION,
        spec,
        witnesses,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub mean: Option<f64>,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        if values.is_empty() {
            return Self {
                count: 0,
                min: None,
                max: None,
                mean: None,
            };
        }
        Self {
            count: values.len(),
            min: Some(values.iter().cloned().fold(f64::INFINITY, f64::min)),
            max: Some(values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)),
            mean: Some(values.iter().sum::<f64>() / values.len() as f64),
        }
    }
}

/// Paley ratios of every witness against `support`, in corpus order.
pub fn paley_statistics(corpus: &Corpus, support: &LacunarySupport) -> Result<(Vec<f64>, Summary)> {
    let ratios = corpus
        .witnesses
        .par_iter()
        .map(|w| paley_ratio(&w.sample(corpus.spec.grid_n)?, support))
        .collect::<Result<Vec<_>>>()?;
    let summary = Summary::of(&ratios);
    Ok((ratios, summary))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus_multipliers::{h1_membership, ForbiddenSet};

    #[test]
    fn seeds_fix_the_corpus() {
        let spec = CorpusSpec {
            seed: 7,
            size: 5,
            k_max: 4,
            grid_n: 16,
        };
        assert_eq!(generate_corpus(spec), generate_corpus(spec));
        let other = generate_corpus(CorpusSpec { seed: 8, ..spec });
        assert_ne!(generate_corpus(spec), other);
    }

    #[test]
    fn witnesses_are_normalised_hardy_functions() {
        let mut rng = seeded_rng(1);
        let w = H1Witness::random(&mut rng, 5);
        let f = w.sample(16).unwrap();
        assert!((f.l1_mean() - 1.0).abs() < 1e-12);
        assert!(h1_membership(&f, ForbiddenSet::Either).unwrap().pass);
        assert!(w.sample(11).is_err());
    }

    #[test]
    fn paley_ratios_are_finite() {
        let corpus = generate_corpus(CorpusSpec {
            seed: 3,
            size: 20,
            k_max: 8,
            grid_n: 32,
        });
        let (r, s) = paley_statistics(&corpus, &LacunarySupport::diagonal(3)).unwrap();
        assert_eq!(r.len(), 20);
        assert!(s.max.unwrap().is_finite() && s.min.unwrap() > 0.0);
        let (r, s) = paley_statistics(&generate_corpus(CorpusSpec { size: 0, ..corpus.spec }), &LacunarySupport::diagonal(3)).unwrap();
        assert!(r.is_empty() && s.max.is_none());
    }

    #[test]
    fn multipliers_have_the_requested_window() {
        let mut rng = seeded_rng(11);
        for _ in 0..12 {
            let lam = random_multiplier(&mut rng, 16, 8);
            assert_eq!((lam.rows, lam.cols), (16, 8));
            assert!(lam.values().iter().all(|v| v.norm() <= 1.0 + 1e-15));
        }
    }
}
