//! On-disk fixture formats. Every JSON file carries `schema_version`.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::classical_bmo::MeasureAtoms;
use crate::product_bmo::dyadic::OpenSetMask;
use crate::product_bmo::wavelet::WaveletProfile;
use crate::spectral::{GridSpec, SampledFunction2D};
use crate::torus_multipliers::{LacunarySupport, MultiplierGrid};
use crate::{Error, Result, SCHEMA_VERSION};

pub fn schema_version() -> u32 {
    SCHEMA_VERSION
}

fn check_version(v: u32, location: &str) -> Result<()> {
    if v == 0 || v > SCHEMA_VERSION {
        return Err(Error::Parse {
            location: location.into(),
            message: format!("unsupported schema_version {v} (this build reads up to {SCHEMA_VERSION})"),
        });
    }
    Ok(())
}

fn json_error(location: &str, e: serde_json::Error) -> Error {
    Error::Parse {
        location: format!("{location}:{}:{}", e.line(), e.column()),
        message: e.to_string(),
    }
}

fn parse_json<T: DeserializeOwned>(text: &str, location: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| json_error(location, e))
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn read(path: &Path) -> Result<String> {
    Ok(std::fs::read_to_string(path)?)
}

#[derive(Debug, Deserialize)]
struct CsvRow {
    m: usize,
    n: usize,
    re: f64,
    im: f64,
}

/// Multiplier from CSV with header `m,n,re,im`. The window is the smallest one holding
/// every listed index; unlisted entries are zero.
pub fn multiplier_from_csv(text: &str, location: &str) -> Result<MultiplierGrid> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| csv_error(location, e))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["m", "n", "re", "im"] {
        return Err(Error::Parse {
            location: format!("{location}:1"),
            message: format!("expected header m,n,re,im, found {}", headers.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let mut entries = Vec::new();
    for rec in rdr.deserialize::<CsvRow>() {
        let row = rec.map_err(|e| csv_error(location, e))?;
        if !row.re.is_finite() || !row.im.is_finite() {
            return Err(Error::Parse {
                location: format!("{location}: entry ({}, {})", row.m, row.n),
                message: "non-finite value".into(),
            });
        }
        entries.push(row);
    }
    let rows = entries.iter().map(|r| r.m + 1).max().unwrap_or(0);
    let cols = entries.iter().map(|r| r.n + 1).max().unwrap_or(0);
    let mut seen = vec![false; rows * cols];
    let mut lam = MultiplierGrid::zeros(rows, cols);
    for r in entries {
        if std::mem::replace(&mut seen[r.m * cols + r.n], true) {
            return Err(Error::Parse {
                location: format!("{location}: entry ({}, {})", r.m, r.n),
                message: "duplicate index".into(),
            });
        }
        lam.set(r.m, r.n, Complex64::new(r.re, r.im));
    }
    Ok(lam)
}

fn csv_error(location: &str, e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line().to_string()).unwrap_or_else(|| "?".into());
    Error::Parse {
        location: format!("{location}:{line}"),
        message: e.to_string(),
    }
}

pub fn multiplier_to_csv(lam: &MultiplierGrid) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["m", "n", "re", "im"]).map_err(|e| csv_error("<memory>", e))?;
    for m in 0..lam.rows {
        for n in 0..lam.cols {
            let v = lam.get(m, n);
            w.write_record([m.to_string(), n.to_string(), v.re.to_string(), v.im.to_string()])
                .map_err(|e| csv_error("<memory>", e))?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[derive(Debug, Serialize, Deserialize)]
struct MultiplierFile {
    schema_version: u32,
    rows: usize,
    cols: usize,
    /// Row-major `[re, im]` pairs.
    values: Vec<[f64; 2]>,
}

pub fn multiplier_from_json(text: &str, location: &str) -> Result<MultiplierGrid> {
    let f: MultiplierFile = parse_json(text, location)?;
    check_version(f.schema_version, location)?;
    MultiplierGrid::new(f.rows, f.cols, f.values.iter().map(|v| Complex64::new(v[0], v[1])).collect()).map_err(|e| {
        Error::Parse {
            location: location.into(),
            message: e.to_string(),
        }
    })
}

pub fn multiplier_to_json(lam: &MultiplierGrid) -> Result<String> {
    to_json_string(&MultiplierFile {
        schema_version: SCHEMA_VERSION,
        rows: lam.rows,
        cols: lam.cols,
        values: lam.values().iter().map(|v| [v.re, v.im]).collect(),
    })
}

/// Reads `.csv` as CSV and anything else as JSON.
pub fn load_multiplier(path: &Path) -> Result<MultiplierGrid> {
    let text = read(path)?;
    let loc = path.display().to_string();
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        multiplier_from_csv(&text, &loc)
    } else {
        multiplier_from_json(&text, &loc)
    }
}

/// `c · e^{2πi(k₁x₁ + k₂x₂)}`; `freq` is in cycles per unit length.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub freq: [f64; 2],
    pub coeff: [f64; 2],
}

/// A function on the plane or torus, given analytically or by samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionSpec {
    TrigPoly { terms: Vec<TrigTerm> },
    Constant { value: [f64; 2] },
    Samples { grid: GridSpec, values: Vec<[f64; 2]> },
}

impl FunctionSpec {
    pub fn eval(&self, x1: f64, x2: f64) -> Option<Complex64> {
        match self {
            FunctionSpec::TrigPoly { terms } => Some(
                terms
                    .iter()
                    .map(|t| {
                        Complex64::new(t.coeff[0], t.coeff[1])
                            * Complex64::from_polar(1.0, 2.0 * PI * (t.freq[0] * x1 + t.freq[1] * x2))
                    })
                    .sum(),
            ),
            FunctionSpec::Constant { value } => Some(Complex64::new(value[0], value[1])),
            FunctionSpec::Samples { .. } => None,
        }
    }

    /// Samples on `grid`; sampled fixtures must already live on that grid.
    pub fn sample(&self, grid: &GridSpec) -> Result<SampledFunction2D> {
        match self {
            FunctionSpec::Samples { grid: g, values } => {
                if g != grid {
                    return Err(Error::InvalidGrid(format!("fixture grid {g:?} differs from requested {grid:?}")));
                }
                SampledFunction2D::new(g.clone(), values.iter().map(|v| Complex64::new(v[0], v[1])).collect())
            }
            _ => SampledFunction2D::from_fn(grid.clone(), |a, b| self.eval(a, b).expect("analytic fixture")),
        }
    }

    /// The grid of a sampled fixture.
    pub fn own_grid(&self) -> Option<&GridSpec> {
        match self {
            FunctionSpec::Samples { grid, .. } => Some(grid),
            _ => None,
        }
    }

    pub fn from_samples(f: &SampledFunction2D) -> Self {
        FunctionSpec::Samples {
            grid: f.grid().clone(),
            values: f.values().iter().map(|v| [v.re, v.im]).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionFile {
    pub schema_version: u32,
    pub function: FunctionSpec,
}

pub fn function_from_json(text: &str, location: &str) -> Result<FunctionSpec> {
    let f: FunctionFile = parse_json(text, location)?;
    check_version(f.schema_version, location)?;
    Ok(f.function)
}

pub fn function_to_json(f: &FunctionSpec) -> Result<String> {
    to_json_string(&FunctionFile {
        schema_version: SCHEMA_VERSION,
        function: f.clone(),
    })
}

pub fn load_function(path: &Path) -> Result<FunctionSpec> {
    function_from_json(&read(path)?, &path.display().to_string())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureFile {
    pub schema_version: u32,
    pub atoms: MeasureAtoms,
}

pub fn load_measure(path: &Path) -> Result<MeasureAtoms> {
    let loc = path.display().to_string();
    let f: MeasureFile = parse_json(&read(path)?, &loc)?;
    check_version(f.schema_version, &loc)?;
    Ok(f.atoms)
}

#[derive(Deserialize)]
struct VersionOnly {
    #[serde(default = "schema_version")]
    schema_version: u32,
}

pub fn load_mask(path: &Path) -> Result<OpenSetMask> {
    let loc = path.display().to_string();
    let text = read(path)?;
    check_version(parse_json::<VersionOnly>(&text, &loc)?.schema_version, &loc)?;
    parse_json(&text, &loc)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportFile {
    pub schema_version: u32,
    pub points: LacunarySupport,
}

pub fn load_support(path: &Path) -> Result<LacunarySupport> {
    let loc = path.display().to_string();
    let f: SupportFile = parse_json(&read(path)?, &loc)?;
    check_version(f.schema_version, &loc)?;
    Ok(f.points)
}

/// Load a profile and recheck it against a fresh build.
pub fn load_profile(path: &Path) -> Result<WaveletProfile> {
    let loc = path.display().to_string();
    let w: WaveletProfile = parse_json(&read(path)?, &loc)?;
    check_version(w.schema_version, &loc)?;
    w.validate()?;
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let lam = MultiplierGrid::from_fn(3, 4, |m, n| Complex64::new(m as f64 - 0.5, n as f64 * 0.25));
        let text = multiplier_to_csv(&lam).unwrap();
        assert!(text.starts_with("m,n,re,im\n"));
        assert_eq!(multiplier_from_csv(&text, "t").unwrap(), lam);
    }

    #[test]
    fn csv_sparse_entries_fill_with_zero() {
        let lam = multiplier_from_csv("m,n,re,im\n2,1,1.0,0\n", "t").unwrap();
        assert_eq!((lam.rows, lam.cols), (3, 2));
        assert_eq!(lam.get(2, 1), Complex64::new(1.0, 0.0));
        assert_eq!(lam.get(0, 0), Complex64::default());
    }

    #[test]
    fn malformed_csv_reports_location() {
        for bad in ["m,n,re,im\n0,0,1.0\n", "m,n,re,im\n0,x,1,0\n", "a,b,c,d\n0,0,1,0\n", "m,n,re,im\n0,0,1,0\n0,0,2,0\n"] {
            match multiplier_from_csv(bad, "lam.csv") {
                Err(Error::Parse { location, .. }) => assert!(location.starts_with("lam.csv")),
                other => panic!("{bad:?} gave {other:?}"),
            }
        }
    }

    #[test]
    fn json_round_trip_and_version_check() {
        let lam = MultiplierGrid::from_fn(2, 2, |m, n| Complex64::new(m as f64, -(n as f64)));
        let text = multiplier_to_json(&lam).unwrap();
        assert_eq!(multiplier_from_json(&text, "t").unwrap(), lam);
        let future = text.replace("\"schema_version\": 1", "\"schema_version\": 99");
        assert!(matches!(multiplier_from_json(&future, "t"), Err(Error::Parse { .. })));
        assert!(matches!(multiplier_from_json("{\"rows\": 1", "t"), Err(Error::Parse { .. })));
    }

    #[test]
    fn function_fixture_kinds() {
        let g = GridSpec::torus(8, 8).unwrap();
        let trig = FunctionSpec::TrigPoly {
            terms: vec![TrigTerm {
                freq: [1.0 / (2.0 * PI), 0.0],
                coeff: [2.0, 0.0],
            }],
        };
        let text = function_to_json(&trig).unwrap();
        let back = function_from_json(&text, "t").unwrap();
        let f = back.sample(&g).unwrap();
        let x = g.x1(3);
        assert!((f.get(3, 5) - Complex64::from_polar(2.0, x)).norm() < 1e-14);
        let s = FunctionSpec::from_samples(&f);
        assert_eq!(s.sample(&g).unwrap(), f);
        assert!(s.sample(&GridSpec::torus(4, 4).unwrap()).is_err());
        let c = FunctionSpec::Constant { value: [1.0, -1.0] };
        assert!(c.sample(&g).unwrap().values().iter().all(|v| *v == Complex64::new(1.0, -1.0)));
    }
}
