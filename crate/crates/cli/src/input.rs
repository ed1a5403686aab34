//! Channel specification files (TOML, `schema_version = "1"`).
//!
//! ```toml
//! schema_version = "1"
//! kind = "gaussian"        # or "finite", "eb"
//! s_A = 1
//! s_B = 1
//! K = [2.0, 0.0, 0.0, 2.0] # (2 s_A) x (2 s_B), row-major
//! mu = [3.0, 0.0, 0.0, 3.0]
//! ```
//!
//! Complex matrices are row-major with real and imaginary parts
//! interleaved. `finite` files give `d_A`, `d_B` and either `choi`
//! (`(d_B d_A)²` entries, B-major) or `kraus` (a list of `d_B × d_A`
//! operators). `eb` files give `povm` (`d_A × d_A` elements) and `states`
//! (`d_B × d_B` density matrices), paired by position.

use std::path::Path;

use gausscj::matkernel::{DenseMatrix, RealMatrix};
use nalgebra::{Complex, DMatrix};
use serde::Deserialize;

use crate::report::{Section, Value, SCHEMA_VERSION};
use crate::CliError;

/// Largest allowed asymmetry of `mu` in the file.
pub const MU_SYMMETRY: f64 = 1e-10;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GaussianFile {
    #[allow(dead_code)]
    schema_version: String,
    #[allow(dead_code)]
    kind: String,
    #[serde(rename = "s_A")]
    s_a: usize,
    #[serde(rename = "s_B")]
    s_b: usize,
    #[serde(rename = "K")]
    k: Vec<f64>,
    mu: Vec<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FiniteFile {
    #[allow(dead_code)]
    schema_version: String,
    #[allow(dead_code)]
    kind: String,
    #[serde(rename = "d_A")]
    d_a: usize,
    #[serde(rename = "d_B")]
    d_b: usize,
    choi: Option<Vec<f64>>,
    kraus: Option<Vec<Vec<f64>>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EbFile {
    #[allow(dead_code)]
    schema_version: String,
    #[allow(dead_code)]
    kind: String,
    #[serde(rename = "d_A")]
    d_a: usize,
    #[serde(rename = "d_B")]
    d_b: usize,
    povm: Vec<Vec<f64>>,
    states: Vec<Vec<f64>>,
}

#[derive(Clone, Debug)]
pub enum FiniteData {
    Choi(DenseMatrix<f64>),
    Kraus(Vec<DenseMatrix<f64>>),
}

#[derive(Clone, Debug)]
pub enum ChannelSpec {
    Gaussian { s_a: usize, s_b: usize, k: RealMatrix<f64>, mu: RealMatrix<f64> },
    Finite { d_a: usize, d_b: usize, data: FiniteData },
    Eb { d_a: usize, d_b: usize, povm: Vec<DenseMatrix<f64>>, states: Vec<DenseMatrix<f64>> },
}

fn parse_err(msg: impl Into<String>) -> CliError {
    CliError::Parse(msg.into())
}

fn real_matrix(name: &str, v: &[f64], rows: usize, cols: usize) -> Result<RealMatrix<f64>, CliError> {
    if v.len() != rows * cols {
        return Err(parse_err(format!("{name} has {} entries, expected {rows}x{cols} = {}", v.len(), rows * cols)));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(parse_err(format!("{name} has a non-finite entry")));
    }
    Ok(DMatrix::from_row_slice(rows, cols, v))
}

fn complex_matrix(name: &str, v: &[f64], rows: usize, cols: usize) -> Result<DenseMatrix<f64>, CliError> {
    if v.len() != 2 * rows * cols {
        return Err(parse_err(format!(
            "{name} has {} numbers, expected 2 x {rows}x{cols} = {} (interleaved re, im)",
            v.len(),
            2 * rows * cols
        )));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(parse_err(format!("{name} has a non-finite entry")));
    }
    Ok(DMatrix::from_fn(rows, cols, |i, j| {
        let at = 2 * (i * cols + j);
        Complex::new(v[at], v[at + 1])
    }))
}

fn positive(name: &str, n: usize) -> Result<usize, CliError> {
    if n == 0 {
        Err(parse_err(format!("{name} must be at least 1")))
    } else {
        Ok(n)
    }
}

pub fn parse(text: &str) -> Result<ChannelSpec, CliError> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| parse_err(e.message().to_owned()))?;
    match table.get("schema_version").and_then(|v| v.as_str()) {
        Some(SCHEMA_VERSION) => {}
        Some(other) => return Err(parse_err(format!("unsupported schema_version {other:?} (expected \"1\")"))),
        None => return Err(parse_err("missing schema_version")),
    }
    let kind = table.get("kind").and_then(|v| v.as_str()).ok_or_else(|| parse_err("missing kind"))?;
    let de = |e: toml::de::Error| parse_err(e.message().to_owned());
    match kind {
        "gaussian" => {
            let f: GaussianFile = table.clone().try_into().map_err(de)?;
            let (s_a, s_b) = (positive("s_A", f.s_a)?, positive("s_B", f.s_b)?);
            let k = real_matrix("K", &f.k, 2 * s_a, 2 * s_b)?;
            let mu = real_matrix("mu", &f.mu, 2 * s_b, 2 * s_b)?;
            let asym = (&mu - mu.transpose()).abs().max();
            if asym > MU_SYMMETRY {
                return Err(parse_err(format!("mu is not symmetric (max |mu - mu^T| = {asym:e} > {MU_SYMMETRY:e})")));
            }
            let mu = (&mu + mu.transpose()).scale(0.5);
            Ok(ChannelSpec::Gaussian { s_a, s_b, k, mu })
        }
        "finite" => {
            let f: FiniteFile = table.clone().try_into().map_err(de)?;
            let (d_a, d_b) = (positive("d_A", f.d_a)?, positive("d_B", f.d_b)?);
            let data = match (f.choi, f.kraus) {
                (Some(c), None) => FiniteData::Choi(complex_matrix("choi", &c, d_b * d_a, d_b * d_a)?),
                (None, Some(ks)) => {
                    if ks.is_empty() {
                        return Err(parse_err("kraus list is empty"));
                    }
                    FiniteData::Kraus(
                        ks.iter()
                            .enumerate()
                            .map(|(l, v)| complex_matrix(&format!("kraus[{l}]"), v, d_b, d_a))
                            .collect::<Result<_, _>>()?,
                    )
                }
                _ => return Err(parse_err("finite spec needs exactly one of choi or kraus")),
            };
            Ok(ChannelSpec::Finite { d_a, d_b, data })
        }
        "eb" => {
            let f: EbFile = table.clone().try_into().map_err(de)?;
            let (d_a, d_b) = (positive("d_A", f.d_a)?, positive("d_B", f.d_b)?);
            if f.povm.len() != f.states.len() || f.povm.is_empty() {
                return Err(parse_err(format!(
                    "povm has {} elements and states has {}; need equal, nonzero lengths",
                    f.povm.len(),
                    f.states.len()
                )));
            }
            let povm = f
                .povm
                .iter()
                .enumerate()
                .map(|(a, v)| complex_matrix(&format!("povm[{a}]"), v, d_a, d_a))
                .collect::<Result<_, _>>()?;
            let states = f
                .states
                .iter()
                .enumerate()
                .map(|(a, v)| complex_matrix(&format!("states[{a}]"), v, d_b, d_b))
                .collect::<Result<_, _>>()?;
            Ok(ChannelSpec::Eb { d_a, d_b, povm, states })
        }
        other => Err(parse_err(format!("unknown kind {other:?} (expected gaussian, finite or eb)"))),
    }
}

pub fn read(path: &Path) -> Result<ChannelSpec, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| parse_err(format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}

pub fn real_rows(m: &RealMatrix<f64>) -> Value {
    Value::Rows(m.row_iter().map(|r| r.iter().copied().collect()).collect())
}

pub fn complex_rows(m: &DenseMatrix<f64>) -> Value {
    Value::Rows(m.row_iter().map(|r| r.iter().flat_map(|z| [z.re, z.im]).collect()).collect())
}

/// Row-major interleaved form used in spec files.
pub fn complex_flat(m: &DenseMatrix<f64>) -> Vec<f64> {
    m.row_iter().flat_map(|r| r.iter().flat_map(|z| [z.re, z.im]).collect::<Vec<_>>()).collect()
}

/// The `[input]` section echoing a parsed spec.
pub fn echo(spec: &ChannelSpec) -> Section {
    let mut s = Section::new("input");
    match spec {
        ChannelSpec::Gaussian { s_a, s_b, k, mu } => {
            s.put("kind", "gaussian").put("s_A", *s_a).put("s_B", *s_b).put("K", real_rows(k)).put("mu", real_rows(mu));
        }
        ChannelSpec::Finite { d_a, d_b, data } => {
            s.put("kind", "finite").put("d_A", *d_a).put("d_B", *d_b);
            match data {
                FiniteData::Choi(c) => {
                    s.put("choi", complex_rows(c));
                }
                FiniteData::Kraus(ks) => {
                    s.put("kraus", Value::Rows(ks.iter().map(complex_flat).collect()));
                }
            }
        }
        ChannelSpec::Eb { d_a, d_b, povm, states } => {
            s.put("kind", "eb")
                .put("d_A", *d_a)
                .put("d_B", *d_b)
                .put("povm", Value::Rows(povm.iter().map(complex_flat).collect()))
                .put("states", Value::Rows(states.iter().map(complex_flat).collect()));
        }
    }
    s
}
