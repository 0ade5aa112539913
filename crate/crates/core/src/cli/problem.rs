//! Problem files: JSON with a `kind` and coefficient-array matrices.
//!
//! ```json
//! {"kind": "skew_adjoint", "J": [[["0"], ["0","1"]], [["0","1"], ["0"]]]}
//! ```
//!
//! Each matrix entry is an array of rational strings indexed by the power of
//! `s`. Optional keys: `interval` (two rationals), `degree`, `trials`, `seed`,
//! `tolerance`.

use std::path::Path;

use serde::Deserialize;

use crate::algebra::rational::ParseRationalError;
use crate::algebra::{parse_rational, Poly, PolyMatrix, Rational};

#[derive(Debug, thiserror::Error)]
pub enum ProblemError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("field {field}: {source}")]
    Parse { field: String, source: ParseRationalError },
    #[error("shape error: {0}")]
    Shape(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Dirac,
    SkewAdjoint,
    Constrained,
    Lagrange,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Dirac => "dirac",
            Kind::SkewAdjoint => "skew_adjoint",
            Kind::Constrained => "constrained",
            Kind::Lagrange => "lagrange",
        }
    }
}

type RawMatrix = Vec<Vec<Vec<String>>>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    kind: Kind,
    #[serde(rename = "F")]
    f: Option<RawMatrix>,
    #[serde(rename = "E")]
    e: Option<RawMatrix>,
    #[serde(rename = "J")]
    j: Option<RawMatrix>,
    #[serde(rename = "G")]
    g: Option<RawMatrix>,
    #[serde(rename = "P")]
    p: Option<RawMatrix>,
    #[serde(rename = "S")]
    s: Option<RawMatrix>,
    interval: Option<[String; 2]>,
    degree: Option<usize>,
    trials: Option<usize>,
    seed: Option<u64>,
    tolerance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Problem {
    Dirac { f: PolyMatrix, e: PolyMatrix },
    SkewAdjoint { j: PolyMatrix },
    Constrained { j: PolyMatrix, g: PolyMatrix },
    Lagrange { p: PolyMatrix, s: PolyMatrix },
}

impl Problem {
    pub fn kind(&self) -> Kind {
        match self {
            Problem::Dirac { .. } => Kind::Dirac,
            Problem::SkewAdjoint { .. } => Kind::SkewAdjoint,
            Problem::Constrained { .. } => Kind::Constrained,
            Problem::Lagrange { .. } => Kind::Lagrange,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub interval: Option<(Rational, Rational)>,
    pub degree: Option<usize>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemFile {
    pub problem: Problem,
    pub settings: Settings,
}

pub fn parse_problem(path: &Path) -> Result<ProblemFile, ProblemError> {
    let text = std::fs::read_to_string(path).map_err(|source| ProblemError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_problem_str(&text)
}

pub fn parse_problem_str(text: &str) -> Result<ProblemFile, ProblemError> {
    let raw: RawProblem = serde_json::from_str(text).map_err(|e| ProblemError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let kind = raw.kind;
    let present = [
        ("F", raw.f.is_some()),
        ("E", raw.e.is_some()),
        ("J", raw.j.is_some()),
        ("G", raw.g.is_some()),
        ("P", raw.p.is_some()),
        ("S", raw.s.is_some()),
    ];
    let expected: &[&str] = match kind {
        Kind::Dirac => &["F", "E"],
        Kind::SkewAdjoint => &["J"],
        Kind::Constrained => &["J", "G"],
        Kind::Lagrange => &["P", "S"],
    };
    for (name, here) in present {
        if here && !expected.contains(&name) {
            return Err(ProblemError::Shape(format!(
                "matrix {name} is not used by kind {}",
                kind.name()
            )));
        }
    }
    let need = |m: Option<RawMatrix>, name: &str| -> Result<RawMatrix, ProblemError> {
        m.ok_or_else(|| ProblemError::Shape(format!("kind {} requires matrix {name}", kind.name())))
    };
    let problem = match kind {
        Kind::Dirac => {
            let f = matrix(&need(raw.f, "F")?, "F", None)?;
            let e = matrix(&need(raw.e, "E")?, "E", None)?;
            square(&f, "F")?;
            same_shape(&f, "F", &e, "E")?;
            Problem::Dirac { f, e }
        }
        Kind::SkewAdjoint => {
            let j = matrix(&need(raw.j, "J")?, "J", None)?;
            square(&j, "J")?;
            Problem::SkewAdjoint { j }
        }
        Kind::Constrained => {
            let j = matrix(&need(raw.j, "J")?, "J", None)?;
            square(&j, "J")?;
            let g = matrix(&raw.g.unwrap_or_default(), "G", Some(j.rows()))?;
            if g.cols() != j.rows() {
                return Err(ProblemError::Shape(format!(
                    "G is {}×{} but J is {}×{}; G needs {} columns",
                    g.rows(),
                    g.cols(),
                    j.rows(),
                    j.cols(),
                    j.rows()
                )));
            }
            Problem::Constrained { j, g }
        }
        Kind::Lagrange => {
            let p = matrix(&need(raw.p, "P")?, "P", None)?;
            let s = matrix(&need(raw.s, "S")?, "S", None)?;
            square(&p, "P")?;
            same_shape(&p, "P", &s, "S")?;
            Problem::Lagrange { p, s }
        }
    };
    let interval = match raw.interval {
        Some([a, b]) => {
            let a = rational(&a, "interval[0]")?;
            let b = rational(&b, "interval[1]")?;
            if a >= b {
                return Err(ProblemError::Shape("interval must satisfy alpha < beta".into()));
            }
            Some((a, b))
        }
        None => None,
    };
    Ok(ProblemFile {
        problem,
        settings: Settings {
            interval,
            degree: raw.degree,
            trials: raw.trials,
            seed: raw.seed,
            tolerance: raw.tolerance,
        },
    })
}

fn rational(text: &str, field: &str) -> Result<Rational, ProblemError> {
    parse_rational(text).map_err(|source| ProblemError::Parse {
        field: field.to_string(),
        source,
    })
}

/// `cols_if_empty` fixes the column count of a matrix with no rows.
fn matrix(raw: &RawMatrix, name: &str, cols_if_empty: Option<usize>) -> Result<PolyMatrix, ProblemError> {
    if raw.is_empty() {
        return Ok(PolyMatrix::zeros(0, cols_if_empty.unwrap_or(0)));
    }
    let cols = raw[0].len();
    let mut rows = Vec::with_capacity(raw.len());
    for (i, row) in raw.iter().enumerate() {
        if row.len() != cols {
            return Err(ProblemError::Shape(format!(
                "{name} row {i} has {} entries, row 0 has {cols}",
                row.len()
            )));
        }
        let mut out = Vec::with_capacity(cols);
        for (j, entry) in row.iter().enumerate() {
            let coeffs = entry
                .iter()
                .enumerate()
                .map(|(k, c)| rational(c, &format!("{name}[{i}][{j}][{k}]")))
                .collect::<Result<Vec<_>, _>>()?;
            out.push(Poly::new(coeffs));
        }
        rows.push(out);
    }
    if cols == 0 {
        return Ok(PolyMatrix::zeros(raw.len(), 0));
    }
    Ok(PolyMatrix::from_rows(rows))
}

fn square(m: &PolyMatrix, name: &str) -> Result<(), ProblemError> {
    if m.rows() != m.cols() {
        return Err(ProblemError::Shape(format!(
            "{name} is {}×{}, must be square",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

fn same_shape(a: &PolyMatrix, an: &str, b: &PolyMatrix, bn: &str) -> Result<(), ProblemError> {
    if a.shape() != b.shape() {
        return Err(ProblemError::Shape(format!(
            "{an} is {}×{} but {bn} is {}×{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(())
}
