//! Versioned report schema and its text rendering.
//!
//! Rationals are strings (`"n"` or `"n/d"`), polynomials are coefficient
//! arrays indexed by power, and two-variable matrices are lists of nonzero
//! `(ζ-power, η-power, block)` terms, so every value is bit-exact.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::algebra::rational::format_rational;
use crate::algebra::{parse_rational, Inertia, Poly, PolyMatrix, RatMatrix};
use crate::bdf::TwoVarPolyMatrix;
use crate::harness::VerificationReport;

pub const SCHEMA_VERSION: &str = "1.0.0";

pub const CONVENTION_NOTE: &str = "Orientation: kind `dirac` reads (F, E) as a kernel, \
F(d/dz)f + E(d/dz)e = 0, with image f = Eᵀ(-d/dz)ℓ, e = Fᵀ(-d/dz)ℓ. Reading the same matrices as an \
image f = Fᵀ(d/dz)ℓ, e = Eᵀ(d/dz)ℓ gives a different structure in general: for F = [[0,s],[s,0]], \
E = I the kernel reading yields Σ = -[[0,1],[1,0]], while the image reading, available as kind \
`skew_adjoint` with f = J(d/dz)e, yields Σ = [[0,1],[1,0]].";

pub type MatrixJson = Vec<Vec<String>>;
pub type PolyMatrixJson = Vec<Vec<Vec<String>>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoVarTerm {
    pub zeta: usize,
    pub eta: usize,
    pub block: MatrixJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub name: String,
    pub passed: bool,
    pub witness: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BoundarySection {
    Dirac {
        convention: String,
        pi: Vec<TwoVarTerm>,
        z: PolyMatrixJson,
        sigma: MatrixJson,
        inertia: Inertia,
        coefficient_inertia: Inertia,
    },
    Constrained {
        pi_j: Vec<TwoVarTerm>,
        z_j: PolyMatrixJson,
        sigma_j: MatrixJson,
        inertia_j: Inertia,
        pi_g_quotient: Vec<TwoVarTerm>,
        z_g: PolyMatrixJson,
        pi_g: MatrixJson,
        v_g: PolyMatrixJson,
    },
    Lagrange {
        quotient: Vec<TwoVarTerm>,
        w: PolyMatrixJson,
        p: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitSection {
    /// `sigma`, `two_point`, `sigma_j` or `symplectic`
    pub form: String,
    pub matrix: MatrixJson,
    pub p: usize,
    pub t: Vec<Vec<f64>>,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizationSection {
    /// 1-based port indices whose effort is the input
    pub swap: Vec<usize>,
    pub searched: bool,
    pub a: MatrixJson,
    pub b: MatrixJson,
    pub c: MatrixJson,
    pub d: MatrixJson,
    pub middle: MatrixJson,
    pub lyapunov_zero: bool,
    pub coupling_zero: bool,
    pub feedthrough_zero: bool,
    pub hamiltonian_skew: Option<bool>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarnessSummary {
    pub check: String,
    pub instance: String,
    pub trials: usize,
    pub passed_trials: usize,
    /// largest exact residual in absolute value
    pub max_residual: String,
    pub max_float_residual: Option<f64>,
    pub tolerance: Option<f64>,
    pub elapsed_ms: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: String,
    pub subcommand: String,
    pub kind: String,
    pub convention_note: String,
    pub conditions: Vec<Condition>,
    pub boundary: Option<BoundarySection>,
    pub split: Option<SplitSection>,
    pub realization: Option<RealizationSection>,
    pub harness: Vec<HarnessSummary>,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
    pub passed: bool,
}

impl Report {
    pub fn new(subcommand: &str, kind: &str) -> Self {
        Report {
            schema_version: SCHEMA_VERSION.to_string(),
            subcommand: subcommand.to_string(),
            kind: kind.to_string(),
            convention_note: CONVENTION_NOTE.to_string(),
            conditions: Vec::new(),
            boundary: None,
            split: None,
            realization: None,
            harness: Vec::new(),
            failures: Vec::new(),
            notes: Vec::new(),
            passed: true,
        }
    }

    pub fn fail(&mut self, message: impl Into<String>) {
        self.failures.push(message.into());
        self.passed = false;
    }

    pub fn condition(&mut self, name: &str, passed: bool, witness: Option<String>) {
        if !passed {
            self.passed = false;
        }
        self.conditions.push(Condition {
            name: name.to_string(),
            passed,
            witness,
        });
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Report, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "boundary-forge {} ({}): {verdict}", self.subcommand, self.kind);
        for c in &self.conditions {
            let _ = write!(
                out,
                "  condition {}: {}",
                c.name,
                if c.passed { "ok" } else { "FAILED" }
            );
            if let Some(w) = &c.witness {
                let _ = write!(out, " [witness: {w}]");
            }
            out.push('\n');
        }
        if let Some(b) = &self.boundary {
            render_boundary(&mut out, b);
        }
        if let Some(s) = &self.split {
            let _ = writeln!(out, "split of {} (p = {}):", s.form, s.p);
            let _ = writeln!(out, "  T =");
            for row in &s.t {
                let cells: Vec<String> = row.iter().map(|v| format!("{v:>12.6}")).collect();
                let _ = writeln!(out, "    [{}]", cells.join(" "));
            }
            let _ = writeln!(
                out,
                "  ‖TᵀQT - M‖∞ = {:.3e} (tolerance {:.1e}): {}",
                s.residual,
                s.tolerance,
                if s.passed { "ok" } else { "FAILED" }
            );
        }
        if let Some(r) = &self.realization {
            let swap: Vec<String> = r.swap.iter().map(usize::to_string).collect();
            let _ = writeln!(
                out,
                "realization (swap {{{}}}{}):",
                swap.join(","),
                if r.searched { ", found by search" } else { "" }
            );
            for (name, m) in [("A", &r.a), ("B", &r.b), ("C", &r.c), ("D", &r.d)] {
                let _ = writeln!(out, "  {name} = {}", inline_matrix(m));
            }
            let _ = writeln!(
                out,
                "  AᵀM + MA = 0: {}, coupling: {}, feedthrough: {}{}",
                r.lyapunov_zero,
                r.coupling_zero,
                r.feedthrough_zero,
                r.hamiltonian_skew
                    .map_or(String::new(), |h| format!(", AΣ⁻¹ skew: {h}"))
            );
        }
        for h in &self.harness {
            let _ = write!(
                out,
                "harness {} [{}]: {}/{} trials exact, max residual {}",
                h.check, h.instance, h.passed_trials, h.trials, h.max_residual
            );
            if let (Some(f), Some(t)) = (h.max_float_residual, h.tolerance) {
                let _ = write!(out, ", max float residual {f:.3e} (tolerance {t:.1e})");
            }
            let _ = writeln!(out, ", {:.1} ms", h.elapsed_ms);
        }
        for f in &self.failures {
            let _ = writeln!(out, "failure: {f}");
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        if matches!(self.kind.as_str(), "dirac" | "skew_adjoint") {
            let _ = writeln!(out, "note: {}", self.convention_note);
        }
        out
    }
}

fn render_boundary(out: &mut String, b: &BoundarySection) {
    match b {
        BoundarySection::Dirac {
            convention,
            pi,
            z,
            sigma,
            inertia,
            coefficient_inertia,
        } => {
            let _ = writeln!(out, "boundary structure ({convention} image):");
            let _ = writeln!(out, "  Π(ζ,η) = {}", inline_twovar(pi));
            let _ = writeln!(out, "  Z(s) = {}", inline_polymatrix(z));
            let _ = writeln!(out, "  Σ = {}", inline_matrix(sigma));
            let _ = writeln!(out, "  inertia(Σ) = {inertia}, inertia(Π̃) = {coefficient_inertia}");
        }
        BoundarySection::Constrained {
            pi_j,
            z_j,
            sigma_j,
            inertia_j,
            pi_g_quotient,
            z_g,
            pi_g,
            v_g,
        } => {
            let _ = writeln!(out, "constrained boundary structure:");
            let _ = writeln!(out, "  Π_J(ζ,η) = {}", inline_twovar(pi_j));
            let _ = writeln!(out, "  Z_J(s) = {}", inline_polymatrix(z_j));
            let _ = writeln!(out, "  Σ_J = {} with inertia {inertia_j}", inline_matrix(sigma_j));
            let _ = writeln!(out, "  (Gᵀ(-η) - Gᵀ(ζ))/(ζ+η) = {}", inline_twovar(pi_g_quotient));
            let _ = writeln!(out, "  Z_G(s) = {}", inline_polymatrix(z_g));
            let _ = writeln!(out, "  Π_G = {}", inline_matrix(pi_g));
            let _ = writeln!(out, "  V_G(s) = {}", inline_polymatrix(v_g));
        }
        BoundarySection::Lagrange { quotient, w, p } => {
            let _ = writeln!(out, "lagrangian boundary structure (p = {p}):");
            let _ = writeln!(out, "  Θ(ζ,η)/(ζ+η) = {}", inline_twovar(quotient));
            let _ = writeln!(out, "  W(s) = {}", inline_polymatrix(w));
        }
    }
}

fn inline_matrix(m: &MatrixJson) -> String {
    let rows: Vec<String> = m.iter().map(|r| format!("[{}]", r.join(", "))).collect();
    format!("[{}]", rows.join(", "))
}

fn poly_from_json(cs: &[String]) -> Poly {
    Poly::new(
        cs.iter()
            .map(|c| parse_rational(c).expect("report rationals are canonical"))
            .collect(),
    )
}

fn inline_polymatrix(m: &PolyMatrixJson) -> String {
    let rows: Vec<String> = m
        .iter()
        .map(|r| {
            let cells: Vec<String> = r.iter().map(|p| poly_from_json(p).to_string()).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

fn inline_twovar(terms: &[TwoVarTerm]) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    let parts: Vec<String> = terms
        .iter()
        .map(|t| format!("{}·ζ^{}η^{}", inline_matrix(&t.block), t.zeta, t.eta))
        .collect();
    parts.join(" + ")
}

pub fn matrix_json(m: &RatMatrix) -> MatrixJson {
    m.to_rows()
        .iter()
        .map(|r| r.iter().map(format_rational).collect())
        .collect()
}

pub fn poly_json(p: &Poly) -> Vec<String> {
    if p.is_zero() {
        return vec!["0".to_string()];
    }
    p.coeffs().iter().map(format_rational).collect()
}

pub fn polymatrix_json(m: &PolyMatrix) -> PolyMatrixJson {
    m.to_rows().iter().map(|r| r.iter().map(poly_json).collect()).collect()
}

pub fn twovar_json(phi: &TwoVarPolyMatrix) -> Vec<TwoVarTerm> {
    phi.blocks()
        .iter()
        .map(|(&(k, l), b)| TwoVarTerm {
            zeta: k,
            eta: l,
            block: matrix_json(b),
        })
        .collect()
}

pub fn harness_summary(r: &VerificationReport) -> HarnessSummary {
    use num_traits::{Signed, Zero};
    let max = r
        .residuals
        .iter()
        .map(|x| x.abs())
        .max()
        .unwrap_or_else(crate::algebra::Rational::zero);
    let passed_trials = if r.float_residuals.is_empty() {
        r.residuals.iter().filter(|x| x.is_zero()).count()
    } else {
        r.float_residuals
            .iter()
            .filter(|x| r.tolerance.is_some_and(|t| **x <= t))
            .count()
    };
    HarnessSummary {
        check: r.check.clone(),
        instance: r.instance.clone(),
        trials: r.trials,
        passed_trials,
        max_residual: format_rational(&max),
        max_float_residual: (!r.float_residuals.is_empty()).then(|| r.max_float_residual()),
        tolerance: r.tolerance,
        elapsed_ms: r.elapsed.as_secs_f64() * 1e3,
        passed: r.passed(),
    }
}
