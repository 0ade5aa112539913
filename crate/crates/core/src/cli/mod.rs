//! Subcommand dispatch for the `boundary-forge` binary.

pub mod problem;
pub mod report;

use crate::algebra::{symplectic_unit, RatMatrix, Rational};
use crate::bdf::TwoVarPolyMatrix;
use crate::constrained::{constrained_boundary, validate_skew_adjoint, ConstrainedStructure};
use crate::dirac::{
    boundary_structure, canonical_power_split, diagnose_pair, skew_adjoint_structure, BoundaryStructure, Convention,
    DiracError, DEFAULT_SPLIT_TOLERANCE,
};
use crate::harness::{self, HarnessConfig};
use crate::lagrange::{lagrange_boundary, symmetry_residual, validate_lagrange_pair, LagrangeBoundary};
use crate::realize::{
    partition_search, realize, verify_realization_structure, Realization, RealizationProblem, RealizeError,
};

pub use problem::{parse_problem, parse_problem_str, Kind, Problem, ProblemError, ProblemFile, Settings};
pub use report::Report;

use report::{
    harness_summary, matrix_json, polymatrix_json, twovar_json, BoundarySection, RealizationSection, SplitSection,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    Check,
    Boundary,
    Split,
    Realize,
    Verify,
    Report,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Check => "check",
            Subcommand::Boundary => "boundary",
            Subcommand::Split => "split",
            Subcommand::Realize => "realize",
            Subcommand::Verify => "verify",
            Subcommand::Report => "report",
        }
    }

    fn wants_split(self) -> bool {
        matches!(self, Subcommand::Split | Subcommand::Report)
    }

    fn wants_realization(self) -> bool {
        matches!(self, Subcommand::Realize | Subcommand::Report)
    }

    fn wants_harness(self) -> bool {
        matches!(self, Subcommand::Verify | Subcommand::Report)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Flags {
    pub interval: Option<(Rational, Rational)>,
    pub trials: Option<usize>,
    pub degree: Option<usize>,
    pub seed: Option<u64>,
    /// 1-based port indices
    pub swap: Option<Vec<usize>>,
    pub two_point: bool,
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum UsageError {
    #[error("swap index {index} out of range 1..={ports}")]
    SwapOutOfRange { index: usize, ports: usize },
    #[error("subcommand {subcommand} does not apply to kind {kind}")]
    NotApplicable {
        subcommand: &'static str,
        kind: &'static str,
    },
    #[error("interval must satisfy alpha < beta")]
    EmptyInterval,
    #[error("tolerance must be positive and finite")]
    BadTolerance,
}

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub fn exit_code(result: &Result<Report, UsageError>) -> i32 {
    match result {
        Ok(r) if r.passed => EXIT_PASS,
        Ok(_) => EXIT_FAIL,
        Err(_) => EXIT_USAGE,
    }
}

struct Resolved {
    config: HarnessConfig,
    tolerance: f64,
    two_point: bool,
    swap: Option<Vec<usize>>,
}

fn resolve(file: &ProblemFile, flags: &Flags) -> Result<Resolved, UsageError> {
    let s = &file.settings;
    let interval = flags.interval.clone().or_else(|| s.interval.clone());
    if let Some((a, b)) = &interval {
        if a >= b {
            return Err(UsageError::EmptyInterval);
        }
    }
    let tolerance = flags.tolerance.or(s.tolerance).unwrap_or(DEFAULT_SPLIT_TOLERANCE);
    if !(tolerance.is_finite() && tolerance > 0.0) {
        return Err(UsageError::BadTolerance);
    }
    let defaults = HarnessConfig::default();
    let config = HarnessConfig {
        trials: flags.trials.or(s.trials).unwrap_or(defaults.trials),
        degrees: flags.degree.or(s.degree).map_or(defaults.degrees, |d| vec![d]),
        seed: flags.seed.or(s.seed).unwrap_or(defaults.seed),
        interval,
    };
    let swap = match &flags.swap {
        None => None,
        Some(idx) => {
            let ports = ports(&file.problem);
            let mut out = Vec::with_capacity(idx.len());
            for &i in idx {
                if i == 0 || i > ports {
                    return Err(UsageError::SwapOutOfRange { index: i, ports });
                }
                out.push(i - 1);
            }
            Some(out)
        }
    };
    Ok(Resolved {
        config,
        tolerance,
        two_point: flags.two_point,
        swap,
    })
}

fn ports(p: &Problem) -> usize {
    match p {
        Problem::Dirac { f, .. } => f.rows(),
        Problem::SkewAdjoint { j } | Problem::Constrained { j, .. } => j.rows(),
        Problem::Lagrange { p, .. } => p.rows(),
    }
}

pub fn run(cmd: Subcommand, file: &ProblemFile, flags: &Flags) -> Result<Report, UsageError> {
    let kind = file.problem.kind();
    if cmd == Subcommand::Realize && kind == Kind::Constrained {
        return Err(UsageError::NotApplicable {
            subcommand: cmd.name(),
            kind: kind.name(),
        });
    }
    let resolved = resolve(file, flags)?;
    let mut report = Report::new(cmd.name(), kind.name());
    match &file.problem {
        Problem::Dirac { f, e } => {
            let d = diagnose_pair(f, e).expect("shapes checked at parse time");
            report.condition(
                "skew",
                d.skew_ok(),
                (!d.skew_ok()).then(|| format!("F(-s)Eᵀ(s) + E(-s)Fᵀ(s) = {}", d.skew_residual)),
            );
            report.condition(
                "rank",
                d.rank_ok(),
                (!d.rank_ok()).then(|| minors_witness(d.minors_gcd.as_ref())),
            );
            if report.passed && cmd != Subcommand::Check {
                let pair = crate::dirac::validate_dirac_pair(f, e).expect("conditions hold");
                match boundary_structure(&pair) {
                    Ok(s) => dirac_pipeline(cmd, &s, &resolved, &mut report),
                    Err(err) => report.fail(err.to_string()),
                }
            }
        }
        Problem::SkewAdjoint { j } => {
            let c = validate_skew_adjoint(j);
            report.condition("skew_adjoint", c.ok, (!c.ok).then(|| skew_adjoint_witness(j)));
            if report.passed && cmd != Subcommand::Check {
                match skew_adjoint_structure(j) {
                    Ok(s) => dirac_pipeline(cmd, &s, &resolved, &mut report),
                    Err(err) => report.fail(err.to_string()),
                }
            }
        }
        Problem::Constrained { j, g } => {
            let c = validate_skew_adjoint(j);
            report.condition("skew_adjoint", c.ok, (!c.ok).then(|| skew_adjoint_witness(j)));
            if report.passed && cmd != Subcommand::Check {
                match constrained_boundary(j, g) {
                    Ok(s) => constrained_pipeline(cmd, &s, &resolved, &mut report),
                    Err(err) => report.fail(err.to_string()),
                }
            }
        }
        Problem::Lagrange { p, s } => {
            let residual = symmetry_residual(p, s);
            report.condition(
                "symmetry",
                residual.is_zero(),
                (!residual.is_zero()).then(|| format!("Pᵀ(-s)S(s) - Sᵀ(-s)P(s) = {residual}")),
            );
            let gcd = p.transpose().hstack(&s.transpose()).minors_gcd();
            let rank_ok = gcd.as_ref().is_some_and(|g| g.is_constant());
            report.condition("rank", rank_ok, (!rank_ok).then(|| minors_witness(gcd.as_ref())));
            if report.passed && cmd != Subcommand::Check {
                let pair = validate_lagrange_pair(p, s).expect("conditions hold");
                match lagrange_boundary(&pair) {
                    Ok(b) => lagrange_pipeline(cmd, &b, &resolved, &mut report),
                    Err(err) => report.fail(err.to_string()),
                }
            }
        }
    }
    Ok(report)
}

fn skew_adjoint_witness(j: &crate::algebra::PolyMatrix) -> String {
    format!("J(s) + Jᵀ(-s) = {}", crate::dirac::skew_adjoint_residual(j))
}

fn minors_witness(gcd: Option<&crate::algebra::Poly>) -> String {
    match gcd {
        Some(g) => format!("gcd of maximal minors = {g}"),
        None => "all maximal minors vanish".to_string(),
    }
}

fn recheck(report: &mut Report, ok: bool, what: &str) {
    if !ok {
        report.fail(format!("reconstruction identity failed for {what}"));
    }
}

fn dirac_pipeline(cmd: Subcommand, s: &BoundaryStructure, r: &Resolved, report: &mut Report) {
    recheck(report, s.pi.mul_zeta_plus_eta() == s.pairing, "(ζ+η)Π = Φ");
    recheck(
        report,
        TwoVarPolyMatrix::from_factors_with_middle(&s.z, &s.sigma, &s.z) == s.pi,
        "Π = Zᵀ(ζ)ΣZ(η)",
    );
    let coefficient_inertia = s.pi_coeff_inertia();
    recheck(
        report,
        coefficient_inertia.same_signature(&s.inertia),
        "inertia(Σ) = inertia(Π̃)",
    );
    report.boundary = Some(BoundarySection::Dirac {
        convention: match s.convention {
            Convention::KernelPair => "kernel_pair".into(),
            Convention::SkewAdjoint => "skew_adjoint".into(),
        },
        pi: twovar_json(&s.pi),
        z: polymatrix_json(&s.z),
        sigma: matrix_json(&s.sigma),
        inertia: s.inertia,
        coefficient_inertia,
    });

    if cmd.wants_split() {
        let auto = cmd == Subcommand::Report && !s.inertia.is_balanced() && !r.two_point;
        if auto {
            report.notes.push(format!(
                "Σ has unbalanced inertia {}; reporting the two-point form",
                s.inertia
            ));
        }
        split_section(report, &s.sigma, r, auto, "sigma");
    }
    if cmd.wants_realization() {
        let problem = RealizationProblem::from_dirac(s);
        realization_section(report, &problem, r);
    }
    if cmd.wants_harness() {
        let cfg = &r.config;
        let inst = report.kind.clone();
        let mut reports = vec![
            harness::check_dirac_form(s, &inst, cfg),
            harness::check_power_balance(s, &inst, cfg),
            harness::check_derivative_rule(&s.pi, &inst, cfg),
        ];
        if s.inertia.is_balanced() {
            if let Ok(split) = canonical_power_split(&s.sigma, r.tolerance) {
                reports.push(harness::check_power_split(s, &split, &inst, cfg));
            }
        }
        push_harness(report, &reports);
    }
}

fn constrained_pipeline(cmd: Subcommand, s: &ConstrainedStructure, r: &Resolved, report: &mut Report) {
    recheck(
        report,
        s.pi_j.mul_zeta_plus_eta() == s.j_pairing,
        "(ζ+η)Π_J = Jᵀ(ζ) + J(η)",
    );
    recheck(
        report,
        TwoVarPolyMatrix::from_factors_with_middle(&s.z_j, &s.sigma_j, &s.z_j) == s.pi_j,
        "Π_J = Z_Jᵀ(ζ)Σ_J Z_J(η)",
    );
    recheck(
        report,
        s.pi_g_quotient.mul_zeta_plus_eta() == s.g_pairing,
        "(ζ+η)Q_G = Gᵀ(-η) - Gᵀ(ζ)",
    );
    recheck(
        report,
        TwoVarPolyMatrix::from_factors_with_middle(&s.z_g, &s.pi_g, &s.v_g) == s.pi_g_quotient,
        "Q_G = Z_Gᵀ(ζ)Π_G V_G(η)",
    );
    report.boundary = Some(BoundarySection::Constrained {
        pi_j: twovar_json(&s.pi_j),
        z_j: polymatrix_json(&s.z_j),
        sigma_j: matrix_json(&s.sigma_j),
        inertia_j: s.inertia_j,
        pi_g_quotient: twovar_json(&s.pi_g_quotient),
        z_g: polymatrix_json(&s.z_g),
        pi_g: matrix_json(&s.pi_g),
        v_g: polymatrix_json(&s.v_g),
    });
    if cmd.wants_split() {
        let auto = cmd == Subcommand::Report && !s.inertia_j.is_balanced() && !r.two_point;
        if auto {
            report.notes.push(format!(
                "Σ_J has unbalanced inertia {}; reporting the two-point form",
                s.inertia_j
            ));
        }
        split_section(report, &s.sigma_j, r, auto, "sigma_j");
    }
    if cmd == Subcommand::Report {
        report
            .notes
            .push("realization is not defined for constrained systems; skipped".into());
    }
    if cmd.wants_harness() {
        let inst = report.kind.clone();
        push_harness(report, &[harness::check_constrained_form(s, &inst, &r.config)]);
    }
}

fn lagrange_pipeline(cmd: Subcommand, b: &LagrangeBoundary, r: &Resolved, report: &mut Report) {
    recheck(report, b.quotient.mul_zeta_plus_eta() == b.theta, "(ζ+η)Q = Θ");
    recheck(
        report,
        TwoVarPolyMatrix::from_factors_with_middle(&b.w, &symplectic_unit(b.p), &b.w) == b.quotient,
        "Q = Wᵀ(ζ)J_p W(η)",
    );
    report.boundary = Some(BoundarySection::Lagrange {
        quotient: twovar_json(&b.quotient),
        w: polymatrix_json(&b.w),
        p: b.p,
    });
    if cmd.wants_split() {
        let n = 2 * b.p;
        let t: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        report.split = Some(SplitSection {
            form: "symplectic".into(),
            matrix: matrix_json(&symplectic_unit(b.p)),
            p: b.p,
            t,
            residual: 0.0,
            tolerance: r.tolerance,
            passed: true,
        });
        report
            .notes
            .push("W(d/dz)ℓ is already split into (x_δ, e_δ) with J_p = [[0,I],[-I,0]]".into());
    }
    if cmd.wants_realization() {
        realization_section(report, &RealizationProblem::from_lagrange(b), r);
    }
    if cmd.wants_harness() {
        let inst = report.kind.clone();
        push_harness(report, &[harness::check_lagrange_form(b, &inst, &r.config)]);
    }
}

/// `auto` forces the two-point form without the flag.
fn split_section(report: &mut Report, sigma: &RatMatrix, r: &Resolved, auto: bool, form: &str) {
    let (form, matrix, result) = if auto || r.two_point {
        let neg = -sigma;
        let doubled = RatMatrix::block_diag(&[sigma, &neg]);
        let split = canonical_power_split(&doubled, r.tolerance);
        ("two_point", doubled, split)
    } else {
        (form, sigma.clone(), canonical_power_split(sigma, r.tolerance))
    };
    match result {
        Ok(split) => {
            let passed = split.residual < split.tolerance;
            if !passed {
                report.fail(format!(
                    "split residual {:.3e} exceeds tolerance {:.1e}",
                    split.residual, split.tolerance
                ));
            }
            report.split = Some(SplitSection {
                form: form.into(),
                matrix: matrix_json(&matrix),
                p: split.p,
                t: split.t,
                residual: split.residual,
                tolerance: split.tolerance,
                passed,
            });
        }
        Err(DiracError::UnbalancedSignature { inertia }) => {
            report.fail(format!(
                "UnbalancedSignature: inertia {inertia}; no boundary power variables (use --two-point)"
            ));
        }
        Err(e) => report.fail(e.to_string()),
    }
}

fn realization_section(report: &mut Report, problem: &RealizationProblem, r: &Resolved) {
    let (result, searched): (Result<Realization, RealizeError>, bool) = match &r.swap {
        Some(swap) => (realize(problem, swap), false),
        None => (partition_search(problem), true),
    };
    match result {
        Ok(real) => {
            let sr = verify_realization_structure(&real);
            let passed = sr.passed();
            if !passed {
                report.fail("realization violates its structural identities");
            }
            report.realization = Some(RealizationSection {
                swap: real.swap.iter().map(|k| k + 1).collect(),
                searched,
                a: matrix_json(&real.a),
                b: matrix_json(&real.b),
                c: matrix_json(&real.c),
                d: matrix_json(&real.d),
                middle: matrix_json(&real.middle),
                lyapunov_zero: sr.lyapunov.is_zero(),
                coupling_zero: sr.coupling.is_zero(),
                feedthrough_zero: sr.feedthrough.is_zero(),
                hamiltonian_skew: sr.hamiltonian.as_ref().map(RatMatrix::is_zero),
                passed,
            });
            let inst = report.kind.clone();
            let consistency = harness::check_realization(&real, &inst, &r.config);
            push_harness(report, &[consistency]);
        }
        Err(RealizeError::NoneFound { ports, attempts }) => {
            let tried: Vec<String> = attempts
                .iter()
                .map(|(swap, e)| {
                    let one_based: Vec<String> = swap.iter().map(|k| (k + 1).to_string()).collect();
                    format!("{{{}}}: {e}", one_based.join(","))
                })
                .collect();
            report.fail(format!(
                "no partition of the {ports} ports admits a realization; tried {}",
                tried.join("; ")
            ));
        }
        Err(e) => report.fail(e.to_string()),
    }
}

fn push_harness(report: &mut Report, reports: &[crate::harness::VerificationReport]) {
    for vr in reports {
        let summary = harness_summary(vr);
        if !summary.passed {
            report.fail(format!("harness check {} failed on {} trials", vr.check, vr.failures()));
        }
        report.harness.push(summary);
    }
}
