//! Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails. Runs as a plain binary so the lines are always printed.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use boundary_forge::algebra::{PolyMatrix, RatMatrix};
use boundary_forge::bdf::{derivative_rule_residual, TwoVarPolyMatrix};
use boundary_forge::constrained::constrained_boundary;
use boundary_forge::dirac::{
    boundary_structure, canonical_power_split, skew_adjoint_structure, split_residual, two_point_form,
    validate_dirac_pair, BoundaryStructure, DiracError,
};
use boundary_forge::harness::{
    check_constrained_form, check_dirac_form, check_lagrange_form, check_power_balance, check_realization,
    random_latent, random_rational, HarnessConfig,
};
use boundary_forge::lagrange::{lagrange_boundary, validate_lagrange_pair};
use boundary_forge::realize::{realize, verify_realization_structure, RealizationProblem, RealizeError};

use common::{constrained_instances, dirac_instances, lagrange_instances, oracle_inertia, random_unimodular};

const SPLIT_TOLERANCE: f64 = 1e-9;

type Criterion = (&'static str, Option<Duration>, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn stokes() -> PolyMatrix {
    common::pm(&[&[&[], &[0, 1]], &[&[0, 1], &[]]])
}

fn hyperbolic() -> RatMatrix {
    RatMatrix::from_ints(&[&[0, 1], &[1, 0]])
}

fn dirac(f: &PolyMatrix, e: &PolyMatrix) -> BoundaryStructure {
    boundary_structure(&validate_dirac_pair(f, e).expect("curated pair is valid")).expect("factorization")
}

fn reference_example() -> Outcome {
    let s = skew_adjoint_structure(&stokes()).unwrap();
    let h = hyperbolic();
    let pi_ok = s.pi.blocks().len() == 1 && s.pi.block(0, 0) == h;
    let passed = pi_ok && s.z == PolyMatrix::identity(2) && s.sigma == h;
    outcome(
        passed,
        format!("Π = {}, Z = {}, Σ = {}", s.pi.block(0, 0), s.z, s.sigma),
    )
}

fn signature_theorem() -> Outcome {
    let mut count = 0;
    let mut bad = Vec::new();
    let mut check = |name: String, s: &BoundaryStructure| {
        count += 1;
        let coeff = s.pi.coeff_matrix().matrix;
        let oracle = oracle_inertia(&coeff);
        if !(s.inertia.same_signature(&s.pi_coeff_inertia()) && s.inertia.same_signature(&oracle)) {
            bad.push(name);
        }
    };
    for inst in dirac_instances() {
        check(inst.name.to_string(), &dirac(&inst.f, &inst.e));
    }
    // unimodular companions of every instance whose operators stay within degree 3
    for inst in dirac_instances() {
        for seed in 0..2 {
            let u = random_unimodular(inst.f.rows(), 500 + seed);
            let (f, e) = (&u * &inst.f, &u * &inst.e);
            if f.degree().finite().unwrap_or(0).max(e.degree().finite().unwrap_or(0)) <= 3 {
                check(format!("{}·U{seed}", inst.name), &dirac(&f, &e));
            }
        }
    }
    let passed = bad.is_empty() && count >= 20;
    outcome(passed, format!("{count} instances, mismatches {bad:?}"))
}

fn power_balance() -> Outcome {
    let cfg = HarnessConfig::default();
    let mut failed = Vec::new();
    let mut trials = 0;
    for inst in dirac_instances() {
        let s = dirac(&inst.f, &inst.e);
        for report in [
            check_dirac_form(&s, inst.name, &cfg),
            check_power_balance(&s, inst.name, &cfg),
        ] {
            trials += report.trials;
            if !report.passed() || report.trials != 100 {
                failed.push(format!("{}/{}", report.check, inst.name));
            }
        }
    }
    outcome(failed.is_empty(), format!("{trials} exact trials, failing {failed:?}"))
}

fn constrained_and_lagrange_forms() -> Outcome {
    let cfg = HarnessConfig::default();
    let mut failed = Vec::new();
    let mut trials = 0;
    for (name, j, g) in constrained_instances() {
        let r = check_constrained_form(&constrained_boundary(&j, &g).unwrap(), name, &cfg);
        trials += r.trials;
        if !r.passed() || r.trials != 100 {
            failed.push(name);
        }
    }
    for (name, p, s) in lagrange_instances() {
        let b = lagrange_boundary(&validate_lagrange_pair(&p, &s).unwrap()).unwrap();
        let r = check_lagrange_form(&b, name, &cfg);
        trials += r.trials;
        if !r.passed() || r.trials != 100 {
            failed.push(name);
        }
    }
    outcome(failed.is_empty(), format!("{trials} exact trials, failing {failed:?}"))
}

fn realization() -> Outcome {
    let cfg = HarnessConfig {
        trials: 50,
        ..HarnessConfig::default()
    };
    let s = skew_adjoint_structure(&stokes()).unwrap();
    let r = realize(&RealizationProblem::from_dirac(&s), &[]).unwrap();
    let matrices = r.a.is_zero() && r.b == hyperbolic() && r.c == RatMatrix::identity(2) && r.d.is_zero();
    let structure = verify_realization_structure(&r).passed();
    let trajectories = check_realization(&r, "stokes", &cfg).passed();

    let scalar = dirac(&common::scalar(&[0, 1]), &common::scalar(&[1]));
    let problem = RealizationProblem::from_dirac(&scalar);
    let unsolvable = matches!(realize(&problem, &[]), Err(RealizeError::Unsolvable { .. }));
    let swapped = realize(&problem, &[0])
        .map(|r| verify_realization_structure(&r).passed() && check_realization(&r, "f=s", &cfg).passed());
    let passed = matrices && structure && trajectories && unsolvable && swapped == Ok(true);
    outcome(
        passed,
        format!(
            "matrices {matrices}, identities {structure}, 50 trajectories {trajectories}, unswapped unsolvable {unsolvable}, swap {{1}} {}",
            swapped.is_ok_and(|x| x)
        ),
    )
}

fn canonical_split() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut balanced = 0;
    let mut failed = Vec::new();
    for inst in dirac_instances() {
        let s = dirac(&inst.f, &inst.e);
        match canonical_power_split(&s.sigma, SPLIT_TOLERANCE) {
            Ok(split) => {
                balanced += 1;
                let r = split_residual(&split.t, split.p, &s.sigma);
                worst = worst.max(r);
                if r >= SPLIT_TOLERANCE {
                    failed.push(inst.name);
                }
            }
            Err(DiracError::UnbalancedSignature { inertia }) if !inertia.is_balanced() => {}
            Err(_) => failed.push(inst.name),
        }
        let (doubled, split) = two_point_form(&s, SPLIT_TOLERANCE);
        let r = split_residual(&split.t, split.p, &doubled);
        worst = worst.max(r);
        if r >= SPLIT_TOLERANCE {
            failed.push(inst.name);
        }
    }
    outcome(
        failed.is_empty(),
        format!("{balanced} balanced, worst ‖TᵀQT - Σ‖∞ = {worst:.2e}, failing {failed:?}"),
    )
}

fn random_phi(rng: &mut ChaCha8Rng) -> TwoVarPolyMatrix {
    let (p, q) = (rng.gen_range(1..=2), rng.gen_range(1..=2));
    let order = rng.gen_range(0..=3);
    let mut blocks = Vec::new();
    for k in 0..=order {
        for l in 0..=order {
            if rng.gen_bool(0.5) {
                let data = (0..p * q).map(|_| random_rational(rng)).collect();
                blocks.push(((k, l), RatMatrix::from_vec(p, q, data)));
            }
        }
    }
    TwoVarPolyMatrix::from_blocks(p, q, blocks)
}

fn bdf_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut derivative = 0;
    let mut division = 0;
    for t in 0..100u64 {
        let phi = random_phi(&mut rng);
        let v = random_latent(2 * t, phi.p(), 5);
        let w = random_latent(2 * t + 1, phi.q(), 5);
        if derivative_rule_residual(&phi, &v.latent, &w.latent).is_ok_and(|r| r.is_zero()) {
            derivative += 1;
        }
        if phi.mul_zeta_plus_eta().div_zeta_plus_eta().as_ref() == Ok(&phi) {
            division += 1;
        }
    }
    outcome(
        derivative == 100 && division == 100,
        format!("derivative rule {derivative}/100, div∘mul {division}/100"),
    )
}

fn unimodular_invariance() -> Outcome {
    let mut transforms = 0;
    let mut failed = Vec::new();
    for inst in dirac_instances() {
        let base = dirac(&inst.f, &inst.e);
        for seed in 0..20 {
            let u = random_unimodular(inst.f.rows(), 1000 + seed);
            let s = dirac(&(&u * &inst.f), &(&u * &inst.e));
            transforms += 1;
            let same: bool = s.boundary_dim() == base.boundary_dim() && s.inertia == base.inertia;
            if !same {
                failed.push(format!("{} seed {seed}: {} vs {}", inst.name, s.inertia, base.inertia));
            }
        }
    }
    outcome(
        failed.is_empty(),
        format!("{transforms} transforms, failing {failed:?}"),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        (
            "1 reference example exact",
            Some(Duration::from_millis(100)),
            reference_example,
        ),
        (
            "2 signature of Σ equals that of Π̃",
            Some(Duration::from_secs(5)),
            signature_theorem,
        ),
        (
            "3 pairing and power balance exact",
            Some(Duration::from_secs(10)),
            power_balance,
        ),
        (
            "4 constrained and symplectic forms exact",
            Some(Duration::from_secs(10)),
            constrained_and_lagrange_forms,
        ),
        ("5 realization", None, realization),
        ("6 canonical split", None, canonical_split),
        ("7 derivative rule and division", None, bdf_properties),
        ("8 unimodular invariance", None, unimodular_invariance),
    ];
    let mut all = true;
    for (name, limit, run) in criteria {
        let start = Instant::now();
        let o = run();
        let elapsed = start.elapsed();
        let in_time = limit.is_none_or(|l| elapsed < l);
        let passed = o.passed && in_time;
        all &= passed;
        let budget = limit.map(|l| format!(" < {l:?}")).unwrap_or_default();
        println!(
            "{} criterion {name}: {} [{elapsed:.2?}{budget}]",
            if passed { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
