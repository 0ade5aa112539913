//! Randomized exact verification on polynomial trajectories.
//!
//! Every trial draws polynomial latent variables with small rational
//! coefficients from a seeded ChaCha stream, pushes them through the operator,
//! and evaluates an identity over a random interval in exact arithmetic. The
//! exact residuals are recorded, so a passing report is a list of zeros.

use std::time::{Duration, Instant};

use crate::algebra::polymatrix::dot;
use crate::algebra::{Poly, Rational};
use crate::bdf::{derivative_rule_residual, TwoVarPolyMatrix};
use crate::constrained::{constrained_sample, prop5_form, ConstrainedError, ConstrainedStructure};
use crate::dirac::{boundary_pairing_at, BoundaryStructure, PowerSplit};
use crate::lagrange::{prop7_form, LagrangeBoundary};
use crate::realize::Realization;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const NUMERATOR_RANGE: i64 = 9;
pub const DENOMINATOR_RANGE: i64 = 9;

/// A latent polynomial trajectory on `[alpha, beta]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub latent: Vec<Poly>,
    pub alpha: Rational,
    pub beta: Rational,
}

impl Trajectory {
    pub fn new(latent: Vec<Poly>, alpha: Rational, beta: Rational) -> Self {
        Trajectory { latent, alpha, beta }
    }
}

/// Numerator in `[-9, 9]`, denominator in `[1, 9]`.
pub fn random_rational<R: Rng>(rng: &mut R) -> Rational {
    let n = rng.gen_range(-NUMERATOR_RANGE..=NUMERATOR_RANGE);
    let d = rng.gen_range(1..=DENOMINATOR_RANGE);
    Rational::new(n.into(), d.into())
}

pub fn random_poly<R: Rng>(rng: &mut R, degree: usize) -> Poly {
    Poly::new((0..=degree).map(|_| random_rational(rng)).collect())
}

/// Random `α < β`.
pub fn random_interval<R: Rng>(rng: &mut R) -> (Rational, Rational) {
    loop {
        let a = random_rational(rng);
        let b = random_rational(rng);
        if a < b {
            return (a, b);
        }
        if b < a {
            return (b, a);
        }
    }
}

pub fn random_latent(seed: u64, dim: usize, degree: usize) -> Trajectory {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let latent = (0..dim).map(|_| random_poly(&mut rng, degree)).collect();
    let (alpha, beta) = random_interval(&mut rng);
    Trajectory { latent, alpha, beta }
}

/// `∫_α^β vᵀw dz`
pub fn integrate_dot(v: &[Poly], w: &[Poly], alpha: &Rational, beta: &Rational) -> Rational {
    dot(v, w).integrate(alpha, beta)
}

/// `∫_α^β (e₁ᵀf₂ + e₂ᵀf₁) dz`
pub fn integrate_pairing(
    f1: &[Poly],
    e1: &[Poly],
    f2: &[Poly],
    e2: &[Poly],
    alpha: &Rational,
    beta: &Rational,
) -> Rational {
    integrate_dot(e1, f2, alpha, beta) + integrate_dot(e2, f1, alpha, beta)
}

/// `∫(e₁ᵀf₂ + e₂ᵀf₁) - [b₁ᵀΣb₂]_α^β`
pub fn dirac_form_residual(
    s: &BoundaryStructure,
    l1: &[Poly],
    l2: &[Poly],
    alpha: &Rational,
    beta: &Rational,
) -> Rational {
    let (f1, e1) = s.flows_efforts(l1);
    let (f2, e2) = s.flows_efforts(l2);
    integrate_pairing(&f1, &e1, &f2, &e2, alpha, beta) - boundary_pairing_at(s, l1, l2, beta)
        + boundary_pairing_at(s, l1, l2, alpha)
}

/// `∫eᵀf - ½[bᵀΣb]_α^β`
pub fn power_balance_residual(s: &BoundaryStructure, l: &[Poly], alpha: &Rational, beta: &Rational) -> Rational {
    let (f, e) = s.flows_efforts(l);
    let half = Rational::new(1.into(), 2.into());
    integrate_dot(&e, &f, alpha, beta)
        - half * (boundary_pairing_at(s, l, l, beta) - boundary_pairing_at(s, l, l, alpha))
}

/// `|∫eᵀf - [e_δᵀf_δ]_α^β|` in floating point.
pub fn power_split_residual(
    s: &BoundaryStructure,
    split: &PowerSplit,
    l: &[Poly],
    alpha: &Rational,
    beta: &Rational,
) -> f64 {
    let (f, e) = s.flows_efforts(l);
    let exact = crate::algebra::rational::to_f64(&integrate_dot(&e, &f, alpha, beta));
    let boundary = split.power(&s.boundary_at(l, beta)) - split.power(&s.boundary_at(l, alpha));
    (exact - boundary).abs()
}

#[derive(Debug, Clone, PartialEq)]
pub struct HarnessConfig {
    pub trials: usize,
    pub degrees: Vec<usize>,
    pub seed: u64,
    /// fixed `[α, β]` for every trial instead of a random one
    pub interval: Option<(Rational, Rational)>,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        HarnessConfig {
            trials: 100,
            degrees: vec![0, 2, 6],
            seed: 0,
            interval: None,
        }
    }
}

impl HarnessConfig {
    fn degree(&self, trial: usize) -> usize {
        self.degrees[trial % self.degrees.len()]
    }

    fn interval(&self, drawn: &Trajectory) -> (Rational, Rational) {
        self.interval
            .clone()
            .unwrap_or_else(|| (drawn.alpha.clone(), drawn.beta.clone()))
    }

    fn seeds(&self, trial: usize) -> (u64, u64) {
        let base = self.seed.wrapping_add(2 * trial as u64);
        (base, base.wrapping_add(1))
    }
}

/// Exact residuals of one identity over a batch of random trials.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub check: String,
    pub instance: String,
    pub trials: usize,
    pub residuals: Vec<Rational>,
    /// floating-point residuals, only for the power-split check
    pub float_residuals: Vec<f64>,
    pub tolerance: Option<f64>,
    pub elapsed: Duration,
}

impl VerificationReport {
    fn new(check: &str, instance: &str) -> Self {
        VerificationReport {
            check: check.to_string(),
            instance: instance.to_string(),
            trials: 0,
            residuals: Vec::new(),
            float_residuals: Vec::new(),
            tolerance: None,
            elapsed: Duration::ZERO,
        }
    }

    pub fn passed(&self) -> bool {
        self.residuals.iter().all(Zero::is_zero)
            && match self.tolerance {
                Some(tol) => self.float_residuals.iter().all(|r| *r <= tol),
                None => self.float_residuals.is_empty(),
            }
    }

    pub fn failures(&self) -> usize {
        self.residuals.iter().filter(|r| !r.is_zero()).count()
            + self
                .float_residuals
                .iter()
                .filter(|r| self.tolerance.is_none_or(|t| **r > t))
                .count()
    }

    pub fn max_float_residual(&self) -> f64 {
        self.float_residuals.iter().copied().fold(0.0, f64::max)
    }
}

fn timed(mut report: VerificationReport, body: impl FnOnce(&mut VerificationReport)) -> VerificationReport {
    let start = Instant::now();
    body(&mut report);
    report.elapsed = start.elapsed();
    report
}

pub fn check_dirac_form(s: &BoundaryStructure, instance: &str, cfg: &HarnessConfig) -> VerificationReport {
    timed(VerificationReport::new("dirac_form", instance), |r| {
        for t in 0..cfg.trials {
            let (s1, s2) = cfg.seeds(t);
            let d = cfg.degree(t);
            let l1 = random_latent(s1, s.latent_dim(), d);
            let l2 = random_latent(s2, s.latent_dim(), d);
            let (a, b) = cfg.interval(&l1);
            r.residuals.push(dirac_form_residual(s, &l1.latent, &l2.latent, &a, &b));
            r.trials += 1;
        }
    })
}

pub fn check_power_balance(s: &BoundaryStructure, instance: &str, cfg: &HarnessConfig) -> VerificationReport {
    timed(VerificationReport::new("power_balance", instance), |r| {
        for t in 0..cfg.trials {
            let l = random_latent(cfg.seeds(t).0, s.latent_dim(), cfg.degree(t));
            let (a, b) = cfg.interval(&l);
            r.residuals.push(power_balance_residual(s, &l.latent, &a, &b));
            r.trials += 1;
        }
    })
}

pub fn check_power_split(
    s: &BoundaryStructure,
    split: &PowerSplit,
    instance: &str,
    cfg: &HarnessConfig,
) -> VerificationReport {
    timed(VerificationReport::new("power_split", instance), |r| {
        r.tolerance = Some(split.tolerance);
        for t in 0..cfg.trials {
            let l = random_latent(cfg.seeds(t).0, s.latent_dim(), cfg.degree(t));
            let (a, b) = cfg.interval(&l);
            let (f, e) = s.flows_efforts(&l.latent);
            // relative to the size of the exchanged energy
            let scale = 1.0 + crate::algebra::rational::to_f64(&integrate_dot(&e, &f, &a, &b)).abs();
            r.float_residuals
                .push(power_split_residual(s, split, &l.latent, &a, &b) / scale);
            r.trials += 1;
        }
    })
}

/// Solutions with an empty constraint kernel fall back to `e = 0`.
pub fn check_constrained_form(s: &ConstrainedStructure, instance: &str, cfg: &HarnessConfig) -> VerificationReport {
    let sample = |degree, seed| match constrained_sample(s, degree, seed) {
        Ok(sol) => sol,
        Err(ConstrainedError::EmptyKernel { fallback, .. }) => *fallback,
        Err(e) => panic!("sampling a validated structure: {e}"),
    };
    timed(VerificationReport::new("constrained_form", instance), |r| {
        for t in 0..cfg.trials {
            let (s1, s2) = cfg.seeds(t);
            let d = cfg.degree(t);
            let a = sample(d, s1);
            let b = sample(d, s2);
            let (alpha, beta) = cfg
                .interval
                .clone()
                .unwrap_or_else(|| random_interval(&mut ChaCha8Rng::seed_from_u64(s1 ^ 0x5eed)));
            r.residuals.push(prop5_form(s, &a, &b, &alpha, &beta));
            r.trials += 1;
        }
    })
}

pub fn check_lagrange_form(b: &LagrangeBoundary, instance: &str, cfg: &HarnessConfig) -> VerificationReport {
    timed(VerificationReport::new("lagrange_form", instance), |r| {
        for t in 0..cfg.trials {
            let (s1, s2) = cfg.seeds(t);
            let d = cfg.degree(t);
            let l1 = random_latent(s1, b.latent_dim(), d);
            let l2 = random_latent(s2, b.latent_dim(), d);
            let (alpha, beta) = cfg.interval(&l1);
            r.residuals.push(prop7_form(b, &l1.latent, &l2.latent, &alpha, &beta));
            r.trials += 1;
        }
    })
}

/// Every coefficient of `x' - Ax - Bu` and `y - Cx - Du` along random
/// trajectories.
pub fn check_realization(real: &Realization, instance: &str, cfg: &HarnessConfig) -> VerificationReport {
    timed(VerificationReport::new("realization", instance), |r| {
        for t in 0..cfg.trials {
            let l = random_latent(cfg.seeds(t).0, real.z.cols(), cfg.degree(t));
            let (state, output) = real.trajectory_residuals(&l.latent);
            let worst = state
                .iter()
                .chain(&output)
                .flat_map(|p| p.coeffs().iter().cloned())
                .map(|c| if c < Rational::zero() { -c } else { c })
                .max()
                .unwrap_or_else(Rational::zero);
            r.residuals.push(worst);
            r.trials += 1;
        }
    })
}

/// `d/dz D_Φ(v,w) - D_{(ζ+η)Φ}(v,w)` over random vectors.
pub fn check_derivative_rule(phi: &TwoVarPolyMatrix, instance: &str, cfg: &HarnessConfig) -> VerificationReport {
    timed(VerificationReport::new("derivative_rule", instance), |r| {
        for t in 0..cfg.trials {
            let (s1, s2) = cfg.seeds(t);
            let d = cfg.degree(t);
            let v = random_latent(s1, phi.p(), d);
            let w = random_latent(s2, phi.q(), d);
            let res = derivative_rule_residual(phi, &v.latent, &w.latent).expect("dimensions match");
            r.residuals.push(
                res.coeffs()
                    .iter()
                    .find(|c| !c.is_zero())
                    .cloned()
                    .unwrap_or_else(Rational::zero),
            );
            r.trials += 1;
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::int;
    use crate::algebra::PolyMatrix;
    use crate::dirac::{canonical_power_split, skew_adjoint_structure, DEFAULT_SPLIT_TOLERANCE};

    #[test]
    fn random_latent_is_deterministic() {
        let a = random_latent(42, 3, 4);
        let b = random_latent(42, 3, 4);
        assert_eq!(a, b);
        assert!(a.alpha < a.beta);
        assert_ne!(a, random_latent(43, 3, 4));
        for p in &a.latent {
            for c in p.coeffs() {
                assert!(c.numer().magnitude() <= &9u32.into());
                assert!(c.denom() <= &9.into());
            }
        }
    }

    #[test]
    fn integrate_pairing_example() {
        let z = Poly::from_ints(&[0, 1]);
        let one = Poly::one();
        // ∫_0^1 (z·1 + 1·z) = 1
        let (one, z) = (std::slice::from_ref(&one), std::slice::from_ref(&z));
        assert_eq!(integrate_pairing(one, z, one, z, &int(0), &int(1)), int(1));
    }

    #[test]
    fn suites_pass_on_stokes_dirac() {
        let j = PolyMatrix::from_int_coeffs(&[&[&[], &[0, 1]], &[&[0, 1], &[]]]);
        let s = skew_adjoint_structure(&j).unwrap();
        let cfg = HarnessConfig {
            trials: 12,
            ..HarnessConfig::default()
        };
        assert!(check_dirac_form(&s, "ex1", &cfg).passed());
        assert!(check_power_balance(&s, "ex1", &cfg).passed());
        let split = canonical_power_split(&s.sigma, DEFAULT_SPLIT_TOLERANCE).unwrap();
        let rep = check_power_split(&s, &split, "ex1", &cfg);
        assert!(rep.passed(), "{}", rep.max_float_residual());
        assert!(check_derivative_rule(&s.pi, "ex1", &cfg).passed());
    }

    #[test]
    fn report_detects_nonzero_residual() {
        let mut r = VerificationReport::new("x", "y");
        r.residuals = vec![int(0), int(1)];
        assert!(!r.passed());
        assert_eq!(r.failures(), 1);
    }
}
