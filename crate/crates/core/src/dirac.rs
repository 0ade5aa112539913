//! Dirac structures defined by a kernel pair `F(d/dz) f + E(d/dz) e = 0`.
//!
//! The pipeline validates the pair, picks an image representation
//! `(f, e) = (N_f(d/dz) ℓ, N_e(d/dz) ℓ)`, forms the two-variable matrix of the
//! pairing `e₁ᵀf₂ + e₂ᵀf₁` in the latent variables, divides it by `(ζ+η)` and
//! factors the quotient as `Zᵀ(ζ) Σ Z(η)`. Then
//!
//! ```text
//! d/dz (b₁ᵀ Σ b₂) = e₁ᵀ f₂ + e₂ᵀ f₁,   b = Z(d/dz) ℓ.
//! ```
//!
//! Orientation: the image of a kernel pair is taken as
//! `N_f(s) = Eᵀ(-s)`, `N_e(s) = Fᵀ(-s)`, which is the exact annihilator of
//! `[F(s) E(s)]`. Reading `(F, E)` as an image `f = Fᵀ(d/dz) ℓ`,
//! `e = Eᵀ(d/dz) ℓ` instead describes a different structure in general. For
//! `F = [[0,s],[s,0]]`, `E = I` the kernel reading gives `Σ = -[[0,1],[1,0]]`
//! and the image reading, [`skew_adjoint_structure`], gives `Σ = [[0,1],[1,0]]`.
// Errors carry exact witnesses; they are built once on a cold path.
#![allow(clippy::result_large_err)]

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::algebra::matrix::bilinear;
use crate::algebra::{
    inertia, inertia_congruence, polymatrix::eval_vec, AlgebraError, CongruenceBlock, Inertia, Poly, PolyMatrix,
    RatMatrix, Rational,
};
use crate::bdf::{BdfError, TwoVarPolyMatrix};
use crate::harness::Trajectory;

pub const DEFAULT_SPLIT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DiracError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("skew condition fails: F(-s)Eᵀ(s) + E(-s)Fᵀ(s) = {residual}")]
    SkewConditionFailed { residual: PolyMatrix },
    #[error("rank condition fails: gcd of maximal minors of [F E] is {}", minors_gcd.as_ref().map_or("0 (all minors vanish)".to_string(), |g| g.to_string()))]
    RankConditionFailed { minors_gcd: Option<Poly> },
    #[error("operator is not formally skew-adjoint: J(s) + Jᵀ(-s) = {residual}")]
    NotSkewAdjoint { residual: PolyMatrix },
    #[error("signature of Σ is unbalanced, inertia {inertia}")]
    UnbalancedSignature { inertia: Inertia },
    #[error("trajectory intervals do not abut: first ends at {left_end}, second starts at {right_start}")]
    IntervalsDoNotAbut { left_end: Rational, right_start: Rational },
    #[error(transparent)]
    Bdf(#[from] BdfError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Which image representation a structure was built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// `N_f = Eᵀ(-s)`, `N_e = Fᵀ(-s)`.
    KernelPair,
    /// `e = ℓ`, `f = J(d/dz) ℓ`.
    SkewAdjoint,
}

/// Outcome of the two algebraic conditions on a pair, both always evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct PairDiagnostics {
    /// `F(-s)Eᵀ(s) + E(-s)Fᵀ(s)`
    pub skew_residual: PolyMatrix,
    /// gcd of the maximal minors of `[F(s) E(s)]`, `None` if all vanish
    pub minors_gcd: Option<Poly>,
}

impl PairDiagnostics {
    pub fn skew_ok(&self) -> bool {
        self.skew_residual.is_zero()
    }

    pub fn rank_ok(&self) -> bool {
        self.minors_gcd.as_ref().is_some_and(Poly::is_constant)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiracPair {
    f: PolyMatrix,
    e: PolyMatrix,
}

impl DiracPair {
    pub fn f(&self) -> &PolyMatrix {
        &self.f
    }

    pub fn e(&self) -> &PolyMatrix {
        &self.e
    }

    pub fn size(&self) -> usize {
        self.f.rows()
    }
}

/// `(f, e) = (N_f(d/dz) ℓ, N_e(d/dz) ℓ)`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageRep {
    pub nf: PolyMatrix,
    pub ne: PolyMatrix,
}

impl ImageRep {
    pub fn stacked(&self) -> PolyMatrix {
        self.nf.vstack(&self.ne)
    }

    pub fn flows(&self, latent: &[Poly]) -> Vec<Poly> {
        self.nf.apply(latent)
    }

    pub fn efforts(&self, latent: &[Poly]) -> Vec<Poly> {
        self.ne.apply(latent)
    }

    /// Two-variable matrix of `e₁ᵀf₂ + e₂ᵀf₁` in the latent variables.
    pub fn pairing_form(&self) -> TwoVarPolyMatrix {
        &TwoVarPolyMatrix::outer(&self.ne.transpose(), &self.nf)
            + &TwoVarPolyMatrix::outer(&self.nf.transpose(), &self.ne)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryStructure {
    pub pair: DiracPair,
    pub rep: ImageRep,
    pub convention: Convention,
    /// `Φ_∂(ζ,η)`, the pairing form, equal to `(ζ+η) Π(ζ,η)`
    pub pairing: TwoVarPolyMatrix,
    pub pi: TwoVarPolyMatrix,
    /// boundary map, `n × m`
    pub z: PolyMatrix,
    pub sigma: RatMatrix,
    pub inertia: Inertia,
}

impl BoundaryStructure {
    pub fn latent_dim(&self) -> usize {
        self.z.cols()
    }

    pub fn boundary_dim(&self) -> usize {
        self.z.rows()
    }

    pub fn flows_efforts(&self, latent: &[Poly]) -> (Vec<Poly>, Vec<Poly>) {
        (self.rep.flows(latent), self.rep.efforts(latent))
    }

    /// `b(z) = Z(d/dz) ℓ(z)`
    pub fn boundary(&self, latent: &[Poly]) -> Vec<Poly> {
        self.z.apply(latent)
    }

    pub fn boundary_at(&self, latent: &[Poly], point: &Rational) -> Vec<Rational> {
        eval_vec(&self.boundary(latent), point)
    }

    /// Inertia of the coefficient matrix of `Π`.
    pub fn pi_coeff_inertia(&self) -> Inertia {
        inertia(&self.pi.coeff_matrix().matrix).expect("Π is symmetric")
    }
}

/// Real boundary power variables: `Tᵀ Q_p T ≈ Σ` with `Q_p = [[0,I_p],[I_p,0]]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerSplit {
    pub t: Vec<Vec<f64>>,
    pub p: usize,
    pub residual: f64,
    pub tolerance: f64,
}

impl PowerSplit {
    /// `(f_δ, e_δ)` from an exact boundary vector `b`, via `T b`.
    pub fn split(&self, b: &[Rational]) -> (Vec<f64>, Vec<f64>) {
        let bf: Vec<f64> = b.iter().map(crate::algebra::rational::to_f64).collect();
        let x: Vec<f64> = self
            .t
            .iter()
            .map(|row| row.iter().zip(&bf).map(|(a, b)| a * b).sum())
            .collect();
        (x[..self.p].to_vec(), x[self.p..].to_vec())
    }

    /// `e_δᵀ f_δ` at a boundary vector.
    pub fn power(&self, b: &[Rational]) -> f64 {
        let (f, e) = self.split(b);
        f.iter().zip(&e).map(|(a, b)| a * b).sum()
    }
}

/// `F(-s)Eᵀ(s) + E(-s)Fᵀ(s)` and the rank test on `[F E]`.
pub fn diagnose_pair(f: &PolyMatrix, e: &PolyMatrix) -> Result<PairDiagnostics, DiracError> {
    if f.rows() != f.cols() || f.shape() != e.shape() {
        return Err(DiracError::Shape(format!(
            "F is {}×{} and E is {}×{}; both must be square of equal size",
            f.rows(),
            f.cols(),
            e.rows(),
            e.cols()
        )));
    }
    let skew_residual = &(&f.para_conjugate() * &e.transpose()) + &(&e.para_conjugate() * &f.transpose());
    let minors_gcd = f.hstack(e).minors_gcd();
    Ok(PairDiagnostics {
        skew_residual,
        minors_gcd,
    })
}

pub fn validate_dirac_pair(f: &PolyMatrix, e: &PolyMatrix) -> Result<DiracPair, DiracError> {
    let d = diagnose_pair(f, e)?;
    if !d.skew_ok() {
        return Err(DiracError::SkewConditionFailed {
            residual: d.skew_residual,
        });
    }
    if !d.rank_ok() {
        return Err(DiracError::RankConditionFailed {
            minors_gcd: d.minors_gcd,
        });
    }
    Ok(DiracPair {
        f: f.clone(),
        e: e.clone(),
    })
}

/// `N_f(s) = Eᵀ(-s)`, `N_e(s) = Fᵀ(-s)`.
pub fn image_representation(pair: &DiracPair) -> ImageRep {
    let rep = ImageRep {
        nf: pair.e.transpose().para_conjugate(),
        ne: pair.f.transpose().para_conjugate(),
    };
    let annihilated = &(&pair.f * &rep.nf) + &(&pair.e * &rep.ne);
    assert!(annihilated.is_zero(), "[F E] N must vanish for a valid pair");
    assert!(
        rep.stacked().transpose().full_rank_everywhere(),
        "image representation must have full rank everywhere"
    );
    rep
}

fn structure_from_rep(pair: DiracPair, rep: ImageRep, convention: Convention) -> Result<BoundaryStructure, DiracError> {
    let pairing = rep.pairing_form();
    let pi = pairing.div_zeta_plus_eta()?;
    let fact = pi.factor_symmetric()?;
    Ok(BoundaryStructure {
        pair,
        rep,
        convention,
        pairing,
        pi,
        z: fact.z,
        sigma: fact.sigma,
        inertia: fact.inertia,
    })
}

pub fn boundary_structure(pair: &DiracPair) -> Result<BoundaryStructure, DiracError> {
    let rep = image_representation(pair);
    structure_from_rep(pair.clone(), rep, Convention::KernelPair)
}

/// `J(s) + Jᵀ(-s)`, zero iff `J` is formally skew-adjoint.
pub fn skew_adjoint_residual(j: &PolyMatrix) -> PolyMatrix {
    j + &j.transpose().para_conjugate()
}

/// Entry point for `f = J(d/dz) e` with `e` as the latent variable.
pub fn skew_adjoint_structure(j: &PolyMatrix) -> Result<BoundaryStructure, DiracError> {
    if j.rows() != j.cols() {
        return Err(DiracError::Shape(format!(
            "J is {}×{}, must be square",
            j.rows(),
            j.cols()
        )));
    }
    let residual = skew_adjoint_residual(j);
    if !residual.is_zero() {
        return Err(DiracError::NotSkewAdjoint { residual });
    }
    let m = j.rows();
    // f - J e = 0
    let pair = validate_dirac_pair(&PolyMatrix::identity(m), &-j)?;
    let rep = ImageRep {
        nf: j.clone(),
        ne: PolyMatrix::identity(m),
    };
    structure_from_rep(pair, rep, Convention::SkewAdjoint)
}

/// Real congruence to `Q_p`, built from the exact rational congruence of `Σ`
/// plus square-root scalings and `(e_a ± e_b)/√2` pairings.
pub fn canonical_power_split(sigma: &RatMatrix, tolerance: f64) -> Result<PowerSplit, DiracError> {
    let cong = inertia_congruence(sigma)?;
    if !cong.inertia.is_balanced() {
        return Err(DiracError::UnbalancedSignature { inertia: cong.inertia });
    }
    let n = sigma.rows();
    let p = n / 2;
    let u_inv = cong.transform.inverse().expect("congruence transform is invertible");
    let mut x = u_inv.to_f64();

    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut positives = Vec::new();
    let mut negatives = Vec::new();
    let mut idx = 0;
    for block in &cong.blocks {
        match block {
            CongruenceBlock::Scalar(d) => {
                let s = crate::algebra::rational::to_f64(d).abs().sqrt();
                // row scaling by 1/s on the inverse side
                for v in x[idx].iter_mut() {
                    *v *= s;
                }
                if d > &Rational::zero() {
                    positives.push(idx);
                } else {
                    negatives.push(idx);
                }
                idx += 1;
            }
            CongruenceBlock::Hyperbolic(c) => {
                let cf = crate::algebra::rational::to_f64(c);
                for v in x[idx + 1].iter_mut() {
                    *v *= cf;
                }
                pairs.push((idx, idx + 1));
                idx += 2;
            }
        }
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for (&a, &b) in positives.iter().zip(&negatives) {
        let (ra, rb) = (x[a].clone(), x[b].clone());
        x[a] = ra.iter().zip(&rb).map(|(u, v)| (u + v) * r).collect();
        x[b] = ra.iter().zip(&rb).map(|(u, v)| (u - v) * r).collect();
        pairs.push((a, b));
    }
    pairs.sort_unstable();
    let mut t = vec![vec![0.0; n]; n];
    for (j, &(first, second)) in pairs.iter().enumerate() {
        t[j] = x[first].clone();
        t[p + j] = x[second].clone();
    }
    let residual = split_residual(&t, p, sigma);
    Ok(PowerSplit {
        t,
        p,
        residual,
        tolerance,
    })
}

/// `‖Tᵀ Q_p T - Σ‖∞` (maximum absolute row sum).
pub fn split_residual(t: &[Vec<f64>], p: usize, sigma: &RatMatrix) -> f64 {
    let n = sigma.rows();
    let s = sigma.to_f64();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    // (Tᵀ Q T)_{ij} = Σ_k T_{k,i} T_{k+p,j} + T_{k+p,i} T_{k,j}
                    let q: f64 = (0..p).map(|k| t[k][i] * t[p + k][j] + t[p + k][i] * t[k][j]).sum();
                    (q - s[i][j]).abs()
                })
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}

/// `blockdiag(Σ, -Σ)` on `(b(β); b(α))`, which is always balanced.
pub fn two_point_form(structure: &BoundaryStructure, tolerance: f64) -> (RatMatrix, PowerSplit) {
    let neg = -&structure.sigma;
    let doubled = RatMatrix::block_diag(&[&structure.sigma, &neg]);
    let split = canonical_power_split(&doubled, tolerance).expect("doubled form is balanced");
    (doubled, split)
}

/// Whether two solutions on `[α,γ]` and `[γ,β]` glue at `γ`, i.e.
/// `b₁(γ) = b₂(γ)`.
pub fn concatenation_compatible(
    structure: &BoundaryStructure,
    left: &Trajectory,
    right: &Trajectory,
) -> Result<bool, DiracError> {
    if left.beta != right.alpha {
        return Err(DiracError::IntervalsDoNotAbut {
            left_end: left.beta.clone(),
            right_start: right.alpha.clone(),
        });
    }
    let gamma = &left.beta;
    Ok(structure.boundary_at(&left.latent, gamma) == structure.boundary_at(&right.latent, gamma))
}

/// `b₁ᵀ Σ b₂` at a point.
pub fn boundary_pairing_at(structure: &BoundaryStructure, l1: &[Poly], l2: &[Poly], point: &Rational) -> Rational {
    if structure.boundary_dim() == 0 {
        return Rational::zero();
    }
    bilinear(
        &structure.boundary_at(l1, point),
        &structure.sigma,
        &structure.boundary_at(l2, point),
    )
}
