//! Constrained skew-adjoint systems
//!
//! ```text
//! f = J(d/dz) e + Gᵀ(-d/dz) λ,   0 = G(d/dz) e
//! ```
//!
//! with `J` formally skew-adjoint. The pairing splits into a `J` part, factored
//! like a Dirac structure, and a `G` part `Gᵀ(-η) - Gᵀ(ζ)` that is generally
//! not symmetric and is factored as `Z_Gᵀ(ζ) Π_G V_G(η)` with `Π_G = I`.

use serde::{Deserialize, Serialize};

use crate::algebra::matrix::bilinear;
use crate::algebra::polymatrix::eval_vec;
use crate::algebra::{polynomial_kernel_basis, Inertia, Poly, PolyMatrix, RatMatrix, Rational};
use crate::bdf::{BdfError, TwoVarPolyMatrix};
use crate::dirac::skew_adjoint_residual;
use crate::harness::{integrate_pairing, random_poly, random_rational};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConstrainedError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("operator is not formally skew-adjoint: J(s) + Jᵀ(-s) = {residual}")]
    NotSkewAdjoint { residual: PolyMatrix },
    #[error("G(d/dz) e = 0 has only the zero solution up to degree {degree}; returned λ-only solution")]
    EmptyKernel {
        degree: usize,
        fallback: Box<ConstrainedSolution>,
    },
    #[error(transparent)]
    Bdf(#[from] BdfError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkewAdjointCheck {
    pub ok: bool,
    /// `J(s) + Jᵀ(-s)` rendered per entry
    pub residual: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstrainedStructure {
    pub j: PolyMatrix,
    pub g: PolyMatrix,
    /// `Jᵀ(ζ) + J(η)`
    pub j_pairing: TwoVarPolyMatrix,
    pub pi_j: TwoVarPolyMatrix,
    pub z_j: PolyMatrix,
    pub sigma_j: RatMatrix,
    pub inertia_j: Inertia,
    /// `Gᵀ(-η) - Gᵀ(ζ)`
    pub g_pairing: TwoVarPolyMatrix,
    pub pi_g_quotient: TwoVarPolyMatrix,
    pub z_g: PolyMatrix,
    pub pi_g: RatMatrix,
    pub v_g: PolyMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstrainedSolution {
    pub e: Vec<Poly>,
    pub lambda: Vec<Poly>,
    pub f: Vec<Poly>,
}

impl ConstrainedStructure {
    pub fn size(&self) -> usize {
        self.j.rows()
    }

    pub fn constraints(&self) -> usize {
        self.g.rows()
    }

    /// `f = J(d/dz) e + Gᵀ(-d/dz) λ`
    pub fn flows(&self, e: &[Poly], lambda: &[Poly]) -> Vec<Poly> {
        let fj = self.j.apply(e);
        let fg = self.g.transpose().para_conjugate().apply(lambda);
        fj.iter().zip(&fg).map(|(a, b)| a + b).collect()
    }

    pub fn solution(&self, e: Vec<Poly>, lambda: Vec<Poly>) -> ConstrainedSolution {
        let f = self.flows(&e, &lambda);
        ConstrainedSolution { e, lambda, f }
    }

    /// `b_J = Z_J(d/dz) e`
    pub fn b_j(&self, s: &ConstrainedSolution) -> Vec<Poly> {
        self.z_j.apply(&s.e)
    }

    /// `b_G = Z_G(d/dz) e`
    pub fn b_g(&self, s: &ConstrainedSolution) -> Vec<Poly> {
        self.z_g.apply(&s.e)
    }

    /// `c_G = V_G(d/dz) λ`
    pub fn c_g(&self, s: &ConstrainedSolution) -> Vec<Poly> {
        self.v_g.apply(&s.lambda)
    }
}

pub fn validate_skew_adjoint(j: &PolyMatrix) -> SkewAdjointCheck {
    let residual = skew_adjoint_residual(j);
    SkewAdjointCheck {
        ok: residual.is_zero(),
        residual: residual
            .to_rows()
            .iter()
            .map(|r| r.iter().map(Poly::to_string).collect())
            .collect(),
    }
}

pub fn constrained_boundary(j: &PolyMatrix, g: &PolyMatrix) -> Result<ConstrainedStructure, ConstrainedError> {
    let m = j.rows();
    if j.cols() != m {
        return Err(ConstrainedError::Shape(format!(
            "J is {}×{}, must be square",
            j.rows(),
            j.cols()
        )));
    }
    if g.cols() != m {
        return Err(ConstrainedError::Shape(format!(
            "G has {} columns, J has size {m}",
            g.cols()
        )));
    }
    let residual = skew_adjoint_residual(j);
    if !residual.is_zero() {
        return Err(ConstrainedError::NotSkewAdjoint { residual });
    }
    let r = g.rows();
    let eye_m = PolyMatrix::identity(m);
    let eye_r = PolyMatrix::identity(r);

    let j_pairing = &TwoVarPolyMatrix::outer(&j.transpose(), &eye_m) + &TwoVarPolyMatrix::outer(&eye_m, j);
    let pi_j = j_pairing.div_zeta_plus_eta()?;
    let fj = pi_j.factor_symmetric()?;

    let gt = g.transpose();
    let g_pairing = &TwoVarPolyMatrix::outer(&eye_m, &gt.para_conjugate()) - &TwoVarPolyMatrix::outer(&gt, &eye_r);
    let pi_g_quotient = g_pairing.div_zeta_plus_eta()?;
    let fg = pi_g_quotient.factor_general();
    let k = fg.inner_dim();

    Ok(ConstrainedStructure {
        j: j.clone(),
        g: g.clone(),
        j_pairing,
        pi_j,
        z_j: fj.z,
        sigma_j: fj.sigma,
        inertia_j: fj.inertia,
        g_pairing,
        pi_g_quotient,
        z_g: fg.x,
        pi_g: RatMatrix::identity(k),
        v_g: fg.y,
    })
}

/// Random solution with `deg e, deg λ <= degree`, `e` drawn from the
/// polynomial kernel of `G(d/dz)`.
pub fn constrained_sample(
    structure: &ConstrainedStructure,
    degree: usize,
    seed: u64,
) -> Result<ConstrainedSolution, ConstrainedError> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let m = structure.size();
    let basis = polynomial_kernel_basis(&structure.g, degree);
    let mut e = vec![Poly::zero(); m];
    for v in &basis {
        let c = random_rational(&mut rng);
        for (acc, p) in e.iter_mut().zip(v) {
            *acc = &*acc + &p.scale(&c);
        }
    }
    let lambda: Vec<Poly> = (0..structure.constraints())
        .map(|_| random_poly(&mut rng, degree))
        .collect();
    let sol = structure.solution(e, lambda);
    if basis.is_empty() && m > 0 {
        return Err(ConstrainedError::EmptyKernel {
            degree,
            fallback: Box::new(sol),
        });
    }
    Ok(sol)
}

fn pairing_at(x: &[Poly], m: &RatMatrix, y: &[Poly], point: &Rational) -> Rational {
    bilinear(&eval_vec(x, point), m, &eval_vec(y, point))
}

fn bracket(x: &[Poly], m: &RatMatrix, y: &[Poly], alpha: &Rational, beta: &Rational) -> Rational {
    pairing_at(x, m, y, beta) - pairing_at(x, m, y, alpha)
}

/// `∫(e₁ᵀf₂ + e₂ᵀf₁) - [b_J1ᵀ Σ_J b_J2] - [b_G2ᵀ Π_G c_G1] - [b_G1ᵀ Π_G c_G2]`
/// over `[α, β]`, zero for any two solutions.
pub fn prop5_form(
    structure: &ConstrainedStructure,
    s1: &ConstrainedSolution,
    s2: &ConstrainedSolution,
    alpha: &Rational,
    beta: &Rational,
) -> Rational {
    let integral = integrate_pairing(&s1.f, &s1.e, &s2.f, &s2.e, alpha, beta);
    let (bj1, bj2) = (structure.b_j(s1), structure.b_j(s2));
    let (bg1, bg2) = (structure.b_g(s1), structure.b_g(s2));
    let (cg1, cg2) = (structure.c_g(s1), structure.c_g(s2));
    integral
        - bracket(&bj1, &structure.sigma_j, &bj2, alpha, beta)
        - bracket(&bg2, &structure.pi_g, &cg1, alpha, beta)
        - bracket(&bg1, &structure.pi_g, &cg2, alpha, beta)
}
