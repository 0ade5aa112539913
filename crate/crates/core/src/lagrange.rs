//! Lagrangian subspaces `P(d/dz) x = S(d/dz) e` with the symplectic pairing
//! `x₁ᵀe₂ - x₂ᵀe₁`.
//!
//! Image representation `x = S(-d/dz) ℓ`, `e = -P(-d/dz) ℓ`. The pairing in
//! `ℓ` is skew, is divided by `(ζ+η)`, and the quotient is factored as
//! `Wᵀ(ζ) J_p W(η)`. The top `p` rows of `W(d/dz) ℓ` are `x_δ`, the bottom `p`
//! rows are `e_δ`, and
//!
//! ```text
//! d/dz (x_δ1ᵀ e_δ2 - e_δ1ᵀ x_δ2) = x₁ᵀ e₂ - x₂ᵀ e₁.
//! ```

use crate::algebra::polymatrix::eval_vec;
use crate::algebra::{Poly, PolyMatrix, Rational};
use crate::bdf::{BdfError, TwoVarPolyMatrix};
use crate::harness::integrate_dot;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LagrangeError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("symmetry condition fails: Pᵀ(-s)S(s) - Sᵀ(-s)P(s) = {residual}")]
    SymmetryConditionFailed { residual: PolyMatrix },
    #[error("rank condition fails: gcd of maximal minors of [Pᵀ Sᵀ] is {}", minors_gcd.as_ref().map_or("0 (all minors vanish)".to_string(), |g| g.to_string()))]
    RankConditionFailed { minors_gcd: Option<Poly> },
    #[error(transparent)]
    Bdf(#[from] BdfError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LagrangePair {
    p: PolyMatrix,
    s: PolyMatrix,
}

impl LagrangePair {
    pub fn p(&self) -> &PolyMatrix {
        &self.p
    }

    pub fn s(&self) -> &PolyMatrix {
        &self.s
    }

    pub fn size(&self) -> usize {
        self.p.rows()
    }
}

/// `x = N_x(d/dz) ℓ`, `e = N_e(d/dz) ℓ`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LagrangeRep {
    pub nx: PolyMatrix,
    pub ne: PolyMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LagrangeBoundary {
    pub pair: LagrangePair,
    pub rep: LagrangeRep,
    /// `N_xᵀ(ζ)N_e(η) - N_eᵀ(ζ)N_x(η)`
    pub theta: TwoVarPolyMatrix,
    pub quotient: TwoVarPolyMatrix,
    /// `2p × m`
    pub w: PolyMatrix,
    pub p: usize,
}

impl LagrangeBoundary {
    pub fn latent_dim(&self) -> usize {
        self.w.cols()
    }

    pub fn x(&self, latent: &[Poly]) -> Vec<Poly> {
        self.rep.nx.apply(latent)
    }

    pub fn e(&self, latent: &[Poly]) -> Vec<Poly> {
        self.rep.ne.apply(latent)
    }

    /// `(x_δ, e_δ)` as polynomials in `z`.
    pub fn boundary(&self, latent: &[Poly]) -> (Vec<Poly>, Vec<Poly>) {
        let mut w = self.w.apply(latent);
        let e = w.split_off(self.p);
        (w, e)
    }

    /// `x_δ1ᵀ e_δ2 - e_δ1ᵀ x_δ2` at a point.
    pub fn symplectic_at(&self, l1: &[Poly], l2: &[Poly], point: &Rational) -> Rational {
        let (x1, e1) = self.boundary(l1);
        let (x2, e2) = self.boundary(l2);
        let dot = |a: &[Poly], b: &[Poly]| -> Rational {
            eval_vec(a, point)
                .iter()
                .zip(eval_vec(b, point))
                .map(|(u, v)| u * v)
                .sum()
        };
        dot(&x1, &e2) - dot(&e1, &x2)
    }
}

/// `Pᵀ(-s)S(s) - Sᵀ(-s)P(s)`
pub fn symmetry_residual(p: &PolyMatrix, s: &PolyMatrix) -> PolyMatrix {
    &(&p.transpose().para_conjugate() * s) - &(&s.transpose().para_conjugate() * p)
}

pub fn validate_lagrange_pair(p: &PolyMatrix, s: &PolyMatrix) -> Result<LagrangePair, LagrangeError> {
    if p.rows() != p.cols() || p.shape() != s.shape() {
        return Err(LagrangeError::Shape(format!(
            "P is {}×{} and S is {}×{}; both must be square of equal size",
            p.rows(),
            p.cols(),
            s.rows(),
            s.cols()
        )));
    }
    let residual = symmetry_residual(p, s);
    if !residual.is_zero() {
        return Err(LagrangeError::SymmetryConditionFailed { residual });
    }
    let minors_gcd = p.transpose().hstack(&s.transpose()).minors_gcd();
    if !minors_gcd.as_ref().is_some_and(Poly::is_constant) {
        return Err(LagrangeError::RankConditionFailed { minors_gcd });
    }
    Ok(LagrangePair {
        p: p.clone(),
        s: s.clone(),
    })
}

pub fn lagrange_boundary(pair: &LagrangePair) -> Result<LagrangeBoundary, LagrangeError> {
    let rep = LagrangeRep {
        nx: pair.s.para_conjugate(),
        ne: -&pair.p.para_conjugate(),
    };
    // annihilates the kernel operator [Pᵀ(s) Sᵀ(s)]
    debug_assert!((&(&pair.p.transpose() * &rep.nx) + &(&pair.s.transpose() * &rep.ne)).is_zero());
    let theta =
        &TwoVarPolyMatrix::outer(&rep.nx.transpose(), &rep.ne) - &TwoVarPolyMatrix::outer(&rep.ne.transpose(), &rep.nx);
    let quotient = theta.div_zeta_plus_eta()?;
    let fact = quotient.factor_skew()?;
    Ok(LagrangeBoundary {
        pair: pair.clone(),
        rep,
        theta,
        quotient,
        w: fact.w,
        p: fact.p,
    })
}

/// `∫(e₁ᵀx₂ - e₂ᵀx₁) + [x_δ1ᵀe_δ2 - e_δ1ᵀx_δ2]` over `[α, β]`, zero for any
/// two trajectories.
pub fn prop7_form(
    boundary: &LagrangeBoundary,
    l1: &[Poly],
    l2: &[Poly],
    alpha: &Rational,
    beta: &Rational,
) -> Rational {
    let (x1, e1) = (boundary.x(l1), boundary.e(l1));
    let (x2, e2) = (boundary.x(l2), boundary.e(l2));
    let integral = integrate_dot(&e1, &x2, alpha, beta) - integrate_dot(&e2, &x1, alpha, beta);
    integral + boundary.symplectic_at(l1, l2, beta) - boundary.symplectic_at(l1, l2, alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::int;

    fn scalar(cs: &[i64]) -> PolyMatrix {
        PolyMatrix::from_int_coeffs(&[&[cs]])
    }

    #[test]
    fn validation_examples() {
        assert!(validate_lagrange_pair(&scalar(&[1]), &scalar(&[0, 0, 1])).is_ok());
        match validate_lagrange_pair(&scalar(&[1]), &scalar(&[0, 1])) {
            Err(LagrangeError::SymmetryConditionFailed { residual }) => assert_eq!(residual, scalar(&[0, 2])),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            validate_lagrange_pair(&scalar(&[]), &scalar(&[])),
            Err(LagrangeError::RankConditionFailed { minors_gcd: None })
        ));
        // common factor s in P and S
        assert!(matches!(
            validate_lagrange_pair(&scalar(&[0, 1]), &scalar(&[0, 0, 0, 1])),
            Err(LagrangeError::RankConditionFailed { .. })
        ));
    }

    #[test]
    fn second_order_example() {
        let pair = validate_lagrange_pair(&scalar(&[1]), &scalar(&[0, 0, 1])).unwrap();
        let b = lagrange_boundary(&pair).unwrap();
        assert_eq!(b.p, 1);
        // x = ℓ'', e = -ℓ; Θ = -ζ² + η², quotient η - ζ
        assert_eq!(b.theta, TwoVarPolyMatrix::scalar(&[(2, 0, int(-1)), (0, 2, int(1))]));
        assert_eq!(b.quotient, TwoVarPolyMatrix::scalar(&[(1, 0, int(-1)), (0, 1, int(1))]));
        let rebuilt = TwoVarPolyMatrix::from_factors_with_middle(&b.w, &crate::algebra::symplectic_unit(1), &b.w);
        assert_eq!(rebuilt, b.quotient);

        let z = Poly::from_ints(&[0, 1]);
        let z2 = Poly::from_ints(&[0, 0, 1]);
        assert_eq!(prop7_form(&b, &[z], &[z2], &int(0), &int(1)), int(0));
    }

    #[test]
    fn identity_pair_has_no_boundary() {
        let pair = validate_lagrange_pair(&PolyMatrix::identity(2), &PolyMatrix::identity(2)).unwrap();
        let b = lagrange_boundary(&pair).unwrap();
        assert_eq!(b.p, 0);
        assert!(b.quotient.is_zero());
        let l = vec![Poly::from_ints(&[1, 2, 3]), Poly::from_ints(&[0, -1])];
        assert_eq!(prop7_form(&b, &l, &l, &int(0), &int(3)), int(0));
    }

    #[test]
    fn matrix_example() {
        let s = PolyMatrix::from_int_coeffs(&[&[&[0, 0, 1], &[1]], &[&[1], &[0, 0, -1]]]);
        let pair = validate_lagrange_pair(&PolyMatrix::identity(2), &s).unwrap();
        let b = lagrange_boundary(&pair).unwrap();
        assert_eq!(b.p, 2);
        let l1 = vec![Poly::from_ints(&[1, -2, 0, 4]), Poly::from_ints(&[3, 0, 1])];
        let l2 = vec![Poly::from_ints(&[0, 5, -1]), Poly::from_ints(&[2, 2, 2, 2, 2])];
        assert_eq!(prop7_form(&b, &l1, &l2, &int(-1), &int(2)), int(0));
    }
}
