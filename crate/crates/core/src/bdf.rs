//! Two-variable polynomial matrices `Φ(ζ,η) = Σ Φ_{k,l} ζ^k η^l` and the
//! bilinear differential operators they induce,
//!
//! ```text
//! D_Φ(v, w) = Σ_{k,l} (d^k v / dz^k)ᵀ Φ_{k,l} (d^l w / dz^l).
//! ```
//!
//! Multiplying by `(ζ + η)` differentiates the operator; dividing by it is the
//! two-variable form of integration by parts. Minimal factorizations are read
//! off the coefficient matrix.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::algebra::{
    inertia_congruence, rank_factorization, skew_canonical_congruence, AlgebraError, Inertia, Poly, PolyMatrix,
    RatMatrix, Rational,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BdfError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("not divisible by (ζ+η): Φ(-η,η) = {witness}")]
    NotDivisible { witness: PolyMatrix },
    #[error("two-variable matrix is not symmetric")]
    NotSymmetric,
    #[error("two-variable matrix is not skew")]
    NotSkew,
    #[error("skew coefficient matrix has odd rank {0}")]
    OddRank(usize),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Sparse block representation; only nonzero blocks are stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TwoVarPolyMatrix {
    p: usize,
    q: usize,
    blocks: BTreeMap<(usize, usize), RatMatrix>,
}

/// Dense coefficient matrix with `(k,l)` block `Φ_{k,l}`, `k,l = 0..=order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoeffMatrix {
    pub p: usize,
    pub q: usize,
    pub order: usize,
    pub matrix: RatMatrix,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralFactorization {
    /// `k × p`
    pub x: PolyMatrix,
    /// `k × q`
    pub y: PolyMatrix,
}

impl GeneralFactorization {
    pub fn inner_dim(&self) -> usize {
        self.x.rows()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetricFactorization {
    /// `n × q`
    pub z: PolyMatrix,
    /// `n × n`, symmetric and invertible
    pub sigma: RatMatrix,
    pub inertia: Inertia,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkewFactorization {
    /// `2p × q`
    pub w: PolyMatrix,
    pub p: usize,
}

impl TwoVarPolyMatrix {
    pub fn zero(p: usize, q: usize) -> Self {
        TwoVarPolyMatrix {
            p,
            q,
            blocks: BTreeMap::new(),
        }
    }

    pub fn from_blocks(p: usize, q: usize, blocks: impl IntoIterator<Item = ((usize, usize), RatMatrix)>) -> Self {
        let mut out = TwoVarPolyMatrix::zero(p, q);
        for (kl, b) in blocks {
            out.add_block(kl, &b);
        }
        out
    }

    /// Scalar (1×1) two-variable polynomial from `(k, l, coefficient)` terms.
    pub fn scalar(terms: &[(usize, usize, Rational)]) -> Self {
        TwoVarPolyMatrix::from_blocks(
            1,
            1,
            terms
                .iter()
                .map(|(k, l, c)| ((*k, *l), RatMatrix::from_rows(vec![vec![c.clone()]]))),
        )
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn blocks(&self) -> &BTreeMap<(usize, usize), RatMatrix> {
        &self.blocks
    }

    pub fn block(&self, k: usize, l: usize) -> RatMatrix {
        self.blocks
            .get(&(k, l))
            .cloned()
            .unwrap_or_else(|| RatMatrix::zeros(self.p, self.q))
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Largest power of either variable present; `None` for zero.
    pub fn max_index(&self) -> Option<usize> {
        self.blocks.keys().map(|&(k, l)| k.max(l)).max()
    }

    fn add_block(&mut self, kl: (usize, usize), b: &RatMatrix) {
        assert_eq!(b.shape(), (self.p, self.q), "block shape mismatch");
        if b.is_zero() {
            return;
        }
        let sum = match self.blocks.get(&kl) {
            Some(old) => old + b,
            None => b.clone(),
        };
        if sum.is_zero() {
            self.blocks.remove(&kl);
        } else {
            self.blocks.insert(kl, sum);
        }
    }

    /// `A(ζ) B(η)` for `A: p × r`, `B: r × q`.
    pub fn outer(a: &PolyMatrix, b: &PolyMatrix) -> Self {
        assert_eq!(a.cols(), b.rows(), "outer product inner dimension mismatch");
        let mut out = TwoVarPolyMatrix::zero(a.rows(), b.cols());
        for (k, ak) in a.coeff_matrices().iter().enumerate() {
            for (l, bl) in b.coeff_matrices().iter().enumerate() {
                out.add_block((k, l), &(ak * bl));
            }
        }
        out
    }

    /// `Xᵀ(ζ) Y(η)`
    pub fn from_factors(x: &PolyMatrix, y: &PolyMatrix) -> Self {
        TwoVarPolyMatrix::outer(&x.transpose(), y)
    }

    /// `Xᵀ(ζ) M Y(η)`
    pub fn from_factors_with_middle(x: &PolyMatrix, middle: &RatMatrix, y: &PolyMatrix) -> Self {
        TwoVarPolyMatrix::outer(&x.transpose(), &(&PolyMatrix::constant(middle) * y))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        TwoVarPolyMatrix::from_blocks(self.p, self.q, self.blocks.iter().map(|(kl, b)| (*kl, b.scale(c))))
    }

    /// `Φᵀ(η, ζ)`
    pub fn transpose_swap(&self) -> Self {
        TwoVarPolyMatrix {
            p: self.q,
            q: self.p,
            blocks: self.blocks.iter().map(|(&(k, l), b)| ((l, k), b.transpose())).collect(),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.p == self.q && *self == self.transpose_swap()
    }

    /// `Φ(ζ,η) = -Φᵀ(η,ζ)`
    pub fn is_skew(&self) -> bool {
        self.p == self.q && *self == self.transpose_swap().scale(&-Rational::one())
    }

    pub fn eval(&self, zeta: &Rational, eta: &Rational) -> RatMatrix {
        let mut acc = RatMatrix::zeros(self.p, self.q);
        for (&(k, l), b) in &self.blocks {
            let w = num_traits::pow(zeta.clone(), k) * num_traits::pow(eta.clone(), l);
            acc = &acc + &b.scale(&w);
        }
        acc
    }

    /// `Φ(-η, η)` as a polynomial matrix in `η`.
    pub fn anti_diagonal(&self) -> PolyMatrix {
        let top = self.blocks.keys().map(|&(k, l)| k + l).max().unwrap_or(0);
        let mut coeffs = vec![RatMatrix::zeros(self.p, self.q); top + 1];
        for (&(k, l), b) in &self.blocks {
            let b = if k % 2 == 1 { -b } else { b.clone() };
            coeffs[k + l] = &coeffs[k + l] + &b;
        }
        PolyMatrix::from_coeffs(self.p, self.q, &coeffs)
    }

    pub fn coeff_matrix(&self) -> CoeffMatrix {
        let order = self.max_index().unwrap_or(0);
        let mut m = RatMatrix::zeros((order + 1) * self.p, (order + 1) * self.q);
        for (&(k, l), b) in &self.blocks {
            for i in 0..self.p {
                for j in 0..self.q {
                    m[(k * self.p + i, l * self.q + j)] = b[(i, j)].clone();
                }
            }
        }
        CoeffMatrix {
            p: self.p,
            q: self.q,
            order,
            matrix: m,
        }
    }

    pub fn from_coeff_matrix(c: &CoeffMatrix) -> Self {
        let mut out = TwoVarPolyMatrix::zero(c.p, c.q);
        for k in 0..=c.order {
            for l in 0..=c.order {
                let rows: Vec<usize> = (k * c.p..(k + 1) * c.p).collect();
                let cols: Vec<usize> = (l * c.q..(l + 1) * c.q).collect();
                out.add_block((k, l), &c.matrix.submatrix(&rows, &cols));
            }
        }
        out
    }

    /// The bilinear differential operator applied to polynomial vectors.
    pub fn apply(&self, v: &[Poly], w: &[Poly]) -> Result<Poly, BdfError> {
        if v.len() != self.p || w.len() != self.q {
            return Err(BdfError::DimensionMismatch(format!(
                "operator is {}×{}, arguments have lengths {} and {}",
                self.p,
                self.q,
                v.len(),
                w.len()
            )));
        }
        let order = self.max_index().unwrap_or(0);
        let dv = derivatives(v, order);
        let dw = derivatives(w, order);
        let mut acc = Poly::zero();
        for (&(k, l), b) in &self.blocks {
            for i in 0..self.p {
                if dv[k][i].is_zero() {
                    continue;
                }
                for j in 0..self.q {
                    let c = &b[(i, j)];
                    if c.is_zero() || dw[l][j].is_zero() {
                        continue;
                    }
                    acc = &acc + &(&dv[k][i] * &dw[l][j]).scale(c);
                }
            }
        }
        Ok(acc)
    }

    /// `(ζ + η) Φ(ζ, η)`
    pub fn mul_zeta_plus_eta(&self) -> Self {
        let mut out = TwoVarPolyMatrix::zero(self.p, self.q);
        for (&(k, l), b) in &self.blocks {
            out.add_block((k + 1, l), b);
            out.add_block((k, l + 1), b);
        }
        out
    }

    /// The unique `Π` with `(ζ + η) Π = Φ`, by synthetic division in `ζ` at
    /// `ζ = -η`. Divisibility is checked on `Φ(-η, η)` first and the zero
    /// remainder is asserted afterwards.
    pub fn div_zeta_plus_eta(&self) -> Result<Self, BdfError> {
        let witness = self.anti_diagonal();
        if !witness.is_zero() {
            return Err(BdfError::NotDivisible { witness });
        }
        let Some(kmax) = self.blocks.keys().map(|&(k, _)| k).max() else {
            return Ok(self.clone());
        };
        let lmax = self.blocks.keys().map(|&(_, l)| l).max().unwrap_or(0);
        // Q_{k-1}(η) = A_k(η) - η Q_k(η), coefficientwise in η
        let mut quotient = TwoVarPolyMatrix::zero(self.p, self.q);
        let mut prev: Vec<RatMatrix> = vec![RatMatrix::zeros(self.p, self.q); lmax + kmax + 2];
        for k in (1..=kmax).rev() {
            let mut cur = vec![RatMatrix::zeros(self.p, self.q); prev.len()];
            for (l, slot) in cur.iter_mut().enumerate() {
                let a = self.block(k, l);
                let shifted = if l > 0 {
                    prev[l - 1].clone()
                } else {
                    RatMatrix::zeros(self.p, self.q)
                };
                *slot = &a - &shifted;
            }
            for (l, b) in cur.iter().enumerate() {
                quotient.add_block((k - 1, l), b);
            }
            prev = cur;
        }
        // remainder A_0(η) - η Q_0(η) must vanish
        for l in 0..prev.len() {
            let shifted = if l > 0 {
                prev[l - 1].clone()
            } else {
                RatMatrix::zeros(self.p, self.q)
            };
            let r = &self.block(0, l) - &shifted;
            assert!(r.is_zero(), "nonzero remainder after a passed divisibility check");
        }
        debug_assert_eq!(&quotient.mul_zeta_plus_eta(), self);
        Ok(quotient)
    }

    /// Minimal `Φ = Xᵀ(ζ) Y(η)` with inner dimension `rank Φ̃`.
    pub fn factor_general(&self) -> GeneralFactorization {
        let c = self.coeff_matrix();
        let (xt, yt) = rank_factorization(&c.matrix);
        GeneralFactorization {
            x: unstack(&xt, self.p, c.order),
            y: unstack(&yt, self.q, c.order),
        }
    }

    /// Minimal `Φ = Zᵀ(ζ) Σ Z(η)` for symmetric `Φ`. `Σ` keeps the hyperbolic
    /// blocks of the exact congruence, so its inertia is that of `Φ̃`.
    pub fn factor_symmetric(&self) -> Result<SymmetricFactorization, BdfError> {
        if !self.is_symmetric() {
            return Err(BdfError::NotSymmetric);
        }
        let c = self.coeff_matrix();
        let cong = inertia_congruence(&c.matrix)?;
        let n = cong.rank();
        // C = U_nᵀ Σ U_n with U = T^{-1}
        let u = cong.transform.inverse().expect("congruence transform is invertible");
        let z = unstack(&u.top_rows(n), self.q, c.order);
        Ok(SymmetricFactorization {
            z,
            sigma: cong.nonsingular_part(),
            inertia: Inertia::new(cong.inertia.positive, cong.inertia.negative, 0),
        })
    }

    /// Minimal `Φ = Wᵀ(ζ) J_p W(η)` for skew `Φ`.
    pub fn factor_skew(&self) -> Result<SkewFactorization, BdfError> {
        if !self.is_skew() {
            return Err(BdfError::NotSkew);
        }
        let c = self.coeff_matrix();
        let (p, t) = skew_canonical_congruence(&c.matrix).map_err(|e| match e {
            AlgebraError::NotSkew => BdfError::NotSkew,
            other => BdfError::Algebra(other),
        })?;
        let rank = c.matrix.rank();
        if rank != 2 * p {
            return Err(BdfError::OddRank(rank));
        }
        let u = t.inverse().expect("congruence transform is invertible");
        Ok(SkewFactorization {
            w: unstack(&u.top_rows(2 * p), self.q, c.order),
            p,
        })
    }
}

/// Splits a `k × (order+1)·width` block row into `Σ_a M_a s^a`.
fn unstack(m: &RatMatrix, width: usize, order: usize) -> PolyMatrix {
    let coeffs: Vec<RatMatrix> = (0..=order).map(|a| m.col_range(a * width, (a + 1) * width)).collect();
    PolyMatrix::from_coeffs(m.rows(), width, &coeffs)
}

fn derivatives(v: &[Poly], order: usize) -> Vec<Vec<Poly>> {
    let mut out = Vec::with_capacity(order + 1);
    out.push(v.to_vec());
    for k in 1..=order {
        let next = out[k - 1].iter().map(Poly::derivative).collect();
        out.push(next);
    }
    out
}

/// `d/dz D_Φ(v,w) - D_{(ζ+η)Φ}(v,w)`, identically zero by the product rule.
pub fn derivative_rule_residual(phi: &TwoVarPolyMatrix, v: &[Poly], w: &[Poly]) -> Result<Poly, BdfError> {
    let lhs = phi.apply(v, w)?.derivative();
    let rhs = phi.mul_zeta_plus_eta().apply(v, w)?;
    Ok(&lhs - &rhs)
}

impl CoeffMatrix {
    pub fn is_symmetric(&self) -> bool {
        self.matrix.is_symmetric()
    }

    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }
}

impl std::ops::Add for &TwoVarPolyMatrix {
    type Output = TwoVarPolyMatrix;
    fn add(self, rhs: &TwoVarPolyMatrix) -> TwoVarPolyMatrix {
        assert_eq!((self.p, self.q), (rhs.p, rhs.q), "shape mismatch");
        let mut out = self.clone();
        for (kl, b) in &rhs.blocks {
            out.add_block(*kl, b);
        }
        out
    }
}

impl std::ops::Sub for &TwoVarPolyMatrix {
    type Output = TwoVarPolyMatrix;
    fn sub(self, rhs: &TwoVarPolyMatrix) -> TwoVarPolyMatrix {
        self + &rhs.scale(&-Rational::one())
    }
}

impl std::ops::Neg for &TwoVarPolyMatrix {
    type Output = TwoVarPolyMatrix;
    fn neg(self) -> TwoVarPolyMatrix {
        self.scale(&-Rational::one())
    }
}

impl std::fmt::Display for TwoVarPolyMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.blocks.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .blocks
            .iter()
            .map(|(&(k, l), b)| format!("{b} ζ^{k} η^{l}"))
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::int;

    fn scalar(terms: &[(usize, usize, i64)]) -> TwoVarPolyMatrix {
        TwoVarPolyMatrix::scalar(&terms.iter().map(|&(k, l, c)| (k, l, int(c))).collect::<Vec<_>>())
    }

    fn hyperbolic() -> TwoVarPolyMatrix {
        TwoVarPolyMatrix::from_blocks(2, 2, [((0, 0), RatMatrix::from_ints(&[&[0, 1], &[1, 0]]))])
    }

    fn pv(cs: &[&[i64]]) -> Vec<Poly> {
        cs.iter().map(|c| Poly::from_ints(c)).collect()
    }

    #[test]
    fn apply_examples() {
        let one = scalar(&[(0, 0, 1)]);
        assert_eq!(
            one.apply(&pv(&[&[0, 1]]), &pv(&[&[0, 0, 1]])).unwrap(),
            Poly::from_ints(&[0, 0, 0, 1])
        );
        let ze = scalar(&[(1, 1, 1)]);
        assert_eq!(
            ze.apply(&pv(&[&[0, 1]]), &pv(&[&[0, 0, 1]])).unwrap(),
            Poly::from_ints(&[0, 2])
        );
        let v = pv(&[&[0, 1], &[0, 0, 1]]);
        assert_eq!(hyperbolic().apply(&v, &v).unwrap(), Poly::from_ints(&[0, 0, 0, 2]));
        assert!(matches!(one.apply(&v, &v), Err(BdfError::DimensionMismatch(_))));
    }

    #[test]
    fn multiplication_examples() {
        assert_eq!(
            scalar(&[(0, 0, 1)]).mul_zeta_plus_eta(),
            scalar(&[(1, 0, 1), (0, 1, 1)])
        );
        let h = hyperbolic().mul_zeta_plus_eta();
        assert_eq!(h.block(1, 0), RatMatrix::from_ints(&[&[0, 1], &[1, 0]]));
        assert_eq!(h.block(0, 1), RatMatrix::from_ints(&[&[0, 1], &[1, 0]]));
        // (ζ+η)(ζ² - ζη + η²) = ζ³ + η³
        let q = scalar(&[(2, 0, 1), (1, 1, -1), (0, 2, 1)]);
        assert_eq!(q.mul_zeta_plus_eta(), scalar(&[(3, 0, 1), (0, 3, 1)]));
    }

    #[test]
    fn division_examples() {
        let cubes = scalar(&[(3, 0, 1), (0, 3, 1)]);
        assert_eq!(
            cubes.div_zeta_plus_eta().unwrap(),
            scalar(&[(2, 0, 1), (1, 1, -1), (0, 2, 1)])
        );
        assert_eq!(
            hyperbolic().mul_zeta_plus_eta().div_zeta_plus_eta().unwrap(),
            hyperbolic()
        );
        match scalar(&[(1, 1, 1)]).div_zeta_plus_eta() {
            Err(BdfError::NotDivisible { witness }) => {
                assert_eq!(witness, PolyMatrix::from_int_coeffs(&[&[&[0, 0, -1]]]))
            }
            other => panic!("expected NotDivisible, got {other:?}"),
        }
    }

    #[test]
    fn general_factorization_examples() {
        let f = TwoVarPolyMatrix::zero(1, 1).factor_general();
        assert_eq!(f.inner_dim(), 0);
        let ze = scalar(&[(1, 1, 1)]);
        let f = ze.factor_general();
        assert_eq!(f.inner_dim(), 1);
        assert_eq!(TwoVarPolyMatrix::from_factors(&f.x, &f.y), ze);
        let g = scalar(&[(1, 0, -1), (0, 1, -1)]);
        let f = g.factor_general();
        assert_eq!(f.inner_dim(), 2);
        assert_eq!(TwoVarPolyMatrix::from_factors(&f.x, &f.y), g);
    }

    #[test]
    fn symmetric_factorization_examples() {
        let f = hyperbolic().factor_symmetric().unwrap();
        assert_eq!(f.z, PolyMatrix::identity(2));
        assert_eq!(f.sigma, RatMatrix::from_ints(&[&[0, 1], &[1, 0]]));
        assert_eq!(TwoVarPolyMatrix::zero(2, 2).factor_symmetric().unwrap().z.rows(), 0);
        let q = scalar(&[(2, 0, 1), (1, 1, -1), (0, 2, 1)]);
        let f = q.factor_symmetric().unwrap();
        assert_eq!(f.inertia, Inertia::new(1, 2, 0));
        assert_eq!(TwoVarPolyMatrix::from_factors_with_middle(&f.z, &f.sigma, &f.z), q);
        assert_eq!(
            scalar(&[(1, 0, 1)]).factor_symmetric().unwrap_err(),
            BdfError::NotSymmetric
        );
    }

    #[test]
    fn skew_factorization_examples() {
        let s = scalar(&[(0, 1, 1), (1, 0, -1)]);
        let f = s.factor_skew().unwrap();
        assert_eq!(f.p, 1);
        assert_eq!(f.w, PolyMatrix::from_int_coeffs(&[&[&[1]], &[&[0, 1]]]));
        assert_eq!(
            TwoVarPolyMatrix::from_factors_with_middle(&f.w, &crate::algebra::symplectic_unit(1), &f.w),
            s
        );
        assert_eq!(TwoVarPolyMatrix::zero(1, 1).factor_skew().unwrap().p, 0);
        let s2 = s.scale(&int(2));
        let f = s2.factor_skew().unwrap();
        assert_eq!(f.p, 1);
        assert_eq!(
            TwoVarPolyMatrix::from_factors_with_middle(&f.w, &crate::algebra::symplectic_unit(1), &f.w),
            s2
        );
        assert_eq!(scalar(&[(0, 0, 1)]).factor_skew().unwrap_err(), BdfError::NotSkew);
    }

    #[test]
    fn coefficient_matrix_round_trip() {
        let q = scalar(&[(2, 0, 1), (1, 1, -1), (0, 2, 1)]);
        let c = q.coeff_matrix();
        assert_eq!(c.matrix, RatMatrix::from_ints(&[&[0, 0, 1], &[0, -1, 0], &[1, 0, 0]]));
        assert_eq!(TwoVarPolyMatrix::from_coeff_matrix(&c), q);
    }

    #[test]
    fn derivative_rule_examples() {
        let one = scalar(&[(0, 0, 1)]);
        let z = pv(&[&[0, 1]]);
        assert!(derivative_rule_residual(&one, &z, &z).unwrap().is_zero());
        let ze = scalar(&[(1, 1, 1)]);
        assert!(derivative_rule_residual(&ze, &pv(&[&[0, 0, 1]]), &pv(&[&[0, 0, 0, 1]]))
            .unwrap()
            .is_zero());
        assert!(derivative_rule_residual(&TwoVarPolyMatrix::zero(1, 1), &z, &z)
            .unwrap()
            .is_zero());
    }
}
