//! Exact solves, congruence normal forms and rank factorizations.
//!
//! Every routine here works over the rationals only. Symmetric congruence
//! keeps `[[0, c], [c, 0]]` blocks instead of normalizing to `±1`, since the
//! latter needs square roots.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::matrix::RatMatrix;
use super::poly::Poly;
use super::polymatrix::PolyMatrix;
use super::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is not skew-symmetric")]
    NotSkew,
    #[error("system is inconsistent (equation {equation} has no solution)")]
    Inconsistent { equation: usize },
    #[error("system is underdetermined ({degrees_of_freedom} degrees of freedom)")]
    Underdetermined { degrees_of_freedom: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// Counts of positive, negative and zero eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Inertia {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

impl Inertia {
    pub fn new(positive: usize, negative: usize, zero: usize) -> Self {
        Inertia {
            positive,
            negative,
            zero,
        }
    }

    pub fn dimension(&self) -> usize {
        self.positive + self.negative + self.zero
    }

    pub fn rank(&self) -> usize {
        self.positive + self.negative
    }

    /// Equal positive and negative counts with no kernel.
    pub fn is_balanced(&self) -> bool {
        self.positive == self.negative && self.zero == 0
    }

    /// Same sign counts once the kernel is discarded.
    pub fn same_signature(&self, other: &Inertia) -> bool {
        self.positive == other.positive && self.negative == other.negative
    }
}

impl fmt::Display for Inertia {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.positive, self.negative, self.zero)
    }
}

/// Exact solution of `A X = B`.
pub fn solve_linear(a: &RatMatrix, b: &RatMatrix) -> Result<RatMatrix, AlgebraError> {
    if a.rows() != b.rows() {
        return Err(AlgebraError::DimensionMismatch(format!(
            "A has {} rows, B has {}",
            a.rows(),
            b.rows()
        )));
    }
    let n = a.cols();
    let rref = a.hstack(b).rref();
    if let Some(r) = rref.pivots.iter().position(|&p| p >= n) {
        return Err(AlgebraError::Inconsistent { equation: r });
    }
    let rank = rref.pivots.len();
    if rank < n {
        return Err(AlgebraError::Underdetermined {
            degrees_of_freedom: n - rank,
        });
    }
    let mut x = RatMatrix::zeros(n, b.cols());
    for (r, &p) in rref.pivots.iter().enumerate() {
        for j in 0..b.cols() {
            x[(p, j)] = rref.matrix[(r, n + j)].clone();
        }
    }
    Ok(x)
}

/// One block of a congruence-diagonal form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CongruenceBlock {
    /// `[d]`, `d != 0`
    Scalar(Rational),
    /// `[[0, c], [c, 0]]`, `c != 0`
    Hyperbolic(Rational),
}

#[derive(Debug, Clone)]
pub struct SymmetricCongruence {
    pub inertia: Inertia,
    /// Invertible `T` with `Tᵀ S T = blockdiag(blocks, 0)`.
    pub transform: RatMatrix,
    pub blocks: Vec<CongruenceBlock>,
    /// `Tᵀ S T`
    pub reduced: RatMatrix,
}

impl SymmetricCongruence {
    /// Number of nonzero rows of the reduced form.
    pub fn rank(&self) -> usize {
        self.inertia.rank()
    }

    /// Leading nonsingular block of the reduced form.
    pub fn nonsingular_part(&self) -> RatMatrix {
        let r = self.rank();
        let idx: Vec<usize> = (0..r).collect();
        self.reduced.submatrix(&idx, &idx)
    }
}

// Simultaneous row/column operations keep `m` congruent to the input; the
// same column operations are mirrored on `t`.
struct Congruent {
    m: RatMatrix,
    t: RatMatrix,
}

impl Congruent {
    fn new(s: &RatMatrix) -> Self {
        Congruent {
            m: s.clone(),
            t: RatMatrix::identity(s.rows()),
        }
    }

    fn swap(&mut self, a: usize, b: usize) {
        self.m.swap_rows(a, b);
        self.m.swap_cols(a, b);
        self.t.swap_cols(a, b);
    }

    /// index `dst` += c * index `src`
    fn add_multiple(&mut self, dst: usize, src: usize, c: &Rational) {
        self.m.add_row_multiple(dst, src, c);
        self.m.add_col_multiple(dst, src, c);
        self.t.add_col_multiple(dst, src, c);
    }

    fn scale(&mut self, i: usize, c: &Rational) {
        self.m.scale_row(i, c);
        self.m.scale_col(i, c);
        self.t.scale_col(i, c);
    }

    fn first_nonzero_offdiag(&self, from: usize) -> Option<(usize, usize)> {
        let n = self.m.rows();
        (from..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .find(|&(i, j)| !self.m[(i, j)].is_zero())
    }
}

/// Congruence diagonalization `Tᵀ S T` of a symmetric matrix into scalar and
/// hyperbolic blocks, followed by the zero block. Pivot order: first nonzero
/// diagonal entry, otherwise first nonzero off-diagonal pair in row-major scan.
pub fn inertia_congruence(s: &RatMatrix) -> Result<SymmetricCongruence, AlgebraError> {
    if !s.is_symmetric() {
        return Err(AlgebraError::NotSymmetric);
    }
    let n = s.rows();
    let mut w = Congruent::new(s);
    let mut blocks = Vec::new();
    let (mut pos, mut neg) = (0, 0);
    let mut i = 0;
    while i < n {
        if let Some(d) = (i..n).find(|&d| !w.m[(d, d)].is_zero()) {
            w.swap(i, d);
            let pivot = w.m[(i, i)].clone();
            for r in i + 1..n {
                if !w.m[(r, i)].is_zero() {
                    let f = -(&w.m[(r, i)] / &pivot);
                    w.add_multiple(r, i, &f);
                }
            }
            if pivot.is_positive() {
                pos += 1;
            } else {
                neg += 1;
            }
            blocks.push(CongruenceBlock::Scalar(pivot));
            i += 1;
        } else if let Some((a, b)) = w.first_nonzero_offdiag(i) {
            // b > a >= i, so the first swap leaves b in place
            w.swap(i, a);
            w.swap(i + 1, b);
            let c = w.m[(i, i + 1)].clone();
            for r in i + 2..n {
                let ui = w.m[(r, i)].clone();
                let uj = w.m[(r, i + 1)].clone();
                // subtract u B^{-1} against the block [[0, c], [c, 0]]
                w.add_multiple(r, i, &(-(&uj / &c)));
                w.add_multiple(r, i + 1, &(-(&ui / &c)));
            }
            pos += 1;
            neg += 1;
            blocks.push(CongruenceBlock::Hyperbolic(c));
            i += 2;
        } else {
            break;
        }
    }
    let zero = n - pos - neg;
    Ok(SymmetricCongruence {
        inertia: Inertia::new(pos, neg, zero),
        transform: w.t,
        blocks,
        reduced: w.m,
    })
}

pub fn inertia(s: &RatMatrix) -> Result<Inertia, AlgebraError> {
    inertia_congruence(s).map(|c| c.inertia)
}

/// Minimal factorization `M = Xᵀ Y` with inner dimension `rank M`.
/// `Y` is the nonzero part of the reduced row echelon form and `Xᵀ` collects
/// the pivot columns of `M`.
pub fn rank_factorization(m: &RatMatrix) -> (RatMatrix, RatMatrix) {
    let rref = m.rref();
    let k = rref.pivots.len();
    let y = rref.matrix.top_rows(k);
    let rows: Vec<usize> = (0..m.rows()).collect();
    let x = m.submatrix(&rows, &rref.pivots).transpose();
    (x, y)
}

/// `[[0, I_p], [-I_p, 0]]`
pub fn symplectic_unit(p: usize) -> RatMatrix {
    let mut j = RatMatrix::zeros(2 * p, 2 * p);
    for i in 0..p {
        j[(i, p + i)] = Rational::one();
        j[(p + i, i)] = -Rational::one();
    }
    j
}

/// `[[0, I_p], [I_p, 0]]`
pub fn hyperbolic_unit(p: usize) -> RatMatrix {
    let mut q = RatMatrix::zeros(2 * p, 2 * p);
    for i in 0..p {
        q[(i, p + i)] = Rational::one();
        q[(p + i, i)] = Rational::one();
    }
    q
}

/// Invertible `T` with `Tᵀ S T = blockdiag(J_p, 0)` for skew-symmetric `S`.
pub fn skew_canonical_congruence(s: &RatMatrix) -> Result<(usize, RatMatrix), AlgebraError> {
    if !s.is_skew() {
        return Err(AlgebraError::NotSkew);
    }
    let n = s.rows();
    let mut w = Congruent::new(s);
    let mut i = 0;
    while let Some((a, b)) = w.first_nonzero_offdiag(i) {
        w.swap(i, a);
        w.swap(i + 1, b);
        let c = w.m[(i, i + 1)].clone();
        w.scale(i + 1, &c.recip());
        // the pivot block is now [[0, 1], [-1, 0]]
        for r in i + 2..n {
            let ui = w.m[(r, i)].clone();
            let uj = w.m[(r, i + 1)].clone();
            w.add_multiple(r, i, &(-uj));
            w.add_multiple(r, i + 1, &ui);
        }
        i += 2;
    }
    let p = i / 2;
    // interleaved pairs (0,1), (2,3), ... reordered to (0,2,...,1,3,...)
    let order: Vec<usize> = (0..p)
        .map(|k| 2 * k)
        .chain((0..p).map(|k| 2 * k + 1))
        .chain(2 * p..n)
        .collect();
    let rows: Vec<usize> = (0..n).collect();
    let t = w.t.submatrix(&rows, &order);
    Ok((p, t))
}

/// Basis of all polynomial vectors `e` with `deg e <= d` and `G(d/dz) e = 0`.
pub fn polynomial_kernel_basis(g: &PolyMatrix, d: usize) -> Vec<Vec<Poly>> {
    let q = g.cols();
    let r = g.rows();
    // unknown index (j, k): coefficient of z^k in component j
    let unknowns = q * (d + 1);
    let mut eqs = RatMatrix::zeros(r * (d + 1), unknowns);
    for j in 0..q {
        for k in 0..=d {
            let mut basis = vec![Poly::zero(); q];
            basis[j] = Poly::monomial(Rational::one(), k);
            let image = g.apply(&basis);
            for (i, p) in image.iter().enumerate() {
                for (t, c) in p.coeffs().iter().enumerate() {
                    eqs[(i * (d + 1) + t, j * (d + 1) + k)] = c.clone();
                }
            }
        }
    }
    eqs.nullspace()
        .into_iter()
        .map(|v| {
            (0..q)
                .map(|j| Poly::new(v[j * (d + 1)..(j + 1) * (d + 1)].to_vec()))
                .collect()
        })
        .collect()
}
