//! Matrices of univariate polynomials, read as differential operators in `d/dz`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;

use super::matrix::RatMatrix;
use super::poly::{poly_gcd, Degree, Poly};
use super::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Poly>,
}

impl PolyMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        PolyMatrix {
            rows,
            cols,
            entries: vec![Poly::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = PolyMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Poly::one());
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, entries: Vec<Poly>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count does not match shape");
        PolyMatrix { rows, cols, entries }
    }

    /// Panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<Poly>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        PolyMatrix::from_vec(r, c, rows.into_iter().flatten().collect())
    }

    /// Each entry given as integer coefficients, lowest power first.
    pub fn from_int_coeffs(rows: &[&[&[i64]]]) -> Self {
        PolyMatrix::from_rows(
            rows.iter()
                .map(|row| row.iter().map(|cs| Poly::from_ints(cs)).collect())
                .collect(),
        )
    }

    pub fn constant(m: &RatMatrix) -> Self {
        PolyMatrix::from_coeffs(m.rows(), m.cols(), std::slice::from_ref(m))
    }

    /// `Σ_k coeffs[k] s^k`
    pub fn from_coeffs(rows: usize, cols: usize, coeffs: &[RatMatrix]) -> Self {
        let mut m = PolyMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                let cs = coeffs.iter().map(|c| c[(i, j)].clone()).collect();
                m.set(i, j, Poly::new(cs));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Poly) {
        self.entries[i * self.cols + j] = p;
    }

    pub fn entries(&self) -> &[Poly] {
        &self.entries
    }

    pub fn to_rows(&self) -> Vec<Vec<Poly>> {
        (0..self.rows)
            .map(|i| self.entries[i * self.cols..(i + 1) * self.cols].to_vec())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Poly::is_zero)
    }

    pub fn degree(&self) -> Degree {
        self.entries
            .iter()
            .map(Poly::degree)
            .max()
            .unwrap_or(Degree::MinusInfinity)
    }

    pub fn map(&self, f: impl Fn(&Poly) -> Poly) -> PolyMatrix {
        PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> PolyMatrix {
        let mut t = PolyMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    /// `P(-s)`, the coefficient of `s^k` multiplied by `(-1)^k`.
    pub fn para_conjugate(&self) -> PolyMatrix {
        self.map(Poly::reflect)
    }

    pub fn scale(&self, c: &Rational) -> PolyMatrix {
        self.map(|p| p.scale(c))
    }

    /// Coefficient matrix of `s^k`.
    pub fn coeff(&self, k: usize) -> RatMatrix {
        RatMatrix::from_vec(self.rows, self.cols, self.entries.iter().map(|p| p.coeff(k)).collect())
    }

    /// `[P_0, P_1, ..., P_d]`; empty for the zero matrix.
    pub fn coeff_matrices(&self) -> Vec<RatMatrix> {
        match self.degree() {
            Degree::MinusInfinity => Vec::new(),
            Degree::Finite(d) => (0..=d).map(|k| self.coeff(k)).collect(),
        }
    }

    /// Horizontal block coefficient matrix `[P_0 P_1 ... P_d]` padded to `d = order`.
    pub fn coeff_row(&self, order: usize) -> RatMatrix {
        let mut out = RatMatrix::zeros(self.rows, 0);
        for k in 0..=order {
            out = out.hstack(&self.coeff(k));
        }
        out
    }

    pub fn eval(&self, x: &Rational) -> RatMatrix {
        RatMatrix::from_vec(self.rows, self.cols, self.entries.iter().map(|p| p.eval(x)).collect())
    }

    /// Action of the operator `P(d/dz)` on a polynomial vector.
    pub fn apply(&self, v: &[Poly]) -> Vec<Poly> {
        assert_eq!(v.len(), self.cols, "operator/vector dimension mismatch");
        let max_deg = self.degree().finite().unwrap_or(0);
        let mut derivs: Vec<Vec<Poly>> = Vec::with_capacity(max_deg + 1);
        derivs.push(v.to_vec());
        for k in 1..=max_deg {
            let next = derivs[k - 1].iter().map(Poly::derivative).collect();
            derivs.push(next);
        }
        (0..self.rows)
            .map(|i| {
                let mut acc = Poly::zero();
                for j in 0..self.cols {
                    for (c, dk) in self.get(i, j).coeffs().iter().zip(&derivs) {
                        if !c.is_zero() && !dk[j].is_zero() {
                            acc = &acc + &dk[j].scale(c);
                        }
                    }
                }
                acc
            })
            .collect()
    }

    pub fn hstack(&self, other: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        let rows = self
            .to_rows()
            .into_iter()
            .zip(other.to_rows())
            .map(|(mut a, b)| {
                a.extend(b);
                a
            })
            .collect::<Vec<_>>();
        if rows.is_empty() {
            return PolyMatrix::zeros(0, self.cols + other.cols);
        }
        PolyMatrix::from_rows(rows)
    }

    pub fn vstack(&self, other: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        PolyMatrix::from_vec(self.rows + other.rows, self.cols, entries)
    }

    pub fn select_rows(&self, idx: &[usize]) -> PolyMatrix {
        let entries = idx
            .iter()
            .flat_map(|&i| (0..self.cols).map(move |j| (i, j)))
            .map(|(i, j)| self.get(i, j).clone())
            .collect();
        PolyMatrix::from_vec(idx.len(), self.cols, entries)
    }

    pub fn select_cols(&self, idx: &[usize]) -> PolyMatrix {
        let entries = (0..self.rows)
            .flat_map(|i| idx.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.get(i, j).clone())
            .collect();
        PolyMatrix::from_vec(self.rows, idx.len(), entries)
    }

    /// Determinant by cofactor expansion; intended for the small sizes used here.
    pub fn determinant(&self) -> Poly {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let cols: Vec<usize> = (0..self.cols).collect();
        self.minor_det(0, &cols)
    }

    fn minor_det(&self, row: usize, cols: &[usize]) -> Poly {
        if cols.is_empty() {
            return Poly::one();
        }
        let mut acc = Poly::zero();
        for (pos, &c) in cols.iter().enumerate() {
            let entry = self.get(row, c);
            if entry.is_zero() {
                continue;
            }
            let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let term = entry * &self.minor_det(row + 1, &rest);
            acc = if pos % 2 == 0 { &acc + &term } else { &acc - &term };
        }
        acc
    }

    /// All maximal (`rows × rows`) minors, columns chosen in lexicographic order.
    pub fn maximal_minors(&self) -> Vec<Poly> {
        assert!(self.rows <= self.cols, "maximal minors need rows <= cols");
        combinations(self.cols, self.rows)
            .into_iter()
            .map(|cols| self.select_cols(&cols).determinant())
            .collect()
    }

    /// Monic gcd of the maximal minors, or `None` if they all vanish.
    pub fn minors_gcd(&self) -> Option<Poly> {
        poly_gcd(self.maximal_minors().iter()).ok()
    }

    /// True iff `rank P(s0) = rows` for every complex `s0`, i.e. the maximal
    /// minors have a nonzero constant gcd.
    pub fn full_rank_everywhere(&self) -> bool {
        self.minors_gcd().is_some_and(|g| g.is_constant())
    }
}

/// `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

impl Mul for &PolyMatrix {
    type Output = PolyMatrix;
    fn mul(self, rhs: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = PolyMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = Poly::zero();
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    let b = rhs.get(k, j);
                    if !a.is_zero() && !b.is_zero() {
                        acc = &acc + &(a * b);
                    }
                }
                out.set(i, j, acc);
            }
        }
        out
    }
}

impl Add for &PolyMatrix {
    type Output = PolyMatrix;
    fn add(self, rhs: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.shape(), rhs.shape(), "matrix sum shape mismatch");
        PolyMatrix::from_vec(
            self.rows,
            self.cols,
            self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        )
    }
}

impl Sub for &PolyMatrix {
    type Output = PolyMatrix;
    fn sub(self, rhs: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.shape(), rhs.shape(), "matrix difference shape mismatch");
        PolyMatrix::from_vec(
            self.rows,
            self.cols,
            self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        )
    }
}

impl Neg for &PolyMatrix {
    type Output = PolyMatrix;
    fn neg(self) -> PolyMatrix {
        self.map(|p| -p)
    }
}

impl fmt::Display for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            write!(f, "{}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Evaluates a polynomial vector at a point.
pub fn eval_vec(v: &[Poly], x: &Rational) -> Vec<Rational> {
    v.iter().map(|p| p.eval(x)).collect()
}

/// `vᵀ w` for polynomial vectors.
pub fn dot(v: &[Poly], w: &[Poly]) -> Poly {
    assert_eq!(v.len(), w.len(), "dot product dimension mismatch");
    v.iter().zip(w).fold(Poly::zero(), |acc, (a, b)| &acc + &(a * b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::int;

    fn ex1_operator() -> PolyMatrix {
        PolyMatrix::from_int_coeffs(&[&[&[], &[0, 1]], &[&[0, 1], &[]]])
    }

    #[test]
    fn para_conjugate_examples() {
        let neg = PolyMatrix::from_int_coeffs(&[&[&[], &[0, -1]], &[&[0, -1], &[]]]);
        assert_eq!(ex1_operator().para_conjugate(), neg);
        let s2 = PolyMatrix::from_int_coeffs(&[&[&[0, 0, 1]]]);
        assert_eq!(s2.para_conjugate(), s2);
        let a = PolyMatrix::from_int_coeffs(&[&[&[1, 1]]]);
        assert_eq!(a.para_conjugate(), PolyMatrix::from_int_coeffs(&[&[&[1, -1]]]));
    }

    #[test]
    fn full_rank_examples() {
        // [F(-s) E(-s)] of the Stokes-Dirac example
        let p = PolyMatrix::from_int_coeffs(&[&[&[], &[0, -1], &[1], &[]], &[&[0, -1], &[], &[], &[1]]]);
        assert!(p.full_rank_everywhere());
        let q = PolyMatrix::from_int_coeffs(&[&[&[0, -1], &[], &[], &[]], &[&[], &[], &[], &[0, -1]]]);
        assert!(!q.full_rank_everywhere());
        assert!(!PolyMatrix::zeros(1, 2).full_rank_everywhere());
        assert!(PolyMatrix::zeros(0, 2).full_rank_everywhere());
    }

    #[test]
    fn apply_is_differential_action() {
        // [[0, s], [s, 0]] applied to (z, z^2) gives (2z, 1)
        let v = vec![Poly::from_ints(&[0, 1]), Poly::from_ints(&[0, 0, 1])];
        let out = ex1_operator().apply(&v);
        assert_eq!(out, vec![Poly::from_ints(&[0, 2]), Poly::from_ints(&[1])]);
    }

    #[test]
    fn determinant_and_coefficients() {
        let m = PolyMatrix::from_int_coeffs(&[&[&[1, 1], &[0, 1]], &[&[2], &[1]]]);
        // (1+s)*1 - s*2 = 1 - s
        assert_eq!(m.determinant(), Poly::from_ints(&[1, -1]));
        assert_eq!(PolyMatrix::from_coeffs(2, 2, &m.coeff_matrices()), m);
        assert_eq!(m.eval(&int(1)).determinant(), int(0));
    }

    #[test]
    fn combinations_are_lexicographic() {
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(combinations(2, 0), vec![Vec::<usize>::new()]);
    }
}
