//! Input-state-output realizations of a boundary structure.
//!
//! With latent `ℓ`, state `x = Z(d/dz) ℓ`, inputs `u = U(d/dz) ℓ` and outputs
//! `y = Y(d/dz) ℓ`, solve `x' = A x + B u`, `y = C x + D u` by matching
//! coefficients: `[A B] K̃ = (sZ)~`, `[C D] K̃ = Ỹ` with `K = [Z; U]`.
//!
//! For port `k` the input is the flow `f_k` unless `k` is in the swap set, in
//! which case it is the effort `e_k`. Swap indices are 0-based here.

use serde::{Deserialize, Serialize};

use crate::algebra::{int, solve_linear, symplectic_unit, AlgebraError, Poly, PolyMatrix, RatMatrix, Rational};
use crate::dirac::BoundaryStructure;
use crate::lagrange::LagrangeBoundary;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairingKind {
    /// `Σ`, power pairing `e₁ᵀf₂ + e₂ᵀf₁`
    Symmetric,
    /// `J_p`, pairing `x₁ᵀe₂ - x₂ᵀe₁`
    Symplectic,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RealizeError {
    #[error("swap index {index} out of range for {ports} ports")]
    InvalidSwap { index: usize, ports: usize },
    #[error("no realization for this partition: {map} equation {equation} is inconsistent")]
    Unsolvable { map: &'static str, equation: usize },
    #[error("realization is not unique for this partition ({degrees_of_freedom} free parameters)")]
    NonUniqueSolution { degrees_of_freedom: usize },
    #[error("no partition of the {ports} ports admits a realization")]
    NoneFound {
        ports: usize,
        attempts: Vec<(Vec<usize>, Box<RealizeError>)>,
    },
}

/// Boundary map with the port polynomials it realizes.
#[derive(Debug, Clone, PartialEq)]
pub struct RealizationProblem {
    pub kind: PairingKind,
    /// `n × m`
    pub z: PolyMatrix,
    /// `m_p × m` port flows (or `x`)
    pub flows: PolyMatrix,
    /// `m_p × m` port efforts (or `e`)
    pub efforts: PolyMatrix,
    /// `Σ` or `J_p`
    pub middle: RatMatrix,
}

impl RealizationProblem {
    pub fn from_dirac(structure: &BoundaryStructure) -> Self {
        RealizationProblem {
            kind: PairingKind::Symmetric,
            z: structure.z.clone(),
            flows: structure.rep.nf.clone(),
            efforts: structure.rep.ne.clone(),
            middle: structure.sigma.clone(),
        }
    }

    pub fn from_lagrange(boundary: &LagrangeBoundary) -> Self {
        RealizationProblem {
            kind: PairingKind::Symplectic,
            z: boundary.w.clone(),
            flows: boundary.rep.nx.clone(),
            efforts: boundary.rep.ne.clone(),
            middle: symplectic_unit(boundary.p),
        }
    }

    pub fn ports(&self) -> usize {
        self.flows.rows()
    }

    pub fn state_dim(&self) -> usize {
        self.z.rows()
    }

    /// `(U, Y)` for a swap set.
    pub fn port_maps(&self, swap: &[usize]) -> (PolyMatrix, PolyMatrix) {
        let m = self.ports();
        let (mut u, mut y) = (Vec::with_capacity(m), Vec::with_capacity(m));
        for k in 0..m {
            let (fk, ek) = (self.flows.to_rows()[k].clone(), self.efforts.to_rows()[k].clone());
            if swap.contains(&k) {
                u.push(ek);
                y.push(fk);
            } else {
                u.push(fk);
                y.push(ek);
            }
        }
        let cols = self.z.cols();
        (from_rows(u, cols), from_rows(y, cols))
    }
}

fn from_rows(rows: Vec<Vec<Poly>>, cols: usize) -> PolyMatrix {
    if rows.is_empty() {
        PolyMatrix::zeros(0, cols)
    } else {
        PolyMatrix::from_rows(rows)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub kind: PairingKind,
    pub a: RatMatrix,
    pub b: RatMatrix,
    pub c: RatMatrix,
    pub d: RatMatrix,
    pub middle: RatMatrix,
    pub swap: Vec<usize>,
    pub z: PolyMatrix,
    pub u_map: PolyMatrix,
    pub y_map: PolyMatrix,
}

impl Realization {
    /// `Δ = diag(±1)`, `-1` on swapped ports.
    pub fn swap_signs(&self) -> RatMatrix {
        let m = self.b.cols();
        let entries: Vec<Rational> = (0..m)
            .map(|k| if self.swap.contains(&k) { int(-1) } else { int(1) })
            .collect();
        RatMatrix::diag(&entries)
    }

    /// `x' - A x - B u` and `y - C x - D u` along `ℓ`, both zero for a valid
    /// realization.
    pub fn trajectory_residuals(&self, latent: &[Poly]) -> (Vec<Poly>, Vec<Poly>) {
        let x = self.z.apply(latent);
        let u = self.u_map.apply(latent);
        let y = self.y_map.apply(latent);
        let state: Vec<Poly> = (0..x.len())
            .map(|i| {
                let mut r = x[i].derivative();
                r = &r - &lin(self.a.row(i), &x);
                &r - &lin(self.b.row(i), &u)
            })
            .collect();
        let output: Vec<Poly> = (0..y.len())
            .map(|i| {
                let r = &y[i] - &lin(self.c.row(i), &x);
                &r - &lin(self.d.row(i), &u)
            })
            .collect();
        (state, output)
    }
}

fn lin(coeffs: &[Rational], v: &[Poly]) -> Poly {
    coeffs
        .iter()
        .zip(v)
        .fold(Poly::zero(), |acc, (c, p)| &acc + &p.scale(c))
}

/// Structural residuals, all zero for a realization of a boundary structure.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureReport {
    pub kind: PairingKind,
    /// `AᵀM + MA`
    pub lyapunov: RatMatrix,
    /// `BᵀΣ - C`, or `BᵀJ - ΔC`
    pub coupling: RatMatrix,
    /// `D + Dᵀ`, or `ΔD - (ΔD)ᵀ`
    pub feedthrough: RatMatrix,
    /// `AΣ⁻¹ + (AΣ⁻¹)ᵀ`, symmetric case only
    pub hamiltonian: Option<RatMatrix>,
}

impl StructureReport {
    pub fn passed(&self) -> bool {
        self.lyapunov.is_zero()
            && self.coupling.is_zero()
            && self.feedthrough.is_zero()
            && self.hamiltonian.as_ref().is_none_or(RatMatrix::is_zero)
    }
}

pub fn realize(problem: &RealizationProblem, swap: &[usize]) -> Result<Realization, RealizeError> {
    let m = problem.ports();
    if let Some(&index) = swap.iter().find(|&&k| k >= m) {
        return Err(RealizeError::InvalidSwap { index, ports: m });
    }
    let mut swap = swap.to_vec();
    swap.sort_unstable();
    swap.dedup();
    let (u_map, y_map) = problem.port_maps(&swap);
    let n = problem.state_dim();
    let k = problem.z.vstack(&u_map);
    let sz = problem.z.map(|p| p.shift(1));
    let order = [k.degree(), sz.degree(), y_map.degree()]
        .into_iter()
        .filter_map(|d| d.finite())
        .max()
        .unwrap_or(0);
    let kt = k.coeff_row(order).transpose();
    let solve = |target: &PolyMatrix, map: &'static str| -> Result<RatMatrix, RealizeError> {
        let rhs = target.coeff_row(order).transpose();
        match solve_linear(&kt, &rhs) {
            Ok(x) => Ok(x.transpose()),
            Err(AlgebraError::Inconsistent { equation }) => Err(RealizeError::Unsolvable { map, equation }),
            Err(AlgebraError::Underdetermined { degrees_of_freedom }) => {
                Err(RealizeError::NonUniqueSolution { degrees_of_freedom })
            }
            Err(e) => panic!("dimensions are consistent by construction: {e}"),
        }
    };
    let ab = solve(&sz, "state")?;
    let cd = solve(&y_map, "output")?;
    Ok(Realization {
        kind: problem.kind,
        a: ab.col_range(0, n),
        b: ab.col_range(n, n + m),
        c: cd.col_range(0, n),
        d: cd.col_range(n, n + m),
        middle: problem.middle.clone(),
        swap,
        z: problem.z.clone(),
        u_map,
        y_map,
    })
}

/// All subsets of `0..m`, smallest first, lexicographic within a size.
pub fn swap_candidates(m: usize) -> Vec<Vec<usize>> {
    (0..=m)
        .flat_map(|k| crate::algebra::polymatrix::combinations(m, k))
        .collect()
}

/// First swap set, in [`swap_candidates`] order, that admits a unique
/// realization.
pub fn partition_search(problem: &RealizationProblem) -> Result<Realization, RealizeError> {
    let mut attempts = Vec::new();
    for swap in swap_candidates(problem.ports()) {
        match realize(problem, &swap) {
            Ok(r) => return Ok(r),
            Err(e) => attempts.push((swap, Box::new(e))),
        }
    }
    Err(RealizeError::NoneFound {
        ports: problem.ports(),
        attempts,
    })
}

pub fn verify_realization_structure(r: &Realization) -> StructureReport {
    let m = &r.middle;
    let at = r.a.transpose();
    let lyapunov = &(&at * m) + &(m * &r.a);
    match r.kind {
        PairingKind::Symmetric => {
            let coupling = &(&r.b.transpose() * m) - &r.c;
            let feedthrough = &r.d + &r.d.transpose();
            let hamiltonian = m.inverse().map(|inv| {
                let j = &r.a * &inv;
                &j + &j.transpose()
            });
            StructureReport {
                kind: r.kind,
                lyapunov,
                coupling,
                feedthrough,
                hamiltonian,
            }
        }
        PairingKind::Symplectic => {
            let delta = r.swap_signs();
            let coupling = &(&r.b.transpose() * m) - &(&delta * &r.c);
            let dd = &delta * &r.d;
            let feedthrough = &dd - &dd.transpose();
            StructureReport {
                kind: r.kind,
                lyapunov,
                coupling,
                feedthrough,
                hamiltonian: None,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirac::{boundary_structure, skew_adjoint_structure, validate_dirac_pair};
    use crate::lagrange::{lagrange_boundary, validate_lagrange_pair};

    fn scalar(cs: &[i64]) -> PolyMatrix {
        PolyMatrix::from_int_coeffs(&[&[cs]])
    }

    #[test]
    fn stokes_dirac_realization() {
        let j = PolyMatrix::from_int_coeffs(&[&[&[], &[0, 1]], &[&[0, 1], &[]]]);
        let bs = skew_adjoint_structure(&j).unwrap();
        let r = realize(&RealizationProblem::from_dirac(&bs), &[]).unwrap();
        assert_eq!(r.a, RatMatrix::zeros(2, 2));
        assert_eq!(r.b, RatMatrix::from_ints(&[&[0, 1], &[1, 0]]));
        assert_eq!(r.c, RatMatrix::identity(2));
        assert_eq!(r.d, RatMatrix::zeros(2, 2));
        assert!(verify_realization_structure(&r).passed());
    }

    #[test]
    fn scalar_pair_needs_swap() {
        let pair = validate_dirac_pair(&scalar(&[0, 1]), &scalar(&[1])).unwrap();
        let problem = RealizationProblem::from_dirac(&boundary_structure(&pair).unwrap());
        assert!(matches!(realize(&problem, &[]), Err(RealizeError::Unsolvable { .. })));
        let r = realize(&problem, &[0]).unwrap();
        assert_eq!(r.a, RatMatrix::zeros(1, 1));
        assert_eq!(r.b, RatMatrix::from_ints(&[&[-1]]));
        assert_eq!(r.c, RatMatrix::from_ints(&[&[1]]));
        assert_eq!(r.d, RatMatrix::zeros(1, 1));
        assert!(verify_realization_structure(&r).passed());
        assert_eq!(partition_search(&problem).unwrap().swap, vec![0]);
        assert!(matches!(realize(&problem, &[1]), Err(RealizeError::InvalidSwap { .. })));
    }

    #[test]
    fn lagrange_realization() {
        let pair = validate_lagrange_pair(&scalar(&[1]), &scalar(&[0, 0, 1])).unwrap();
        let b = lagrange_boundary(&pair).unwrap();
        let problem = RealizationProblem::from_lagrange(&b);
        let r = realize(&problem, &[]).unwrap();
        assert_eq!(r.a, RatMatrix::from_ints(&[&[0, 1], &[0, 0]]));
        assert_eq!(r.b, RatMatrix::from_ints(&[&[0], &[1]]));
        assert_eq!(r.c, RatMatrix::from_ints(&[&[-1, 0]]));
        assert_eq!(r.d, RatMatrix::zeros(1, 1));
        assert!(verify_realization_structure(&r).passed());
    }

    #[test]
    fn candidates_order() {
        assert_eq!(swap_candidates(2), vec![vec![], vec![0], vec![1], vec![0, 1]]);
        assert_eq!(swap_candidates(3).len(), 8);
    }

    #[test]
    fn trivial_structure_realizes_with_empty_state() {
        let pair = validate_dirac_pair(&PolyMatrix::zeros(1, 1), &PolyMatrix::identity(1)).unwrap();
        let problem = RealizationProblem::from_dirac(&boundary_structure(&pair).unwrap());
        let r = partition_search(&problem).unwrap();
        assert_eq!(r.a.rows(), 0);
        assert!(verify_realization_structure(&r).passed());
    }
}
