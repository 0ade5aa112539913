//! Independent oracles and curated instances shared by the integration tests.
#![allow(dead_code)]

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use boundary_forge::algebra::{int, Inertia, Poly, PolyMatrix, RatMatrix, Rational};

/// `det(xI - M)` by Faddeev-LeVerrier, coefficients in increasing powers.
pub fn char_poly(m: &RatMatrix) -> Vec<Rational> {
    let n = m.rows();
    let mut coeffs = vec![Rational::zero(); n + 1];
    coeffs[n] = int(1);
    let mut mk = RatMatrix::zeros(n, n);
    let eye = RatMatrix::identity(n);
    for k in 1..=n {
        // M_k = M (M_{k-1} + c_{n-k+1} I), c_{n-k} = -tr(M_k)/k
        let shifted = &mk + &eye.scale(&coeffs[n - k + 1]);
        mk = m * &shifted;
        let trace: Rational = (0..n).map(|i| mk[(i, i)].clone()).sum();
        coeffs[n - k] = -trace / int(k as i64);
    }
    coeffs
}

fn sign_changes(cs: &[Rational]) -> usize {
    let signs: Vec<bool> = cs.iter().filter(|c| !c.is_zero()).map(|c| c.is_positive()).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Inertia of a symmetric matrix from Descartes' rule on its characteristic
/// polynomial, exact because every root is real.
pub fn oracle_inertia(m: &RatMatrix) -> Inertia {
    assert!(m.is_symmetric());
    let cs = char_poly(m);
    let zero = cs.iter().take_while(|c| c.is_zero()).count();
    let positive = sign_changes(&cs);
    let reflected: Vec<Rational> = cs
        .iter()
        .enumerate()
        .map(|(k, c)| if k % 2 == 1 { -c.clone() } else { c.clone() })
        .collect();
    let negative = sign_changes(&reflected);
    Inertia::new(positive, negative, zero)
}

pub fn pm(rows: &[&[&[i64]]]) -> PolyMatrix {
    PolyMatrix::from_int_coeffs(rows)
}

pub fn scalar(cs: &[i64]) -> PolyMatrix {
    pm(&[&[cs]])
}

pub struct DiracInstance {
    pub name: &'static str,
    pub f: PolyMatrix,
    pub e: PolyMatrix,
}

pub fn skew_adjoint_operators() -> Vec<(&'static str, PolyMatrix)> {
    vec![
        ("stokes", pm(&[&[&[], &[0, 1]], &[&[0, 1], &[]]])),
        ("s", scalar(&[0, 1])),
        ("s^3", scalar(&[0, 0, 0, 1])),
        ("s+s^3", scalar(&[0, 1, 0, 1])),
        ("even_skew", pm(&[&[&[], &[0, 0, 1]], &[&[0, 0, -1], &[]]])),
        ("constant_skew", pm(&[&[&[], &[1]], &[&[-1], &[]]])),
        ("diag_s_s3", pm(&[&[&[0, 1], &[]], &[&[], &[0, 0, 0, 1]]])),
        ("mixed_parity", pm(&[&[&[], &[0, 1, 1]], &[&[0, 1, -1], &[]]])),
        (
            "chain3",
            pm(&[
                &[&[], &[0, 1], &[]],
                &[&[0, 1], &[], &[0, 0, 1]],
                &[&[], &[0, 0, -1], &[]],
            ]),
        ),
        (
            "coupled3",
            pm(&[&[&[], &[0, 1], &[1]], &[&[0, 1], &[], &[]], &[&[-1], &[], &[]]]),
        ),
        (
            "cubic3",
            pm(&[&[&[0, 0, 0, 1], &[], &[]], &[&[], &[], &[0, 1]], &[&[], &[0, 1], &[]]]),
        ),
    ]
}

pub fn dirac_instances() -> Vec<DiracInstance> {
    let mut out = vec![
        DiracInstance {
            name: "stokes_kernel",
            f: pm(&[&[&[], &[0, 1]], &[&[0, 1], &[]]]),
            e: PolyMatrix::identity(2),
        },
        DiracInstance {
            name: "f=s,e=1",
            f: scalar(&[0, 1]),
            e: scalar(&[1]),
        },
        DiracInstance {
            name: "f=s^3,e=1",
            f: scalar(&[0, 0, 0, 1]),
            e: scalar(&[1]),
        },
        DiracInstance {
            name: "f=0,e=I",
            f: PolyMatrix::zeros(2, 2),
            e: PolyMatrix::identity(2),
        },
        DiracInstance {
            name: "mixed_order",
            f: pm(&[&[&[0, 1], &[]], &[&[], &[1]]]),
            e: pm(&[&[&[1], &[]], &[&[], &[]]]),
        },
        DiracInstance {
            name: "algebraic",
            f: pm(&[&[&[1], &[]], &[&[], &[]]]),
            e: pm(&[&[&[], &[]], &[&[], &[1]]]),
        },
    ];
    for (name, j) in skew_adjoint_operators() {
        // f - J e = 0
        let m = j.rows();
        out.push(DiracInstance {
            name,
            f: PolyMatrix::identity(m),
            e: -&j,
        });
    }
    out
}

pub fn lagrange_instances() -> Vec<(&'static str, PolyMatrix, PolyMatrix)> {
    vec![
        ("p=1,s=s^2", scalar(&[1]), scalar(&[0, 0, 1])),
        ("identity", PolyMatrix::identity(2), PolyMatrix::identity(2)),
        (
            "coupled_second_order",
            PolyMatrix::identity(2),
            pm(&[&[&[0, 0, 1], &[1]], &[&[1], &[0, 0, -1]]]),
        ),
        (
            "skew_s",
            PolyMatrix::identity(2),
            pm(&[&[&[], &[0, 1]], &[&[0, -1], &[]]]),
        ),
        ("p=s^2,s=1", scalar(&[0, 0, 1]), scalar(&[1])),
        ("p=1,s=0", scalar(&[1]), scalar(&[])),
        ("fourth_order", scalar(&[1]), scalar(&[2, 0, -1, 0, 1])),
    ]
}

pub fn constrained_instances() -> Vec<(&'static str, PolyMatrix, PolyMatrix)> {
    let stokes = pm(&[&[&[], &[0, 1]], &[&[0, 1], &[]]]);
    vec![
        ("j=s,g=s", scalar(&[0, 1]), scalar(&[0, 1])),
        ("stokes_free", stokes.clone(), PolyMatrix::zeros(0, 2)),
        ("j=0,g=s^2", scalar(&[]), scalar(&[0, 0, 1])),
        ("stokes_g=[s,0]", stokes.clone(), pm(&[&[&[0, 1], &[]]])),
        ("stokes_g=[1,-1]", stokes, pm(&[&[&[1], &[-1]]])),
        (
            "even_skew_g=[1,s]",
            pm(&[&[&[], &[0, 0, 1]], &[&[0, 0, -1], &[]]]),
            pm(&[&[&[1], &[0, 1]]]),
        ),
        ("g=1", scalar(&[0, 1]), scalar(&[1])),
    ]
}

/// Random unimodular `W(s)` from elementary row operations with constant or
/// linear multipliers.
pub fn random_unimodular(n: usize, seed: u64) -> PolyMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = PolyMatrix::identity(n);
    if n == 0 {
        return w;
    }
    for _ in 0..3 {
        let op = rng.gen_range(0..3);
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        let mut e = PolyMatrix::identity(n);
        match op {
            0 if i != j => {
                let c0 = rng.gen_range(-3..=3);
                let c1 = rng.gen_range(-2..=2);
                e.set(i, j, Poly::from_ints(&[c0, c1]));
            }
            1 if i != j => {
                e.set(i, i, Poly::zero());
                e.set(j, j, Poly::zero());
                e.set(i, j, Poly::one());
                e.set(j, i, Poly::one());
            }
            _ => {
                let c = [-3, -2, -1, 1, 2, 3][rng.gen_range(0..6)];
                e.set(i, i, Poly::from_ints(&[c]));
            }
        }
        w = &e * &w;
    }
    assert!(w.determinant().is_constant() && !w.determinant().is_zero());
    w
}

pub fn abs(r: &Rational) -> Rational {
    r.abs()
}
