#![allow(dead_code)]

use homfib::linalg::{determinant, smith_normal_form};
use homfib::linking::{GeneratorTerm, HeegaardGluingData, LinkingDecomposition};
use homfib::IntMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize, lo: i64, hi: i64) -> IntMatrix {
    IntMatrix::from_fn(rows, cols, |_, _| BigInt::from(rng.gen_range(lo..=hi)))
}

pub fn random_symmetric(rng: &mut impl Rng, n: usize, lo: i64, hi: i64) -> IntMatrix {
    let mut m = IntMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = BigInt::from(rng.gen_range(lo..=hi));
            m[(i, j)] = v.clone();
            m[(j, i)] = v;
        }
    }
    m
}

/// Laplace expansion along the first row; independent of the elimination code.
pub fn cofactor_det(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    if n == 1 {
        return m[0][0];
    }
    let mut acc = 0i128;
    for (j, &a) in m[0].iter().enumerate() {
        if a == 0 {
            continue;
        }
        let minor: Vec<Vec<i128>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &v)| v).collect())
            .collect();
        let sign = if j % 2 == 0 { 1 } else { -1 };
        acc += sign * a * cofactor_det(&minor);
    }
    acc
}

pub fn to_i128(m: &IntMatrix) -> Vec<Vec<i128>> {
    m.to_rows().iter().map(|r| r.iter().map(|v| i128::try_from(v).unwrap()).collect()).collect()
}

/// Product of random elementary row operations: determinant ±1.
pub fn random_unimodular(rng: &mut impl Rng, n: usize, steps: usize) -> IntMatrix {
    let mut u = IntMatrix::identity(n);
    if n < 2 {
        if rng.gen_bool(0.5) && n == 1 {
            u.negate_row(0);
        }
        return u;
    }
    for _ in 0..steps {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        match rng.gen_range(0..3) {
            0 => u.add_row_multiple(i, j, &BigInt::from(rng.gen_range(-3..=3))),
            1 => u.swap_rows(i, j),
            _ => u.negate_row(i),
        }
    }
    u
}

/// Top blocks `(A, B)` of a random symplectic matrix with `det B ≠ 0`, as a
/// product of `[[I,S],[0,I]]`, `[[I,0],[S,I]]` (S symmetric) and `[[U,0],[0,U^-t]]`.
pub fn random_heegaard(rng: &mut impl Rng, g: usize) -> HeegaardGluingData {
    loop {
        let mut m = IntMatrix::identity(2 * g);
        for _ in 0..6 {
            let step = match rng.gen_range(0..3) {
                0 => shear(&random_symmetric(rng, g, -3, 3), g),
                1 => shear(&random_symmetric(rng, g, -3, 3), g).transpose(),
                _ => {
                    let u = random_unimodular(rng, g, 4);
                    let inv_t = integer_inverse(&u).transpose();
                    u.direct_sum(&inv_t)
                }
            };
            m = m.mul(&step).unwrap();
        }
        let a = m.block(0..g, 0..g);
        let b = m.block(0..g, g..2 * g);
        if !determinant(&b).unwrap().is_zero() {
            return HeegaardGluingData::new(a, b).unwrap();
        }
    }
}

fn shear(s: &IntMatrix, g: usize) -> IntMatrix {
    let mut e = IntMatrix::identity(2 * g);
    for i in 0..g {
        for j in 0..g {
            e[(i, g + j)] = s[(i, j)].clone();
        }
    }
    e
}

pub fn integer_inverse(u: &IntMatrix) -> IntMatrix {
    let inv = homfib::linalg::rational_inverse(u).unwrap();
    IntMatrix::from_fn(u.rows(), u.cols(), |i, j| {
        let v = inv.get(i, j);
        assert!(v.is_integer());
        v.to_integer()
    })
}

pub fn smith_ok(a: &IntMatrix) -> bool {
    let s = smith_normal_form(a);
    let uav = s.u.mul(a).unwrap().mul(&s.v).unwrap();
    let one = BigInt::from(1);
    let unimodular = |m: &IntMatrix| {
        let d = determinant(m).unwrap();
        d == one || d == -one.clone()
    };
    let diag = s.diagonal();
    let chain = diag.windows(2).all(|w| {
        if w[0] == BigInt::from(0) {
            w[1] == BigInt::from(0)
        } else {
            &w[1] % &w[0] == BigInt::from(0)
        }
    });
    let nonneg = diag.iter().all(|d| *d >= BigInt::from(0));
    let off_diag_zero = (0..s.d.rows()).all(|i| (0..s.d.cols()).all(|j| i == j || s.d[(i, j)] == BigInt::from(0)));
    uav == s.d && unimodular(&s.u) && unimodular(&s.v) && chain && nonneg && off_diag_zero
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Decompositions exercised by the cross-module properties.
pub fn decomposition_pool() -> Vec<LinkingDecomposition> {
    use GeneratorTerm::*;
    vec![
        LinkingDecomposition::new(0, vec![]),
        LinkingDecomposition::new(1, vec![]),
        LinkingDecomposition::new(0, vec![GeneratorTerm::a(3, 1)]),
        LinkingDecomposition::new(0, vec![GeneratorTerm::a(5, 2)]),
        LinkingDecomposition::new(1, vec![GeneratorTerm::a(7, 3)]),
        LinkingDecomposition::new(0, vec![E0 { k: 1 }]),
        LinkingDecomposition::new(0, vec![E0 { k: 2 }]),
        LinkingDecomposition::new(1, vec![E0 { k: 3 }]),
        LinkingDecomposition::new(0, vec![E1 { k: 2 }]),
        LinkingDecomposition::new(0, vec![E1 { k: 3 }]),
        LinkingDecomposition::new(2, vec![E1 { k: 3 }]),
        LinkingDecomposition::new(0, vec![GeneratorTerm::a(3, 1), E0 { k: 1 }]),
    ]
}

pub fn pow2(k: u32) -> i64 {
    1i64 << k
}

/// `(A, B) = ((-r), (-p))` with `-rq - sp = 1`.
pub fn lens_heegaard(p: i64, q: i64) -> HeegaardGluingData {
    let r = (1..=p).find(|r| (r * q + 1).rem_euclid(p) == 0).expect("q invertible mod p");
    let r = if p == 1 { -1 } else { r };
    HeegaardGluingData::new(IntMatrix::from([[-r]]), IntMatrix::from([[-p]])).unwrap()
}

pub fn lens_display(p: i64, q: i64) -> Vec<Vec<BigRational>> {
    let r = (1..=p).find(|r| (r * q + 1).rem_euclid(p) == 0).unwrap();
    vec![vec![rat(-r, p)]]
}

pub fn e0_heegaard(k: u32) -> HeegaardGluingData {
    let a = pow2(k);
    HeegaardGluingData::new(IntMatrix::from([[0, 1], [1, 1]]), IntMatrix::from([[a, 0], [-a, a]])).unwrap()
}

pub fn e0_display(k: u32) -> Vec<Vec<BigRational>> {
    let a = pow2(k);
    vec![vec![rat(0, 1), rat(-1, a)], vec![rat(-1, a), rat(2, a)]]
}

pub fn e1_heegaard(k: u32) -> HeegaardGluingData {
    let a = pow2(k);
    HeegaardGluingData::new(IntMatrix::from([[0, -1], [-3, 3]]), IntMatrix::from([[a, 2 * a], [-a, -3 * a]])).unwrap()
}

pub fn e1_display(k: u32) -> Vec<Vec<BigRational>> {
    let a = pow2(k);
    vec![vec![rat(6, a), rat(-3, a)], vec![rat(-3, a), rat(2, a)]]
}

pub fn mod_one(m: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    m.iter().map(|r| r.iter().map(homfib::linalg::frac_mod_one).collect()).collect()
}

/// Gram of `pairing` on the vectors `basis[i]` (integer coordinates).
pub fn gram_in_basis(pairing: &[Vec<BigRational>], basis: &[Vec<i64>]) -> Vec<Vec<BigRational>> {
    basis
        .iter()
        .map(|u| {
            basis
                .iter()
                .map(|v| {
                    let mut acc = rat(0, 1);
                    for (i, &ui) in u.iter().enumerate() {
                        for (j, &vj) in v.iter().enumerate() {
                            acc += &pairing[i][j] * rat(ui * vj, 1);
                        }
                    }
                    homfib::linalg::frac_mod_one(&acc)
                })
                .collect()
        })
        .collect()
}

/// Coprime lens parameters `(p, q)` with `2 ≤ p ≤ max_p`, `1 ≤ q < p`.
pub fn lens_pairs(max_p: i64) -> Vec<(i64, i64)> {
    use num_integer::Integer;
    (2..=max_p).flat_map(|p| (1..p).filter(move |q| q.gcd(&p) == 1).map(move |q| (p, q))).collect()
}

pub fn problem(
    free_rank: usize,
    terms: Vec<GeneratorTerm>,
    g: usize,
    n: usize,
) -> homfib::engine::BlockProblem {
    let d = LinkingDecomposition::new(free_rank, terms);
    homfib::engine::problem_from_decomposition(&d, homfib::engine::FiberType::new(g, n)).unwrap()
}

/// `[[x, y], [z, w]]` and `[[a, b], [b, c]]` in the usual genus-one notation.
pub fn genus_one_candidate(x: i64, y: i64, z: i64, w: i64, a: i64, b: i64, c: i64) -> homfib::engine::CandidateSolution {
    homfib::engine::CandidateSolution::new(IntMatrix::from([[x, y], [z, w]]), IntMatrix::from([[a, b], [b, c]])).unwrap()
}

/// Plain shell-by-shell, lexicographic exhaustive search with exact determinants.
pub fn oracle_search(p: &homfib::engine::BlockProblem, bound: i64) -> Option<Vec<i64>> {
    let v = p.variable_count();
    for s in 0..=bound {
        let mut t = vec![-s; v];
        loop {
            if t.iter().any(|x| x.abs() == s) {
                let vars: Vec<BigInt> = t.iter().map(|&x| BigInt::from(x)).collect();
                let c = homfib::engine::CandidateSolution::from_vars(p.m(), p.d(), &vars).unwrap();
                let det = determinant(&homfib::engine::assemble(p, &c).unwrap()).unwrap();
                if det == BigInt::from(1) || det == BigInt::from(-1) {
                    return Some(t);
                }
            }
            let mut i = v;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if t[i] < s {
                    t[i] += 1;
                    break;
                }
                t[i] = -s;
            }
            if i == 0 && t.iter().all(|&x| x == -s) {
                break;
            }
        }
    }
    None
}
