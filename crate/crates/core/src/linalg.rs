//! Exact integer and rational linear algebra.
//!
//! Determinants use fraction-free (Bareiss) elimination so that every
//! intermediate value is an exact integer. The Smith normal form carries its
//! unimodular transformation witnesses, which the linking-form code uses to
//! pick generators of a cokernel.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::group::AbelianGroup;
use crate::{IntMatrix, LinalgError};

/// Exact determinant. The 0×0 determinant is 1.
pub fn determinant(m: &IntMatrix) -> Result<BigInt, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let n = m.rows();
    if n == 0 {
        return Ok(BigInt::one());
    }
    let mut a = m.to_rows();
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    negate = !negate;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                // exact: Sylvester's identity
                a[i][j] = v / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    Ok(if negate { -d } else { d })
}

/// `U·A·V = D` with `U`, `V` unimodular and `D` diagonal with `d₁ | d₂ | …`, all `dᵢ ≥ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SmithDecomposition {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols())).map(|i| self.d[(i, i)].clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|x| !x.is_zero()).count()
    }
}

/// Smith normal form with transformation witnesses.
///
/// Pivot: smallest nonzero absolute value in the active block, first in
/// row-major scan order.
pub fn smith_normal_form(a: &IntMatrix) -> SmithDecomposition {
    let (r, c) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = IntMatrix::identity(r);
    let mut v = IntMatrix::identity(c);

    for t in 0..r.min(c) {
        loop {
            let Some((pi, pj)) = find_pivot(&d, t) else {
                return finish(u, d, v);
            };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let mut clean = true;
            for i in t + 1..r {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = -(d[(i, t)].div_floor(&d[(t, t)]));
                d.add_row_multiple(i, t, &q);
                u.add_row_multiple(i, t, &q);
                clean &= d[(i, t)].is_zero();
            }
            for j in t + 1..c {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = -(d[(t, j)].div_floor(&d[(t, t)]));
                d.add_col_multiple(j, t, &q);
                v.add_col_multiple(j, t, &q);
                clean &= d[(t, j)].is_zero();
            }
            if !clean {
                continue;
            }
            // divisibility: fold an offending row into the pivot row and retry
            let offending = (t + 1..r).find(|&i| (t + 1..c).any(|j| !d[(i, j)].is_multiple_of(&d[(t, t)])));
            if let Some(i) = offending {
                let one = BigInt::one();
                d.add_row_multiple(t, i, &one);
                u.add_row_multiple(t, i, &one);
                continue;
            }
            break;
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    finish(u, d, v)
}

fn find_pivot(d: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, BigInt)> = None;
    for i in t..d.rows() {
        for j in t..d.cols() {
            let x = &d[(i, j)];
            if x.is_zero() {
                continue;
            }
            let ax = x.abs();
            if best.as_ref().is_none_or(|(_, _, b)| ax < *b) {
                best = Some((i, j, ax));
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

fn finish(u: IntMatrix, d: IntMatrix, v: IntMatrix) -> SmithDecomposition {
    SmithDecomposition { u, d, v }
}

/// `Z^cols / rowspan(A)`: rows of `A` are relations among `cols` generators.
pub fn cokernel(a: &IntMatrix) -> AbelianGroup {
    let snf = smith_normal_form(a);
    let diag = snf.diagonal();
    let rank = diag.iter().filter(|x| !x.is_zero()).count();
    let factors = diag.into_iter().filter(|x| *x > BigInt::one()).collect();
    AbelianGroup::new(a.cols() - rank, factors).expect("SNF yields a divisibility chain")
}

/// Dense matrix of exact rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl RatMatrix {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigRational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_int(m: &IntMatrix) -> Self {
        Self::from_fn(m.rows(), m.cols(), |i, j| BigRational::from_integer(m[(i, j)].clone()))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub fn mul(&self, rhs: &RatMatrix) -> Result<RatMatrix, LinalgError> {
        if self.cols != rhs.rows {
            return Err(LinalgError::DimensionMismatch {
                left: (self.rows, self.cols),
                right: (rhs.rows, rhs.cols),
            });
        }
        Ok(Self::from_fn(self.rows, rhs.cols, |i, j| {
            (0..self.cols).fold(BigRational::zero(), |acc, k| acc + self.get(i, k) * rhs.get(k, j))
        }))
    }

    pub fn neg(&self) -> RatMatrix {
        Self::from_fn(self.rows, self.cols, |i, j| -self.get(i, j))
    }

    /// Every entry reduced into `[0, 1)`.
    pub fn mod_one(&self) -> RatMatrix {
        Self::from_fn(self.rows, self.cols, |i, j| frac_mod_one(self.get(i, j)))
    }

    pub fn to_rows(&self) -> Vec<Vec<BigRational>> {
        (0..self.rows).map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec()).collect()
    }
}

/// Representative of `x mod 1` in `[0, 1)`.
pub fn frac_mod_one(x: &BigRational) -> BigRational {
    x - x.floor()
}

/// Exact inverse over the rationals (Gauss–Jordan).
pub fn rational_inverse(m: &IntMatrix) -> Result<RatMatrix, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let n = m.rows();
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let mut row: Vec<BigRational> =
                (0..n).map(|j| BigRational::from_integer(m[(i, j)].clone())).collect();
            row.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero()).ok_or(LinalgError::Singular)?;
        a.swap(c, p);
        let inv = a[c][c].recip();
        for x in a[c].iter_mut() {
            *x *= &inv;
        }
        for i in 0..n {
            if i == c || a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].clone();
            for j in 0..2 * n {
                let sub = &f * &a[c][j];
                a[i][j] -= sub;
            }
        }
    }
    Ok(RatMatrix::from_fn(n, n, |i, j| a[i][n + j].clone()))
}

/// Determinant modulo `q` of an integer matrix.
pub fn determinant_mod(m: &IntMatrix, q: u64) -> Result<u64, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    if q < 2 {
        return Err(LinalgError::BadModulus(q));
    }
    let mut res = m.residues(q);
    Ok(det_mod_residues(&mut res, m.rows(), q))
}

/// Determinant of an `n×n` matrix of residues in `[0, q)`, destroying the input.
///
/// Works for any modulus (not only primes): columns are cleared with
/// Euclidean row reduction, which uses only unimodular integer operations.
/// Requires `q < 2^32`.
pub fn det_mod_residues(a: &mut [u64], n: usize, q: u64) -> u64 {
    debug_assert_eq!(a.len(), n * n);
    debug_assert!(q >= 2 && q < (1 << 32));
    let mut det = 1u64;
    for c in 0..n {
        for i in c + 1..n {
            while a[i * n + c] != 0 {
                let t = a[c * n + c] / a[i * n + c];
                if t != 0 {
                    for j in c..n {
                        let sub = (t % q) * a[i * n + j] % q;
                        a[c * n + j] = (a[c * n + j] + q - sub) % q;
                    }
                }
                for j in c..n {
                    a.swap(c * n + j, i * n + j);
                }
                det = (q - det) % q;
            }
        }
        let pivot = a[c * n + c];
        if pivot == 0 {
            return 0;
        }
        det = det * pivot % q;
    }
    det
}
