//! Rational surgery diagrams on S³, reduced to the data the existence
//! equation consumes: coefficients `p/q` and pairwise linking numbers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::group::AbelianGroup;
use crate::linalg::cokernel;
use crate::linking::{normalize, pow2, GeneratorTerm, LinkingDecomposition, LinkingError};
use crate::IntMatrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SurgeryError {
    #[error("component {index}: coefficient {p}/{q} needs gcd(p, q) = 1 and q ≠ 0")]
    InvalidComponent { index: usize, p: BigInt, q: BigInt },
    #[error("linking table is {rows}x{cols} for {components} components")]
    SizeMismatch { rows: usize, cols: usize, components: usize },
    #[error("linking table is not symmetric at ({0},{1})")]
    Asymmetric(usize, usize),
    #[error("linking table has nonzero diagonal entry at {0}")]
    NonzeroDiagonal(usize),
    #[error("component index {index} out of range for {len} components")]
    IndexOutOfRange { index: usize, len: usize },
    #[error(transparent)]
    Linking(#[from] LinkingError),
}

/// Surgery coefficient `p/q` of one component.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SurgeryComponent {
    pub p: BigInt,
    pub q: BigInt,
}

impl SurgeryComponent {
    pub fn new(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Self {
        Self { p: p.into(), q: q.into() }
    }

    fn is_valid(&self) -> bool {
        !self.q.is_zero() && self.p.gcd(&self.q).is_one()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct SurgeryDiagram {
    components: Vec<SurgeryComponent>,
    lk: IntMatrix,
}

impl SurgeryDiagram {
    pub fn new(components: Vec<SurgeryComponent>, lk: IntMatrix) -> Result<Self, SurgeryError> {
        let m = components.len();
        if lk.rows() != m || lk.cols() != m {
            return Err(SurgeryError::SizeMismatch { rows: lk.rows(), cols: lk.cols(), components: m });
        }
        for (index, c) in components.iter().enumerate() {
            if !c.is_valid() {
                return Err(SurgeryError::InvalidComponent { index, p: c.p.clone(), q: c.q.clone() });
            }
        }
        for i in 0..m {
            if !lk[(i, i)].is_zero() {
                return Err(SurgeryError::NonzeroDiagonal(i));
            }
            for j in 0..i {
                if lk[(i, j)] != lk[(j, i)] {
                    return Err(SurgeryError::Asymmetric(j, i));
                }
            }
        }
        Ok(Self { components, lk })
    }

    /// Unlinked components.
    pub fn split(components: Vec<SurgeryComponent>) -> Result<Self, SurgeryError> {
        let m = components.len();
        Self::new(components, IntMatrix::zeros(m, m))
    }

    pub fn components(&self) -> &[SurgeryComponent] {
        &self.components
    }

    pub fn linking(&self) -> &IntMatrix {
        &self.lk
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

/// `Φ[i][i] = pᵢ`, `Φ[i][j] = qᵢ·lk(i,j)`, `Ψ = diag(qᵢ)`.
pub fn phi_psi(d: &SurgeryDiagram) -> (IntMatrix, IntMatrix) {
    let m = d.len();
    let c = &d.components;
    let phi = IntMatrix::from_fn(m, m, |i, j| if i == j { c[i].p.clone() } else { &c[i].q * &d.lk[(i, j)] });
    let psi = IntMatrix::diagonal(&c.iter().map(|c| c.q.clone()).collect::<Vec<_>>());
    (phi, psi)
}

/// Cokernel of `Φ`, with rows read as relations among the meridians.
pub fn first_homology(d: &SurgeryDiagram) -> AbelianGroup {
    cokernel(&phi_psi(d).0)
}

/// Reverses the orientation of component `i` (0-based).
pub fn orientation_flip(d: &SurgeryDiagram, i: usize) -> Result<SurgeryDiagram, SurgeryError> {
    if i >= d.len() {
        return Err(SurgeryError::IndexOutOfRange { index: i, len: d.len() });
    }
    let mut lk = d.lk.clone();
    lk.negate_row(i);
    lk.negate_col(i);
    Ok(SurgeryDiagram { components: d.components.clone(), lk })
}

/// Carries a solution across [`orientation_flip`] of component `i`: negates row `i` of `X`.
pub fn transport_solution(x: &IntMatrix, y: &IntMatrix, i: usize) -> Result<(IntMatrix, IntMatrix), SurgeryError> {
    if i >= x.rows() {
        return Err(SurgeryError::IndexOutOfRange { index: i, len: x.rows() });
    }
    let mut x = x.clone();
    x.negate_row(i);
    Ok((x, y.clone()))
}

/// A diagram whose `(Φ, Ψ)` equals `theorem_matrices(d)` exactly, component for row.
pub fn representative_diagram(d: &LinkingDecomposition) -> Result<SurgeryDiagram, SurgeryError> {
    let d = normalize(d)?;
    let mut out = SurgeryDiagram::split(vec![SurgeryComponent::new(0, 1); d.free_rank])?;
    for t in &d.terms {
        let piece = match t {
            GeneratorTerm::A { p, q } => SurgeryDiagram::split(vec![SurgeryComponent::new(p.clone(), -q)])?,
            GeneratorTerm::E0 { k } => two_linked(SurgeryComponent::new(0, 1), SurgeryComponent::new(0, 1), pow2(*k)),
            GeneratorTerm::E1 { k } => {
                let p = pow2(k + 1);
                two_linked(SurgeryComponent::new(p.clone(), -1), SurgeryComponent::new(p, -3), pow2(*k))
            }
        };
        out = connected_sum(&out, &piece);
    }
    Ok(out)
}

fn two_linked(a: SurgeryComponent, b: SurgeryComponent, lk: BigInt) -> SurgeryDiagram {
    let mut table = IntMatrix::zeros(2, 2);
    table[(0, 1)] = lk.clone();
    table[(1, 0)] = lk;
    SurgeryDiagram { components: vec![a, b], lk: table }
}

/// Split union: components of `a` followed by those of `b`, unlinked across.
pub fn connected_sum(a: &SurgeryDiagram, b: &SurgeryDiagram) -> SurgeryDiagram {
    let mut components = a.components.clone();
    components.extend(b.components.iter().cloned());
    SurgeryDiagram { components, lk: a.lk.direct_sum(&b.lk) }
}
