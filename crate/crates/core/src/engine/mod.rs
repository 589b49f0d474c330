//! The block determinant equation
//! `det [[M0, W·X], [Xᵗ, Y + (E ⊕ O_n)]] = ±1` with `Y` symmetric:
//! assembly, verification, bounded search, modular obstructions and the
//! stabilization reduction.

mod enumerate;
mod obstruction;
mod reduce;
mod search;

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::group::AbelianGroup;
use crate::linalg::determinant;
use crate::linking::{theorem_matrices, LinkingDecomposition, LinkingError};
use crate::surgery::{phi_psi, SurgeryDiagram};
use crate::{IntMatrix, LinalgError};

pub use obstruction::{modular_obstruction, square_block_obstruction, ObstructionCertificate, ObstructionKind};
pub use reduce::stabilization_reduce;
pub use search::{search, SearchOutcome};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("fiber (0,0) is the disk case; use disk_case on the homology instead")]
    DiskCase,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("Y is not symmetric")]
    AsymmetricY,
    #[error("W is singular")]
    SingularW,
    #[error("enumeration needs {required} steps, budget is {budget}")]
    Capacity { required: BigInt, budget: u64 },
    #[error("not applicable: {0}")]
    Inapplicable(String),
    #[error("contract violation: {0}")]
    ContractViolation(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Linking(#[from] LinkingError),
}

/// Fiber `Σ_{g,n+1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiberType {
    pub g: usize,
    pub n: usize,
}

impl FiberType {
    pub fn new(g: usize, n: usize) -> Self {
        Self { g, n }
    }

    /// Width `2g + n` of the fiber block.
    pub fn d(&self) -> usize {
        2 * self.g + self.n
    }
}

impl fmt::Display for FiberType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.g, self.n)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Provenance {
    Theorem,
    Surgery,
    Custom,
}

/// Block data `(M0, W)` together with the fiber type.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BlockProblem {
    m0: IntMatrix,
    w: IntMatrix,
    fiber: FiberType,
    provenance: Provenance,
}

impl BlockProblem {
    pub fn new(m0: IntMatrix, w: IntMatrix, fiber: FiberType, provenance: Provenance) -> Result<Self, EngineError> {
        if !m0.is_square() || m0.rows() != w.rows() || m0.cols() != w.cols() {
            return Err(EngineError::DimensionMismatch(format!(
                "M0 is {}x{}, W is {}x{}",
                m0.rows(),
                m0.cols(),
                w.rows(),
                w.cols()
            )));
        }
        if fiber == FiberType::new(0, 0) {
            return Err(EngineError::DiskCase);
        }
        if determinant(&w)?.is_zero() {
            return Err(EngineError::SingularW);
        }
        Ok(Self { m0, w, fiber, provenance })
    }

    pub fn m0(&self) -> &IntMatrix {
        &self.m0
    }

    pub fn w(&self) -> &IntMatrix {
        &self.w
    }

    pub fn fiber(&self) -> FiberType {
        self.fiber
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn m(&self) -> usize {
        self.m0.rows()
    }

    pub fn d(&self) -> usize {
        self.fiber.d()
    }

    /// Number of free integer unknowns: entries of `X` plus the upper triangle of `Y`.
    pub fn variable_count(&self) -> usize {
        let d = self.d();
        self.m() * d + d * (d + 1) / 2
    }
}

/// Unknowns `(X, Y)`, `X` of size `m×d`, `Y` symmetric `d×d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CandidateSolution {
    x: IntMatrix,
    y: IntMatrix,
}

impl CandidateSolution {
    pub fn new(x: IntMatrix, y: IntMatrix) -> Result<Self, EngineError> {
        if !y.is_symmetric() {
            return Err(EngineError::AsymmetricY);
        }
        Ok(Self { x, y })
    }

    pub fn x(&self) -> &IntMatrix {
        &self.x
    }

    pub fn y(&self) -> &IntMatrix {
        &self.y
    }

    /// `X` row-major followed by the upper triangle of `Y` row-major: the
    /// variable order used by search and enumeration.
    pub fn to_vars(&self) -> Vec<BigInt> {
        let mut v = self.x.entries().to_vec();
        for i in 0..self.y.rows() {
            for j in i..self.y.cols() {
                v.push(self.y[(i, j)].clone());
            }
        }
        v
    }

    pub fn from_vars(m: usize, d: usize, vars: &[BigInt]) -> Result<Self, EngineError> {
        let expected = m * d + d * (d + 1) / 2;
        if vars.len() != expected {
            return Err(EngineError::DimensionMismatch(format!("{} variables, expected {expected}", vars.len())));
        }
        let x = IntMatrix::new(m, d, vars[..m * d].to_vec())?;
        let mut y = IntMatrix::zeros(d, d);
        let mut k = m * d;
        for i in 0..d {
            for j in i..d {
                y[(i, j)] = vars[k].clone();
                y[(j, i)] = vars[k].clone();
                k += 1;
            }
        }
        Ok(Self { x, y })
    }
}

/// Outcome of [`verify`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verification {
    pub det: BigInt,
}

impl Verification {
    pub fn is_solution(&self) -> bool {
        self.det.abs().is_one()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Exists { solution: CandidateSolution, det: BigInt },
    NotExists(ObstructionCertificate),
    /// Nothing found; `completed_bound` is the largest entry bound searched exhaustively.
    Unknown { completed_bound: Option<u32>, moduli: Vec<u64> },
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Exists { .. } => "exists",
            Verdict::NotExists(_) => "not_exists",
            Verdict::Unknown { .. } => "unknown",
        }
    }
}

pub fn problem_from_decomposition(d: &LinkingDecomposition, f: FiberType) -> Result<BlockProblem, EngineError> {
    let (s, t) = theorem_matrices(d)?;
    BlockProblem::new(s, t, f, Provenance::Theorem)
}

pub fn problem_from_diagram(d: &SurgeryDiagram, f: FiberType) -> Result<BlockProblem, EngineError> {
    let (phi, psi) = phi_psi(d);
    BlockProblem::new(phi, psi, f, Provenance::Surgery)
}

/// The fiber-block constant `E ⊕ O_n`: +1 at `(2i, 2i+1)` (0-based) for each genus pair.
pub fn fiber_constant(f: FiberType) -> IntMatrix {
    let mut e = IntMatrix::zeros(f.d(), f.d());
    for i in 0..f.g {
        e[(2 * i, 2 * i + 1)] = BigInt::one();
    }
    e
}

pub fn assemble(p: &BlockProblem, c: &CandidateSolution) -> Result<IntMatrix, EngineError> {
    let (m, d) = (p.m(), p.d());
    if c.x.rows() != m || c.x.cols() != d || c.y.rows() != d || c.y.cols() != d {
        return Err(EngineError::DimensionMismatch(format!(
            "X is {}x{} and Y is {}x{}, expected {m}x{d} and {d}x{d}",
            c.x.rows(),
            c.x.cols(),
            c.y.rows(),
            c.y.cols()
        )));
    }
    let wx = p.w.mul(&c.x)?;
    let e = fiber_constant(p.fiber);
    Ok(IntMatrix::from_fn(m + d, m + d, |i, j| match (i < m, j < m) {
        (true, true) => p.m0[(i, j)].clone(),
        (true, false) => wx[(i, j - m)].clone(),
        (false, true) => c.x[(j, i - m)].clone(),
        (false, false) => &c.y[(i - m, j - m)] + &e[(i - m, j - m)],
    }))
}

pub fn verify(p: &BlockProblem, c: &CandidateSolution) -> Result<Verification, EngineError> {
    if !c.y.is_symmetric() {
        return Err(EngineError::AsymmetricY);
    }
    Ok(Verification { det: determinant(&assemble(p, c)?)? })
}

/// The fiber `(0,0)` case: a disk fiber exists iff the manifold is an integral homology sphere.
pub fn disk_case(h: &AbelianGroup) -> bool {
    h.is_trivial()
}

/// Moduli tried by [`decide`] unless configured otherwise.
pub const DEFAULT_MODULI: [u64; 2] = [8, 9];

#[derive(Clone, Debug)]
pub struct DecideOptions {
    pub bound: u32,
    pub budget: u64,
    pub moduli: Vec<u64>,
}

impl Default for DecideOptions {
    fn default() -> Self {
        Self { bound: 8, budget: 100_000_000, moduli: DEFAULT_MODULI.to_vec() }
    }
}

/// Obstructions first (square-block, then full enumeration where affordable), then search.
pub fn decide(p: &BlockProblem, opts: &DecideOptions) -> Result<Verdict, EngineError> {
    if let Some(cert) = obstruct(p, &opts.moduli, opts.budget)? {
        return Ok(Verdict::NotExists(cert));
    }
    Ok(match search(p, opts.bound, opts.budget)? {
        SearchOutcome::Found { solution, det } => Verdict::Exists { solution, det },
        SearchOutcome::Exhausted { completed_bound } => Verdict::Unknown { completed_bound, moduli: opts.moduli.clone() },
    })
}

/// First certificate from the cheap obstructions over `moduli`; full
/// enumeration is skipped for moduli whose assignment count exceeds `budget`.
pub fn obstruct(p: &BlockProblem, moduli: &[u64], budget: u64) -> Result<Option<ObstructionCertificate>, EngineError> {
    for &q in moduli {
        match square_block_obstruction(p, q) {
            Ok(Some(cert)) => return Ok(Some(cert)),
            Ok(None) | Err(EngineError::Inapplicable(_)) => {}
            Err(e) => return Err(e),
        }
    }
    for &q in moduli {
        match modular_obstruction(p, q, budget) {
            Ok(Some(cert)) => return Ok(Some(cert)),
            Ok(None) | Err(EngineError::Capacity { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}
