//! Bounds on `hc(M)`, the least genus of a homological fiber of a
//! homologically fibered knot in `M` (fiber type `(g, 0)`).

mod plumbing;
mod table;

use num_bigint::BigInt;
use thiserror::Error;

use crate::engine::{
    obstruct, problem_from_decomposition, problem_from_diagram, search, verify, BlockProblem, CandidateSolution,
    EngineError, FiberType, ObstructionCertificate, Provenance, SearchOutcome, DEFAULT_MODULI,
};
use crate::group::AbelianGroup;
use crate::linking::{normalize, pow2, LinkingDecomposition, LinkingError};
use crate::surgery::{first_homology, SurgeryDiagram, SurgeryError};
use crate::IntMatrix;

pub use plumbing::{best_piece, Piece, PlumbingPlan};
pub use table::{known_upper_bounds, plus_or_minus_square, UpperBound};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HcError {
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("internal: {0}")]
    Internal(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Linking(#[from] LinkingError),
    #[error(transparent)]
    Surgery(#[from] SurgeryError),
    #[error(transparent)]
    Linalg(#[from] crate::LinalgError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ManifoldSpec {
    Decomposition(LinkingDecomposition),
    Diagram(SurgeryDiagram),
}

impl ManifoldSpec {
    pub fn homology(&self) -> AbelianGroup {
        match self {
            ManifoldSpec::Decomposition(d) => d.homology(),
            ManifoldSpec::Diagram(d) => first_homology(d),
        }
    }

    pub fn problem(&self, f: FiberType) -> Result<BlockProblem, HcError> {
        Ok(match self {
            ManifoldSpec::Decomposition(d) => problem_from_decomposition(d, f)?,
            ManifoldSpec::Diagram(d) => problem_from_diagram(d, f)?,
        })
    }
}

/// Why a bound holds. Everything except `Table` and `Unresolved` can be rechecked.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Evidence {
    IntegralHomologySphere,
    /// `H₁` needs `generators` elements, and a fiber of genus `g` gives at most `2g`.
    RankBound { genus: usize, generators: usize },
    Witness { problem: BlockProblem, solution: CandidateSolution, det: BigInt, origin: String },
    Obstruction { problem: BlockProblem, certificate: ObstructionCertificate },
    Table { genus: usize, chain: Vec<String> },
    Unresolved { fiber: FiberType, completed_bound: Option<u32> },
}

impl Evidence {
    pub fn recheck(&self, h: &AbelianGroup, budget: u64) -> Result<bool, HcError> {
        Ok(match self {
            Evidence::IntegralHomologySphere => h.is_trivial(),
            Evidence::RankBound { genus, generators } => {
                *generators == h.rank() && genus_lower_bound(h, 0) == *genus
            }
            Evidence::Witness { problem, solution, det, .. } => {
                let v = verify(problem, solution)?;
                v.is_solution() && v.det == *det
            }
            Evidence::Obstruction { problem, certificate } => certificate.recheck(problem, budget)?,
            Evidence::Table { .. } | Evidence::Unresolved { .. } => true,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HcBounds {
    pub lower: usize,
    pub upper: Option<usize>,
    pub exact: Option<usize>,
    pub evidence: Vec<Evidence>,
}

#[derive(Clone, Debug)]
pub struct HcOptions {
    /// Entry bound for direct searches.
    pub bound: u32,
    /// Step budget for searches and modular enumeration.
    pub budget: u64,
    /// Largest genus examined when no upper bound is known.
    pub max_genus: Option<usize>,
    /// Entry bound for searches over single generator pieces.
    pub piece_bound: u32,
    pub moduli: Vec<u64>,
}

impl Default for HcOptions {
    fn default() -> Self {
        Self { bound: 8, budget: 100_000_000, max_genus: None, piece_bound: 3, moduli: DEFAULT_MODULI.to_vec() }
    }
}

/// Least `g` with `2g + n ≥ rank(H)`.
pub fn genus_lower_bound(h: &AbelianGroup, n: usize) -> usize {
    h.rank().saturating_sub(n).div_ceil(2)
}

/// A `(1,1)` solution for `M(E1(k))`, `k ≥ 3`, lifted from a `(1,0)` solution
/// of the 3×3 problem `M0 = (2^(k+1))`, `W = (-3)`: the last fiber slot gets
/// `X` column `(1, 0)ᵗ` and zero `Y` entries, which reduces the 5×5
/// determinant to the 3×3 one. `None` if the search finds nothing.
pub fn sigma12_witness(k: u32, bound: u32, budget: u64) -> Result<Option<CandidateSolution>, HcError> {
    if k < 3 {
        return Err(HcError::InvalidArgument(format!("k = {k}; the lift needs k >= 3")));
    }
    let m0 = IntMatrix::from_fn(1, 1, |_, _| pow2(k + 1));
    let reduced = BlockProblem::new(m0, IntMatrix::from([[-3]]), FiberType::new(1, 0), Provenance::Custom)?;
    let SearchOutcome::Found { solution, .. } = search(&reduced, bound, budget)? else {
        return Ok(None);
    };
    let (z, w) = (solution.x()[(0, 0)].clone(), solution.x()[(0, 1)].clone());
    let y = solution.y();
    let zero = BigInt::from(0);
    let x = IntMatrix::from_rows(vec![vec![zero.clone(), zero.clone(), BigInt::from(1)], vec![z, w, zero.clone()]])?;
    let y = IntMatrix::from_rows(vec![
        vec![y[(0, 0)].clone(), y[(0, 1)].clone(), zero.clone()],
        vec![y[(1, 0)].clone(), y[(1, 1)].clone(), zero.clone()],
        vec![zero.clone(), zero.clone(), zero],
    ])?;
    Ok(Some(CandidateSolution::new(x, y)?))
}

/// Raises the lower bound with obstructions genus by genus, and closes the
/// interval with an explicit solution, a direct search hit, or a table value.
pub fn hc_compute(spec: &ManifoldSpec, opts: &HcOptions) -> Result<HcBounds, HcError> {
    let spec = match spec {
        ManifoldSpec::Decomposition(d) => ManifoldSpec::Decomposition(normalize(d)?),
        other => other.clone(),
    };
    let h = spec.homology();
    if h.is_trivial() {
        return Ok(HcBounds {
            lower: 0,
            upper: Some(0),
            exact: Some(0),
            evidence: vec![Evidence::IntegralHomologySphere],
        });
    }

    let mut lower = genus_lower_bound(&h, 0);
    let mut evidence = vec![Evidence::RankBound { genus: lower, generators: h.rank() }];

    let (plan, table) = match &spec {
        ManifoldSpec::Decomposition(d) => (PlumbingPlan::new(d, opts)?, known_upper_bounds(&spec)?),
        ManifoldSpec::Diagram(_) => (None, None),
    };
    let mut upper = [plan.as_ref().map(|p| p.genus), table.as_ref().map(|t| t.genus)].into_iter().flatten().min();
    let ceiling = opts.max_genus.or(upper).unwrap_or(lower + 2);

    let mut g = lower;
    let mut search_hit = None;
    while g <= ceiling && upper.is_none_or(|u| g < u) {
        let p = spec.problem(FiberType::new(g, 0))?;
        if let Some(certificate) = obstruct(&p, &opts.moduli, opts.budget)? {
            evidence.push(Evidence::Obstruction { problem: p, certificate });
            lower = g + 1;
            g += 1;
            continue;
        }
        match search(&p, opts.bound, opts.budget)? {
            SearchOutcome::Found { solution, det } => {
                search_hit = Some(Evidence::Witness {
                    problem: p,
                    solution,
                    det,
                    origin: format!("search, bound {}", opts.bound),
                });
                upper = Some(g);
            }
            SearchOutcome::Exhausted { completed_bound } => {
                evidence.push(Evidence::Unresolved { fiber: FiberType::new(g, 0), completed_bound });
            }
        }
        break;
    }

    if let Some(hit) = search_hit {
        evidence.push(hit);
    } else if let Some(plan) = plan.as_ref().filter(|p| Some(p.genus) == upper) {
        let (problem, solution) = plan.witness(plan.genus)?;
        let det = verify(&problem, &solution)?.det;
        evidence.push(Evidence::Witness { problem, solution, det, origin: plan.describe().join("; ") });
    } else if let Some(t) = table.filter(|t| Some(t.genus) == upper) {
        evidence.push(Evidence::Table { genus: t.genus, chain: t.chain });
    }

    let exact = upper.filter(|&u| u == lower);
    Ok(HcBounds { lower, upper, exact, evidence })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linking::GeneratorTerm;

    fn hc(r: usize, t: GeneratorTerm) -> HcBounds {
        hc_compute(&ManifoldSpec::Decomposition(LinkingDecomposition::new(r, vec![t])), &HcOptions::default()).unwrap()
    }

    #[test]
    fn lower_bound_examples() {
        let four = BigInt::from(4);
        assert_eq!(genus_lower_bound(&AbelianGroup::from_cyclic(2, &[four.clone(), four.clone()]), 0), 2);
        assert_eq!(genus_lower_bound(&AbelianGroup::trivial(), 0), 0);
        assert_eq!(genus_lower_bound(&AbelianGroup::from_cyclic(0, &[four.clone(), four]), 0), 1);
        assert_eq!(genus_lower_bound(&AbelianGroup::from_cyclic(3, &[]), 1), 1);
    }

    #[test]
    fn sigma12_lifts_verify() {
        for k in 3..=4 {
            let c = sigma12_witness(k, 8, 100_000_000).unwrap().unwrap();
            let d = LinkingDecomposition::new(0, vec![GeneratorTerm::E1 { k }]);
            let p = problem_from_decomposition(&d, FiberType::new(1, 1)).unwrap();
            assert!(verify(&p, &c).unwrap().is_solution());
            assert_eq!(c.x()[(0, 2)], BigInt::from(1));
            assert_eq!(c.x()[(1, 2)], BigInt::from(0));
        }
        assert!(sigma12_witness(2, 8, 1000).is_err());
    }

    #[test]
    fn sphere_is_zero() {
        let b = hc(0, GeneratorTerm::a(1, 1));
        assert_eq!(b.exact, Some(0));
    }

    #[test]
    fn small_exact_values() {
        assert_eq!(hc(0, GeneratorTerm::E0 { k: 1 }).exact, Some(1));
        assert_eq!(hc(0, GeneratorTerm::E0 { k: 2 }).exact, Some(2));
        assert_eq!(hc(0, GeneratorTerm::E1 { k: 3 }).exact, Some(2));
        assert_eq!(hc(2, GeneratorTerm::E1 { k: 3 }).exact, Some(3));
    }

    #[test]
    fn diagram_input_uses_search() {
        let d = SurgeryDiagram::split(vec![crate::surgery::SurgeryComponent::new(5, -2)]).unwrap();
        let b = hc_compute(&ManifoldSpec::Diagram(d), &HcOptions::default()).unwrap();
        assert_eq!(b.exact, Some(1));
        assert!(b.evidence.iter().any(|e| matches!(e, Evidence::Witness { .. })));
    }
}
