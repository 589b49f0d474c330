//! Explicit solutions for connected sums, built from solutions for the
//! summands. Every move keeps `|det| = 1`:
//!
//! * block sum of two solutions (fiber types add);
//! * pairing a free fiber slot with the slot of an `S²×S¹` annulus piece:
//!   that piece's row and column carry a single `±1`, so a double cofactor
//!   expansion removes both regardless of the new pairing entry;
//! * pairing a free slot with a fresh slot whose row is `(0, …, 0, 1)`.
//!
//! The result is always re-verified against the target problem.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::engine::{
    fiber_constant, obstruct, problem_from_decomposition, search, verify, BlockProblem, CandidateSolution,
    FiberType, Provenance, SearchOutcome,
};
use crate::linking::{pow2, term_blocks, GeneratorTerm, LinkingDecomposition};
use crate::IntMatrix;

use super::{sigma12_witness, HcError, HcOptions};

/// Matrices of a solution under construction. `yb` holds `Y + E`; `pairs`
/// are the genus pairs `(a, b)` with the `E` entry at `(a, b)`.
#[derive(Clone, Debug)]
struct Assembly {
    m0: IntMatrix,
    w: IntMatrix,
    x: IntMatrix,
    yb: IntMatrix,
    pairs: Vec<(usize, usize)>,
    free: Vec<usize>,
}

impl Assembly {
    fn empty() -> Self {
        Self {
            m0: IntMatrix::empty(),
            w: IntMatrix::empty(),
            x: IntMatrix::empty(),
            yb: IntMatrix::empty(),
            pairs: vec![],
            free: vec![],
        }
    }

    fn from_solution(p: &BlockProblem, c: &CandidateSolution) -> Self {
        let f = p.fiber();
        let e = fiber_constant(f);
        let d = f.d();
        let yb = IntMatrix::from_fn(d, d, |i, j| &c.y()[(i, j)] + &e[(i, j)]);
        Self {
            m0: p.m0().clone(),
            w: p.w().clone(),
            x: c.x().clone(),
            yb,
            pairs: (0..f.g).map(|i| (2 * i, 2 * i + 1)).collect(),
            free: (2 * f.g..d).collect(),
        }
    }

    fn d(&self) -> usize {
        self.yb.rows()
    }

    fn direct_sum(&self, other: &Assembly) -> Assembly {
        let shift = self.d();
        let mut pairs = self.pairs.clone();
        pairs.extend(other.pairs.iter().map(|&(a, b)| (a + shift, b + shift)));
        let mut free = self.free.clone();
        free.extend(other.free.iter().map(|&a| a + shift));
        Assembly {
            m0: self.m0.direct_sum(&other.m0),
            w: self.w.direct_sum(&other.w),
            x: self.x.direct_sum(&other.x),
            yb: self.yb.direct_sum(&other.yb),
            pairs,
            free,
        }
    }

    fn take_free(&mut self, slot: usize) {
        self.free.retain(|&s| s != slot);
    }

    /// Pairs free slot `a` with the free slot `s` of an annulus piece.
    fn absorb(&mut self, a: usize, s: usize) {
        self.take_free(a);
        self.take_free(s);
        self.yb[(a, s)] += BigInt::one();
        self.pairs.push((a, s));
    }

    /// Pairs free slot `a` with a new slot `h`: zero `X` column, `Y[h][h] = 1`.
    fn stabilize(&mut self, a: usize) {
        let h = self.d();
        let mut one = IntMatrix::zeros(1, 1);
        one[(0, 0)] = BigInt::one();
        self.yb = self.yb.direct_sum(&one);
        self.yb[(a, h)] += BigInt::one();
        self.x = self.x.direct_sum(&IntMatrix::zeros(0, 1));
        self.take_free(a);
        self.pairs.push((a, h));
    }

    /// Reorders the fiber block into pairs-then-free and splits off `E`.
    fn finish(self, provenance: Provenance) -> Result<(BlockProblem, CandidateSolution), HcError> {
        let order: Vec<usize> = self.pairs.iter().flat_map(|&(a, b)| [a, b]).chain(self.free.iter().copied()).collect();
        let fiber = FiberType::new(self.pairs.len(), self.free.len());
        let d = order.len();
        let e = fiber_constant(fiber);
        let x = IntMatrix::from_fn(self.x.rows(), d, |i, j| self.x[(i, order[j])].clone());
        let y = IntMatrix::from_fn(d, d, |i, j| &self.yb[(order[i], order[j])] - &e[(i, j)]);
        let p = BlockProblem::new(self.m0, self.w, fiber, provenance)?;
        let c = CandidateSolution::new(x, y)?;
        Ok((p, c))
    }
}

fn solution(x: IntMatrix, y: IntMatrix) -> CandidateSolution {
    CandidateSolution::new(x, y).expect("symmetric by construction")
}

fn free_problem(size: usize, fiber: FiberType) -> BlockProblem {
    BlockProblem::new(IntMatrix::zeros(size, size), IntMatrix::identity(size), fiber, Provenance::Theorem)
        .expect("identity W")
}

/// `S²×S¹` with an annulus: `X = (1)`, `Y = (0)`.
fn annulus() -> Assembly {
    let p = free_problem(1, FiberType::new(0, 1));
    Assembly::from_solution(&p, &solution(IntMatrix::from([[1]]), IntMatrix::zeros(1, 1)))
}

/// `#²(S²×S¹)` with a genus-one fiber: `X = I₂`, `Y = 0`.
fn two_handles() -> Assembly {
    let p = free_problem(2, FiberType::new(1, 0));
    Assembly::from_solution(&p, &solution(IntMatrix::identity(2), IntMatrix::zeros(2, 2)))
}

/// `S²×S¹` with a genus-one fiber: `X = (1 1)`, `Y = 0`.
fn one_handle() -> Assembly {
    let p = free_problem(1, FiberType::new(1, 0));
    Assembly::from_solution(&p, &solution(IntMatrix::from([[1, 1]]), IntMatrix::zeros(2, 2)))
}

/// `S³` with a genus-one fiber: `Y = I₂`.
fn sphere_pad() -> Assembly {
    let p = free_problem(0, FiberType::new(1, 0));
    Assembly::from_solution(&p, &solution(IntMatrix::zeros(0, 2), IntMatrix::identity(2)))
}

/// A verified solution for one generator term.
#[derive(Clone, Debug)]
pub struct Piece {
    pub term: GeneratorTerm,
    pub problem: BlockProblem,
    pub solution: CandidateSolution,
    pub origin: String,
}

impl Piece {
    pub fn fiber(&self) -> FiberType {
        self.problem.fiber()
    }

    fn cost(&self) -> usize {
        self.fiber().g + self.fiber().n
    }
}

fn term_problem(t: &GeneratorTerm, f: FiberType) -> Result<BlockProblem, HcError> {
    let (s, w) = term_blocks(t);
    Ok(BlockProblem::new(s, w, f, Provenance::Theorem)?)
}

fn accept(t: &GeneratorTerm, p: BlockProblem, c: CandidateSolution, origin: String) -> Result<Option<Piece>, HcError> {
    if verify(&p, &c)?.is_solution() {
        Ok(Some(Piece { term: t.clone(), problem: p, solution: c, origin }))
    } else {
        Ok(None)
    }
}

fn searched(t: &GeneratorTerm, f: FiberType, bound: u32, opts: &HcOptions) -> Result<Option<Piece>, HcError> {
    let p = term_problem(t, f)?;
    if obstruct(&p, &opts.moduli, opts.budget)?.is_some() {
        return Ok(None);
    }
    match search(&p, bound, opts.budget)? {
        SearchOutcome::Found { solution, .. } => accept(t, p, solution, format!("search, fiber {f}")),
        SearchOutcome::Exhausted { .. } => Ok(None),
    }
}

/// `A(p,q)` with fiber `(0,1)`: `det = p·y + q·x²`, solvable iff `±q⁻¹` is a square mod `p`.
fn lens_annulus(t: &GeneratorTerm) -> Result<Option<Piece>, HcError> {
    let GeneratorTerm::A { p, q } = t else { return Ok(None) };
    let Some(limit) = num_traits::ToPrimitive::to_u64(p).filter(|&p| p <= 1 << 20) else { return Ok(None) };
    for x in 0..limit {
        let x = BigInt::from(x);
        for sign in [1i64, -1] {
            let num = BigInt::from(sign) - q * &x * &x;
            if (&num % p).is_zero() {
                let y = num / p;
                let c = solution(IntMatrix::from_fn(1, 1, |_, _| x.clone()), IntMatrix::from_fn(1, 1, |_, _| y.clone()));
                return accept(t, term_problem(t, FiberType::new(0, 1))?, c, "closed form, fiber (0,1)".into());
            }
        }
    }
    Ok(None)
}

/// `E0(k)`, `k ≥ 3`, fiber `(1,0)`: `x = 2^(k-1)`, `y = z = w = 1`, `α = 2^(k-3) + 1`, `β = γ = 0`.
fn e0_template(k: u32) -> Result<Option<Piece>, HcError> {
    let t = GeneratorTerm::E0 { k };
    let x = IntMatrix::from_rows(vec![vec![pow2(k - 1), BigInt::one()], vec![BigInt::one(), BigInt::one()]])?;
    let y = IntMatrix::from_rows(vec![vec![pow2(k - 3) + 1, BigInt::zero()], vec![BigInt::zero(), BigInt::zero()]])?;
    accept(&t, term_problem(&t, FiberType::new(1, 0))?, solution(x, y), "closed form, fiber (1,0)".into())
}

/// `X = I`, `Y = 0` solves fiber `(0, m)` whenever `det W = ±1`.
fn identity_planar(t: &GeneratorTerm) -> Result<Option<Piece>, HcError> {
    let f = FiberType::new(0, t.size());
    let c = solution(IntMatrix::identity(t.size()), IntMatrix::zeros(t.size(), t.size()));
    accept(t, term_problem(t, f)?, c, format!("closed form, fiber {f}"))
}

/// Cheapest piece for `t`, trying fiber types in an order where each one
/// dominates the next for plumbing: `(0,1)`, `(1,0)`, `(0,2)`, `(1,1)`.
pub fn best_piece(t: &GeneratorTerm, opts: &HcOptions) -> Result<Option<Piece>, HcError> {
    let bound = opts.piece_bound;
    if t.size() == 1 {
        if let Some(p) = lens_annulus(t)? {
            return Ok(Some(p));
        }
        return searched(t, FiberType::new(1, 0), opts.bound, opts);
    }
    if let GeneratorTerm::E0 { k } = t {
        if *k >= 3 {
            if let Some(p) = e0_template(*k)? {
                return Ok(Some(p));
            }
        }
    }
    if let Some(p) = searched(t, FiberType::new(1, 0), bound, opts)? {
        return Ok(Some(p));
    }
    if let Some(p) = identity_planar(t)? {
        return Ok(Some(p));
    }
    if let Some(p) = searched(t, FiberType::new(0, 2), bound, opts)? {
        return Ok(Some(p));
    }
    if let GeneratorTerm::E1 { k } = t {
        if *k >= 3 {
            if let Some(c) = sigma12_witness(*k, opts.bound, opts.budget)? {
                return accept(t, term_problem(t, FiberType::new(1, 1))?, c, "lens lift, fiber (1,1)".into());
            }
        }
    }
    Ok(None)
}

/// Pieces for every term of a normalized decomposition, and the genus they plumb to.
#[derive(Clone, Debug)]
pub struct PlumbingPlan {
    pub decomposition: LinkingDecomposition,
    pub pieces: Vec<Piece>,
    pub genus: usize,
}

impl PlumbingPlan {
    pub fn new(d: &LinkingDecomposition, opts: &HcOptions) -> Result<Option<Self>, HcError> {
        let d = crate::linking::normalize(d)?;
        let mut pieces = Vec::with_capacity(d.terms.len());
        for t in &d.terms {
            match best_piece(t, opts)? {
                Some(p) => pieces.push(p),
                None => return Ok(None),
            }
        }
        let slots: usize = pieces.iter().map(|p| p.fiber().n).sum();
        let absorbed = slots.min(d.free_rank);
        let genus = pieces.iter().map(Piece::cost).sum::<usize>() + (d.free_rank - absorbed).div_ceil(2);
        Ok(Some(Self { decomposition: d, pieces, genus }))
    }

    pub fn describe(&self) -> Vec<String> {
        let mut out: Vec<String> = self.pieces.iter().map(|p| format!("M({}): {}", p.term, p.origin)).collect();
        if self.decomposition.free_rank > 0 {
            out.push(format!("{} S2xS1 summands", self.decomposition.free_rank));
        }
        out
    }

    /// Solution of the decomposition's problem with fiber `(genus, 0)`, for any `genus ≥ self.genus`.
    pub fn witness(&self, genus: usize) -> Result<(BlockProblem, CandidateSolution), HcError> {
        if genus < self.genus {
            return Err(HcError::InvalidArgument(format!("plan reaches genus {}, not {genus}", self.genus)));
        }
        let r = self.decomposition.free_rank;
        let slots: usize = self.pieces.iter().map(|p| p.fiber().n).sum();
        let absorbers = slots.min(r);
        let rest = r - absorbers;

        let mut asm = Assembly::empty();
        let mut annulus_slots = Vec::new();
        for _ in 0..absorbers {
            annulus_slots.push(asm.d());
            asm = asm.direct_sum(&annulus());
        }
        for _ in 0..rest / 2 {
            asm = asm.direct_sum(&two_handles());
        }
        if rest % 2 == 1 {
            asm = asm.direct_sum(&one_handle());
        }
        let mut torsion_slots = Vec::new();
        for piece in &self.pieces {
            let offset = asm.d();
            let part = Assembly::from_solution(&piece.problem, &piece.solution);
            torsion_slots.extend(part.free.iter().map(|&s| s + offset));
            asm = asm.direct_sum(&part);
        }
        for (&a, &s) in torsion_slots.iter().zip(&annulus_slots) {
            asm.absorb(a, s);
        }
        for &a in &torsion_slots[absorbers..] {
            asm.stabilize(a);
        }
        while asm.pairs.len() < genus {
            asm = asm.direct_sum(&sphere_pad());
        }

        let (p, c) = asm.finish(Provenance::Theorem)?;
        let target = problem_from_decomposition(&self.decomposition, FiberType::new(genus, 0))?;
        if p != target {
            return Err(HcError::Internal("plumbed blocks differ from the decomposition's blocks".into()));
        }
        if !verify(&target, &c)?.is_solution() {
            return Err(HcError::Internal("plumbed candidate does not verify".into()));
        }
        Ok((target, c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> HcOptions {
        HcOptions::default()
    }

    #[test]
    fn free_only_plans() {
        for r in 1..=5 {
            let plan = PlumbingPlan::new(&LinkingDecomposition::new(r, vec![]), &opts()).unwrap().unwrap();
            assert_eq!(plan.genus, r.div_ceil(2));
            let (p, c) = plan.witness(plan.genus + 1).unwrap();
            assert!(verify(&p, &c).unwrap().is_solution());
        }
    }

    #[test]
    fn e0_two_uses_planar_piece() {
        let piece = best_piece(&GeneratorTerm::E0 { k: 2 }, &opts()).unwrap().unwrap();
        assert_eq!(piece.fiber(), FiberType::new(0, 2));
        for r in 0..=3 {
            let d = LinkingDecomposition::new(r, vec![GeneratorTerm::E0 { k: 2 }]);
            let plan = PlumbingPlan::new(&d, &opts()).unwrap().unwrap();
            assert_eq!(plan.genus, if r == 0 { 2 } else { r.div_ceil(2) + 1 });
            let (p, c) = plan.witness(plan.genus).unwrap();
            assert!(verify(&p, &c).unwrap().is_solution());
        }
    }

    #[test]
    fn lens_pieces() {
        let piece = best_piece(&GeneratorTerm::a(5, 1), &opts()).unwrap().unwrap();
        assert_eq!(piece.fiber(), FiberType::new(0, 1));
        let piece = best_piece(&GeneratorTerm::a(5, 2), &opts()).unwrap().unwrap();
        assert_eq!(piece.fiber(), FiberType::new(1, 0));
    }

    #[test]
    fn mixed_sum_witness() {
        let d = LinkingDecomposition::new(
            3,
            vec![GeneratorTerm::a(7, 3), GeneratorTerm::E0 { k: 3 }, GeneratorTerm::E1 { k: 2 }],
        );
        let plan = PlumbingPlan::new(&d, &opts()).unwrap().unwrap();
        let (p, c) = plan.witness(plan.genus).unwrap();
        assert_eq!(p.fiber(), FiberType::new(plan.genus, 0));
        assert!(verify(&p, &c).unwrap().is_solution());
    }
}
