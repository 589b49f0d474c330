use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{fiber_constant, verify, BlockProblem, CandidateSolution, EngineError, FiberType};
use crate::IntMatrix;

/// Removes a split 0-framed unknot (component 0 of `p`) together with one
/// fiber coordinate.
///
/// `c` must solve `p` with fiber `(1,0)` or `(0,n)`, `n ≥ 2`. Simultaneous
/// column/row additions on the fiber block run Euclid on row 0 of `X` until it
/// is `(±1, 0, …, 0)`; the determinant then factors through a double cofactor
/// expansion along row and column 0, leaving a solution for the remaining
/// components with fiber `(0,1)` resp. `(0,n-1)`.
pub fn stabilization_reduce(
    p: &BlockProblem,
    c: &CandidateSolution,
) -> Result<(BlockProblem, CandidateSolution), EngineError> {
    let reduced_fiber = match (p.fiber().g, p.fiber().n) {
        (1, 0) => FiberType::new(0, 1),
        (0, n) if n >= 2 => FiberType::new(0, n - 1),
        (g, n) => {
            return Err(EngineError::Inapplicable(format!("fiber ({g},{n}); expected (1,0) or (0,n) with n >= 2")))
        }
    };
    check_split_unknot(p)?;
    if !verify(p, c)?.is_solution() {
        return Err(EngineError::ContractViolation("input candidate does not verify".into()));
    }

    let d = p.d();
    let mut x = c.x().clone();
    let mut yb = c.y().clone();
    let e = fiber_constant(p.fiber());
    for i in 0..d {
        for j in 0..d {
            yb[(i, j)] += &e[(i, j)];
        }
    }

    // col j += l·col i on X and on Yb, then row j += l·row i on Yb
    let add = |x: &mut IntMatrix, yb: &mut IntMatrix, j: usize, i: usize, l: &BigInt| {
        x.add_col_multiple(j, i, l);
        yb.add_col_multiple(j, i, l);
        yb.add_row_multiple(j, i, l);
    };

    loop {
        let nonzero: Vec<usize> = (0..d).filter(|&j| !x[(0, j)].is_zero()).collect();
        let Some(&pivot) = nonzero.iter().min_by_key(|&&j| x[(0, j)].abs()) else {
            return Err(EngineError::ContractViolation("row 0 of X vanishes".into()));
        };
        if nonzero.len() == 1 {
            break;
        }
        for &j in &nonzero {
            if j != pivot {
                let quot = -(x[(0, j)].div_floor(&x[(0, pivot)]));
                add(&mut x, &mut yb, j, pivot, &quot);
            }
        }
    }
    let k = (0..d).find(|&j| !x[(0, j)].is_zero()).expect("one nonzero entry");
    if !x[(0, k)].abs().is_one() {
        return Err(EngineError::ContractViolation(format!("row 0 of X has gcd {}", x[(0, k)].abs())));
    }
    if k != 0 {
        add(&mut x, &mut yb, 0, k, &BigInt::one());
        add(&mut x, &mut yb, k, 0, &-BigInt::one());
    }

    let m0 = p.m0().without(&[0], &[0]);
    let w = p.w().without(&[0], &[0]);
    let reduced = BlockProblem::new(m0, w, reduced_fiber, p.provenance())?;
    let x = x.without(&[0], &[0]);
    let y = yb.without(&[0], &[0]);
    let c = CandidateSolution::new(x, y)
        .map_err(|_| EngineError::ContractViolation("reduced Y is not symmetric".into()))?;
    if !verify(&reduced, &c)?.is_solution() {
        return Err(EngineError::ContractViolation("reduced candidate does not verify".into()));
    }
    Ok((reduced, c))
}

fn check_split_unknot(p: &BlockProblem) -> Result<(), EngineError> {
    let m = p.m();
    if m == 0 {
        return Err(EngineError::Inapplicable("no surgery component to remove".into()));
    }
    let (m0, w) = (p.m0(), p.w());
    let split = (0..m).all(|j| m0[(0, j)].is_zero() && m0[(j, 0)].is_zero())
        && w[(0, 0)].is_one()
        && (1..m).all(|j| w[(0, j)].is_zero() && w[(j, 0)].is_zero());
    if !split {
        return Err(EngineError::Inapplicable("component 0 is not a split 0-framed unknot".into()));
    }
    Ok(())
}
