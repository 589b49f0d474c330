use num_bigint::BigInt;
use num_traits::{One, Signed};
use rayon::prelude::*;

use super::enumerate::{scan_tuples, tuples, ResidueForm};
use super::{verify, BlockProblem, CandidateSolution, EngineError};

/// Candidates are screened modulo `lcm(8, 9)` before the exact determinant.
const FILTER_MODULUS: u64 = 72;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Found { solution: CandidateSolution, det: BigInt },
    /// `completed_bound` is the largest entry bound whose candidates were all checked.
    Exhausted { completed_bound: Option<u32> },
}

/// Looks for a solution with all entries in `[-entry_bound, entry_bound]`.
///
/// Candidates are visited in shells of increasing max-norm; within a shell in
/// lexicographic order of the variable tuple (see [`CandidateSolution::to_vars`]).
/// The first solution found is therefore the lexicographically least one in
/// the smallest shell that has any, whatever the number of worker threads.
/// `budget` caps the number of candidates; a shell that would exceed it is not started.
pub fn search(p: &BlockProblem, entry_bound: u32, budget: u64) -> Result<SearchOutcome, EngineError> {
    let v = p.variable_count();
    let budget_big = BigInt::from(budget);
    let mut completed = None;
    for s in 0..=entry_bound {
        let visited = BigInt::from(2 * s as u64 + 1).pow(v as u32);
        if visited > budget_big {
            break;
        }
        if let Some((solution, det)) = search_shell(p, s as i64)? {
            return Ok(SearchOutcome::Found { solution, det });
        }
        completed = Some(s);
    }
    Ok(SearchOutcome::Exhausted { completed_bound: completed })
}

fn search_shell(p: &BlockProblem, s: i64) -> Result<Option<(CandidateSolution, BigInt)>, EngineError> {
    let v = p.variable_count();
    let head_len = v - 1;
    let values: Vec<i64> = (-s..=s).collect();
    let prefix_len = head_len.min(2);
    let prefixes = tuples(prefix_len, &values);

    let found = prefixes.par_iter().find_map_first(|prefix| {
        let mut form = ResidueForm::new(p, FILTER_MODULUS);
        let mut head = vec![0i64; head_len];
        head[..prefix_len].copy_from_slice(prefix);
        scan_tuples(&mut head, prefix_len, &values, |head| {
            let on_shell = head.iter().any(|x| x.abs() == s);
            let (a, b) = form.affine(head);
            let ts: &[i64] = if on_shell { &values } else { &[-s, s] };
            let ts = if s == 0 { &[0][..] } else { ts };
            for &t in ts {
                let r = (a as i64 + b as i64 * t).rem_euclid(FILTER_MODULUS as i64) as u64;
                if r != 1 && r != FILTER_MODULUS - 1 {
                    continue;
                }
                let mut vars: Vec<BigInt> = head.iter().map(|&x| BigInt::from(x)).collect();
                vars.push(BigInt::from(t));
                let c = CandidateSolution::from_vars(p.m(), p.d(), &vars);
                let outcome = c.and_then(|c| verify(p, &c).map(|v| (c, v)));
                match outcome {
                    Ok((c, v)) if v.det.abs().is_one() => return Some(Ok((c, v.det))),
                    Ok(_) => {}
                    Err(e) => return Some(Err(e)),
                }
            }
            None
        })
    });
    found.transpose()
}
