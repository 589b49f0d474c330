use std::collections::BTreeSet;
use std::sync::atomic::{AtomicBool, Ordering};

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;

use super::enumerate::{scan_tuples, ResidueForm};
use super::{BlockProblem, EngineError};
use crate::linalg::determinant_mod;
use crate::LinalgError;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ObstructionKind {
    /// Every assignment of the unknowns mod `q` was evaluated.
    FullModular,
    /// `X` is square and `M0 ≡ 0`, so `det ≡ ±det(W)·det(X)²`.
    SquareBlock { det_w: u64 },
}

/// Proof that the determinant never reaches `±1`: the residues it can take
/// modulo `modulus` (a superset, for the square-block rule) miss both `1` and `q-1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ObstructionCertificate {
    pub kind: ObstructionKind,
    pub modulus: u64,
    pub attainable: Vec<u64>,
}

impl ObstructionCertificate {
    fn from_set(kind: ObstructionKind, modulus: u64, set: &[bool]) -> Option<Self> {
        if set[1 % modulus as usize] || set[(modulus - 1) as usize] {
            return None;
        }
        let attainable = (0..modulus).filter(|&r| set[r as usize]).collect();
        Some(Self { kind, modulus, attainable })
    }

    /// Recomputes the residue set for `p` and checks it against the stored one.
    pub fn recheck(&self, p: &BlockProblem, budget: u64) -> Result<bool, EngineError> {
        let fresh = match self.kind {
            ObstructionKind::FullModular => {
                let set = attainable_residues(p, self.modulus, budget, false)?;
                ObstructionCertificate::from_set(ObstructionKind::FullModular, self.modulus, &set)
            }
            ObstructionKind::SquareBlock { .. } => match square_block_obstruction(p, self.modulus) {
                Err(EngineError::Inapplicable(_)) => None,
                other => other?,
            },
        };
        Ok(fresh.as_ref() == Some(self))
    }
}

fn check_modulus(q: u64) -> Result<(), EngineError> {
    if !(2..1 << 16).contains(&q) {
        return Err(LinalgError::BadModulus(q).into());
    }
    Ok(())
}

/// Residues mod `q` taken by the assembled determinant over all unknowns mod `q`.
/// With `stop_at_units`, enumeration may end early once `1` and `q-1` are both seen.
pub(crate) fn attainable_residues(
    p: &BlockProblem,
    q: u64,
    budget: u64,
    stop_at_units: bool,
) -> Result<Vec<bool>, EngineError> {
    check_modulus(q)?;
    let v = p.variable_count();
    let required = BigInt::from(q).pow(v as u32);
    if required > BigInt::from(budget) {
        return Err(EngineError::Capacity { required, budget });
    }
    let head_len = v - 1;
    let values: Vec<i64> = (0..q as i64).collect();
    let split: Vec<i64> = if head_len == 0 { vec![0] } else { values.clone() };
    let stop = AtomicBool::new(false);
    let qs = q as usize;

    let sets: Vec<Vec<bool>> = split
        .par_iter()
        .map(|&first| {
            let mut seen = vec![false; qs];
            let mut form = ResidueForm::new(p, q);
            let mut head = vec![0i64; head_len];
            let offset = if head_len == 0 { 0 } else { 1 };
            if head_len > 0 {
                head[0] = first;
            }
            scan_tuples::<()>(&mut head, offset, &values, |head| {
                if stop_at_units && stop.load(Ordering::Relaxed) {
                    return Some(());
                }
                let (a, b) = form.affine(head);
                let mut r = a;
                for _ in 0..q {
                    seen[r as usize] = true;
                    r = (r + b) % q;
                }
                if stop_at_units && seen[1] && seen[qs - 1] {
                    stop.store(true, Ordering::Relaxed);
                    return Some(());
                }
                None
            });
            seen
        })
        .collect();

    let mut out = vec![false; qs];
    for s in sets {
        for (o, x) in out.iter_mut().zip(s) {
            *o |= x;
        }
    }
    Ok(out)
}

/// Enumerates all `q^v` residue assignments (`v` = number of unknowns) and
/// returns a certificate when neither `1` nor `-1` is attained mod `q`.
/// Fails with [`EngineError::Capacity`] when `q^v > budget`.
pub fn modular_obstruction(p: &BlockProblem, q: u64, budget: u64) -> Result<Option<ObstructionCertificate>, EngineError> {
    let set = attainable_residues(p, q, budget, true)?;
    Ok(ObstructionCertificate::from_set(ObstructionKind::FullModular, q, &set))
}

/// For square `X` (`m = 2g+n`) and `M0 ≡ 0 (mod q)` the determinant is
/// `(-1)^m det(W) det(X)²` mod `q`; the certificate records
/// `{±det(W)·s : s a square mod q}`.
pub fn square_block_obstruction(p: &BlockProblem, q: u64) -> Result<Option<ObstructionCertificate>, EngineError> {
    check_modulus(q)?;
    if p.m() != p.d() {
        return Err(EngineError::Inapplicable(format!("X is {}x{}, not square", p.m(), p.d())));
    }
    if !p.m0().residues(q).iter().all(Zero::is_zero) {
        return Err(EngineError::Inapplicable(format!("M0 is not zero mod {q}")));
    }
    let det_w = determinant_mod(p.w(), q)?;
    let squares: BTreeSet<u64> = (0..q).map(|s| s * s % q).collect();
    let mut set = vec![false; q as usize];
    for s in squares {
        let r = det_w * s % q;
        set[r as usize] = true;
        set[((q - r) % q) as usize] = true;
    }
    Ok(ObstructionCertificate::from_set(ObstructionKind::SquareBlock { det_w }, q, &set))
}
