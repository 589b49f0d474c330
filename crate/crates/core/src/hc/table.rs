//! Upper bounds for `hc` imported as values: fibered surfaces known for the
//! summands, combined by subadditivity under connected sum.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::linking::{normalize, GeneratorTerm, LinkingDecomposition};

use super::{HcError, ManifoldSpec};

/// An upper bound together with the summand values it was assembled from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpperBound {
    pub genus: usize,
    pub chain: Vec<String>,
}

/// Largest modulus for which quadratic residues are decided by enumeration.
const RESIDUE_SCAN_LIMIT: u64 = 1 << 20;

/// `Some(true)` if `q` or `-q` is a square mod `p`; `None` if `p` is too large to scan.
pub fn plus_or_minus_square(p: &BigInt, q: &BigInt) -> Option<bool> {
    let p = p.to_u64().filter(|&p| p <= RESIDUE_SCAN_LIMIT)?;
    let q = q.mod_floor(&BigInt::from(p)).to_u64().expect("reduced");
    let neg = (p - q) % p;
    Some((0..p).any(|x| {
        let s = x * x % p;
        s == q || s == neg
    }))
}

/// Value for `(#^j S²×S¹) # M(t)` when one is known.
fn entry(t: &GeneratorTerm, j: usize) -> Option<usize> {
    match t {
        GeneratorTerm::A { p, q } => {
            let m = j / 2;
            if j % 2 == 0 {
                Some(m + 1)
            } else {
                match plus_or_minus_square(p, q) {
                    Some(true) => Some(m + 1),
                    _ => Some(m + 2),
                }
            }
        }
        GeneratorTerm::E0 { k } => match j {
            0 if *k == 1 => Some(1),
            0..=2 => Some(2),
            _ => None,
        },
        GeneratorTerm::E1 { k } => match j {
            0 if *k == 2 => Some(1),
            0 => Some(2),
            1 if *k >= 3 => Some(2),
            _ => None,
        },
    }
}

fn describe(t: &GeneratorTerm, j: usize, v: usize) -> String {
    if j == 0 {
        format!("M({t}): {v}")
    } else {
        format!("#{j}(S2xS1) # M({t}): {v}")
    }
}

/// Best bound from the value table and subadditivity; decomposition input only.
pub fn known_upper_bounds(spec: &ManifoldSpec) -> Result<Option<UpperBound>, HcError> {
    let ManifoldSpec::Decomposition(d) = spec else {
        return Err(HcError::Unsupported("upper-bound table needs a linking decomposition".into()));
    };
    Ok(table_bound(&normalize(d)?))
}

fn table_bound(d: &LinkingDecomposition) -> Option<UpperBound> {
    let r = d.free_rank;
    // best[u] = cheapest chain using u free summands on the torsion terms so far
    let mut best: Vec<Option<(usize, Vec<String>)>> = vec![None; r + 1];
    best[0] = Some((0, vec![]));
    for t in &d.terms {
        let mut next: Vec<Option<(usize, Vec<String>)>> = vec![None; r + 1];
        for (used, cur) in best.iter().enumerate() {
            let Some((cost, chain)) = cur else { continue };
            for j in 0..=r - used {
                let Some(v) = entry(t, j) else { continue };
                let total = cost + v;
                let slot = &mut next[used + j];
                if slot.as_ref().is_none_or(|(c, _)| total < *c) {
                    let mut chain = chain.clone();
                    chain.push(describe(t, j, v));
                    *slot = Some((total, chain));
                }
            }
        }
        best = next;
    }
    best.into_iter()
        .enumerate()
        .filter_map(|(used, cur)| {
            let (cost, mut chain) = cur?;
            let rest = r - used;
            if !rest.is_zero() {
                chain.push(format!("#{rest}(S2xS1): {}", rest.div_ceil(2)));
            }
            Some((cost + rest.div_ceil(2), chain))
        })
        .min_by_key(|(cost, _)| *cost)
        .map(|(genus, chain)| UpperBound { genus, chain })
}
