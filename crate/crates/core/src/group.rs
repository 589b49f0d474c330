use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::linalg::cokernel;
use crate::{IntMatrix, LinalgError};

/// Finitely generated abelian group `Z^r ⊕ Z/d₁ ⊕ … ⊕ Z/d_s` with `1 < d₁ | d₂ | … | d_s`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct AbelianGroup {
    free_rank: usize,
    invariant_factors: Vec<BigInt>,
}

impl AbelianGroup {
    pub fn new(free_rank: usize, invariant_factors: Vec<BigInt>) -> Result<Self, LinalgError> {
        for (i, f) in invariant_factors.iter().enumerate() {
            if *f <= BigInt::one() {
                return Err(LinalgError::BadInvariantFactor(f.clone()));
            }
            if let Some(next) = invariant_factors.get(i + 1) {
                if !(next % f).is_zero() {
                    return Err(LinalgError::BadInvariantFactor(next.clone()));
                }
            }
        }
        Ok(Self { free_rank, invariant_factors })
    }

    pub fn trivial() -> Self {
        Self::default()
    }

    /// `Z^free_rank ⊕ ⊕ Z/orders[i]` for arbitrary cyclic orders (0 meaning `Z`,
    /// 1 meaning trivial), brought into invariant-factor form.
    pub fn from_cyclic(free_rank: usize, orders: &[BigInt]) -> Self {
        let mut diag = vec![BigInt::zero(); free_rank];
        diag.extend(orders.iter().cloned());
        cokernel(&IntMatrix::diagonal(&diag))
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.invariant_factors
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.invariant_factors.is_empty()
    }

    /// Minimal number of generators.
    pub fn rank(&self) -> usize {
        self.free_rank + self.invariant_factors.len()
    }

    /// Order of the group, `None` when infinite.
    pub fn order(&self) -> Option<BigInt> {
        (self.free_rank == 0).then(|| self.invariant_factors.iter().product())
    }

    pub fn torsion(&self) -> AbelianGroup {
        Self { free_rank: 0, invariant_factors: self.invariant_factors.clone() }
    }

    pub fn direct_sum(&self, other: &AbelianGroup) -> AbelianGroup {
        let mut orders = self.invariant_factors.clone();
        orders.extend(other.invariant_factors.iter().cloned());
        Self::from_cyclic(self.free_rank + other.free_rank, &orders)
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "trivial");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.invariant_factors.iter().map(|d| format!("Z/{d}")));
        write!(f, "{}", parts.join(" ⊕ "))
    }
}
