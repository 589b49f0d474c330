//! Linkings on finite abelian groups, expressed through the generators
//! `A(p,q)`, `E0(k)`, `E1(k)`, and the block matrices `S`, `T` that a
//! decomposition contributes to the existence equation.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::group::AbelianGroup;
use crate::linalg::{determinant, frac_mod_one, rational_inverse, smith_normal_form, RatMatrix};
use crate::{IntMatrix, LinalgError};

/// Default cap on group order for [`gram_equivalent`].
pub const DEFAULT_ORDER_BOUND: u64 = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinkingError {
    #[error("term {index}: {reason}")]
    InvalidTerm { index: usize, reason: String },
    #[error("det B = 0: not a rational homology sphere")]
    NotRationalHomologySphere,
    #[error("A·Bᵗ is not symmetric; (A, B) are not blocks of a symplectic gluing matrix")]
    NotSymplectic,
    #[error("malformed gram: {0}")]
    MalformedGram(String),
    #[error("group order {order} exceeds enumeration bound {bound}")]
    Capacity { order: BigInt, bound: u64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GeneratorTerm {
    A { p: BigInt, q: BigInt },
    E0 { k: u32 },
    E1 { k: u32 },
}

impl GeneratorTerm {
    pub fn a(p: i64, q: i64) -> Self {
        Self::A { p: p.into(), q: q.into() }
    }

    /// `A(1, q)`, `E0(0)` and `E1(0)` stand for the trivial linking.
    pub fn is_trivial(&self) -> bool {
        match self {
            Self::A { p, .. } => p.is_one(),
            Self::E0 { k } | Self::E1 { k } => *k == 0,
        }
    }

    fn check(&self) -> Result<(), String> {
        match self {
            Self::A { p, q } => {
                if *p < BigInt::one() {
                    return Err(format!("A({p},{q}) needs p >= 1"));
                }
                if !p.gcd(q).is_one() {
                    return Err(format!("A({p},{q}) needs gcd(p, q) = 1"));
                }
            }
            Self::E0 { .. } => {}
            Self::E1 { k } => {
                if *k == 1 {
                    return Err("E1(k) needs k >= 2".into());
                }
            }
        }
        Ok(())
    }

    /// Number of rows this term contributes to `S`/`T`.
    pub fn size(&self) -> usize {
        match self {
            Self::A { .. } => 1,
            _ => 2,
        }
    }

    /// Orders of the cyclic summands carrying this linking.
    pub fn cyclic_orders(&self) -> Vec<BigInt> {
        match self {
            Self::A { p, .. } => vec![p.clone()],
            Self::E0 { k } | Self::E1 { k } => vec![pow2(*k); 2],
        }
    }
}

impl fmt::Display for GeneratorTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::A { p, q } => write!(f, "A({p},{q})"),
            Self::E0 { k } => write!(f, "E0({k})"),
            Self::E1 { k } => write!(f, "E1({k})"),
        }
    }
}

pub(crate) fn pow2(k: u32) -> BigInt {
    BigInt::one() << k
}

/// Free rank plus an ordered list of generator terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct LinkingDecomposition {
    pub free_rank: usize,
    pub terms: Vec<GeneratorTerm>,
}

impl LinkingDecomposition {
    pub fn new(free_rank: usize, terms: Vec<GeneratorTerm>) -> Self {
        Self { free_rank, terms }
    }

    pub fn is_empty(&self) -> bool {
        self.free_rank == 0 && self.terms.iter().all(GeneratorTerm::is_trivial)
    }

    /// First homology `Z^r ⊕ TH₁` of any manifold with this decomposition.
    pub fn homology(&self) -> AbelianGroup {
        let orders: Vec<BigInt> = self.terms.iter().flat_map(GeneratorTerm::cyclic_orders).collect();
        AbelianGroup::from_cyclic(self.free_rank, &orders)
    }

    /// Torsion linking form as a direct sum of the generator grams.
    pub fn gram(&self) -> Result<LinkingGram, LinkingError> {
        let d = normalize(self)?;
        d.terms.iter().try_fold(LinkingGram::trivial(), |acc, t| Ok(acc.direct_sum(&gram_of_generator(t)?)))
    }
}

impl fmt::Display for LinkingDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.free_rank > 0 {
            parts.push(format!("#{}(S2xS1)", self.free_rank));
        }
        parts.extend(self.terms.iter().map(|t| format!("M({t})")));
        if parts.is_empty() {
            write!(f, "S3")
        } else {
            write!(f, "{}", parts.join(" # "))
        }
    }
}

/// Drops trivial terms and sorts the rest (A by (p,q), then E0, then E1, each by k).
pub fn normalize(d: &LinkingDecomposition) -> Result<LinkingDecomposition, LinkingError> {
    let mut terms = Vec::with_capacity(d.terms.len());
    for (index, t) in d.terms.iter().enumerate() {
        if t.is_trivial() {
            continue;
        }
        t.check().map_err(|reason| LinkingError::InvalidTerm { index, reason })?;
        terms.push(t.clone());
    }
    terms.sort();
    Ok(LinkingDecomposition { free_rank: d.free_rank, terms })
}

pub fn direct_sum(a: &LinkingDecomposition, b: &LinkingDecomposition) -> Result<LinkingDecomposition, LinkingError> {
    let mut terms = a.terms.clone();
    terms.extend(b.terms.iter().cloned());
    normalize(&LinkingDecomposition { free_rank: a.free_rank + b.free_rank, terms })
}

/// `(S, T)` for a decomposition, assembled as `free ⊕ A-terms ⊕ E0-terms ⊕ E1-terms`.
pub fn theorem_matrices(d: &LinkingDecomposition) -> Result<(IntMatrix, IntMatrix), LinkingError> {
    let d = normalize(d)?;
    let mut s = IntMatrix::zeros(d.free_rank, d.free_rank);
    let mut t = IntMatrix::identity(d.free_rank);
    for term in &d.terms {
        let (bs, bt) = term_blocks(term);
        s = s.direct_sum(&bs);
        t = t.direct_sum(&bt);
    }
    Ok((s, t))
}

pub(crate) fn term_blocks(term: &GeneratorTerm) -> (IntMatrix, IntMatrix) {
    match term {
        GeneratorTerm::A { p, q } => (IntMatrix::diagonal(&[p.clone()]), IntMatrix::diagonal(&[-q])),
        GeneratorTerm::E0 { k } => {
            let a = pow2(*k);
            let mut s = IntMatrix::zeros(2, 2);
            s[(0, 1)] = a.clone();
            s[(1, 0)] = a;
            (s, IntMatrix::identity(2))
        }
        GeneratorTerm::E1 { k } => {
            let a = pow2(*k);
            let s = IntMatrix::from_rows(vec![
                vec![&a * 2, -&a],
                vec![&a * -3, &a * 2],
            ])
            .expect("2x2");
            (s, IntMatrix::diagonal(&[-1i64, -3]))
        }
    }
}

/// A symmetric pairing `G × G → Q/Z` on `G = ⊕ Z/orders[i]`, given on the
/// cyclic generators. Entries are kept reduced into `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkingGram {
    orders: Vec<BigInt>,
    gram: Vec<Vec<BigRational>>,
}

impl LinkingGram {
    pub fn new(orders: Vec<BigInt>, gram: Vec<Vec<BigRational>>) -> Result<Self, LinkingError> {
        let n = orders.len();
        if gram.len() != n || gram.iter().any(|r| r.len() != n) {
            return Err(LinkingError::MalformedGram(format!("expected {n}x{n} entries")));
        }
        if let Some(o) = orders.iter().find(|o| !o.is_positive()) {
            return Err(LinkingError::MalformedGram(format!("generator order {o} must be positive")));
        }
        let gram: Vec<Vec<BigRational>> =
            gram.iter().map(|r| r.iter().map(frac_mod_one).collect()).collect();
        for i in 0..n {
            for j in 0..n {
                if gram[i][j] != gram[j][i] {
                    return Err(LinkingError::MalformedGram(format!("entry ({i},{j}) breaks symmetry")));
                }
                let scaled = &gram[i][j] * BigRational::from_integer(orders[i].clone());
                if !scaled.is_integer() {
                    return Err(LinkingError::MalformedGram(format!(
                        "order({i}) * gram[{i}][{j}] is not integral"
                    )));
                }
            }
        }
        Ok(Self { orders, gram })
    }

    pub fn trivial() -> Self {
        Self { orders: vec![], gram: vec![] }
    }

    pub fn orders(&self) -> &[BigInt] {
        &self.orders
    }

    pub fn entries(&self) -> &[Vec<BigRational>] {
        &self.gram
    }

    pub fn group(&self) -> AbelianGroup {
        AbelianGroup::from_cyclic(0, &self.orders)
    }

    pub fn order(&self) -> BigInt {
        self.orders.iter().product()
    }

    /// The linking of the oppositely oriented manifold.
    pub fn negated(&self) -> Self {
        let gram = self.gram.iter().map(|r| r.iter().map(|x| frac_mod_one(&-x)).collect()).collect();
        Self { orders: self.orders.clone(), gram }
    }

    pub fn direct_sum(&self, other: &LinkingGram) -> Self {
        let (n, m) = (self.orders.len(), other.orders.len());
        let mut gram = vec![vec![BigRational::zero(); n + m]; n + m];
        for i in 0..n {
            for j in 0..n {
                gram[i][j] = self.gram[i][j].clone();
            }
        }
        for i in 0..m {
            for j in 0..m {
                gram[n + i][n + j] = other.gram[i][j].clone();
            }
        }
        let mut orders = self.orders.clone();
        orders.extend(other.orders.iter().cloned());
        Self { orders, gram }
    }

    /// Brute-force check that `x ↦ ψ(x, ·)` has trivial kernel.
    pub fn is_nonsingular(&self, order_bound: u64) -> Result<bool, LinkingError> {
        let g = FiniteGram::from_gram(self, order_bound)?;
        let zero_pairing = |e: &[u64]| (0..g.orders.len()).all(|b| g.pair_with_generator(e, b) == 0);
        let nonsingular = g.elements().skip(1).all(|e| !zero_pairing(&e));
        Ok(nonsingular)
    }
}

impl fmt::Display for LinkingGram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .gram
            .iter()
            .map(|r| format!("[{}]", r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")))
            .collect();
        let orders: Vec<String> = self.orders.iter().map(|o| format!("Z/{o}")).collect();
        write!(f, "[{}] on {}", rows.join(", "), if orders.is_empty() { "0".into() } else { orders.join(" ⊕ ") })
    }
}

pub fn gram_of_generator(t: &GeneratorTerm) -> Result<LinkingGram, LinkingError> {
    t.check().map_err(|reason| LinkingError::InvalidTerm { index: 0, reason })?;
    if t.is_trivial() {
        return Ok(LinkingGram::trivial());
    }
    let r = |n: BigInt, d: BigInt| BigRational::new(n, d);
    match t {
        GeneratorTerm::A { p, q } => LinkingGram::new(vec![p.clone()], vec![vec![r(q.clone(), p.clone())]]),
        GeneratorTerm::E0 { k } => {
            let a = pow2(*k);
            let off = r(BigInt::one(), a.clone());
            LinkingGram::new(
                vec![a.clone(), a],
                vec![vec![BigRational::zero(), off.clone()], vec![off, BigRational::zero()]],
            )
        }
        GeneratorTerm::E1 { k } => {
            let a = pow2(*k);
            let diag = r(BigInt::from(2), a.clone());
            let off = r(BigInt::one(), a.clone());
            LinkingGram::new(vec![a.clone(), a], vec![vec![diag.clone(), off.clone()], vec![off, diag]])
        }
    }
}

/// Blocks `A`, `B` of the homology gluing matrix of a genus-`g` Heegaard splitting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeegaardGluingData {
    pub a: IntMatrix,
    pub b: IntMatrix,
}

impl HeegaardGluingData {
    pub fn new(a: IntMatrix, b: IntMatrix) -> Result<Self, LinkingError> {
        if !a.is_square() || a.rows() != b.rows() || a.cols() != b.cols() {
            return Err(LinalgError::DimensionMismatch {
                left: (a.rows(), a.cols()),
                right: (b.rows(), b.cols()),
            }
            .into());
        }
        Ok(Self { a, b })
    }

    pub fn genus(&self) -> usize {
        self.a.rows()
    }

    fn check(&self) -> Result<(), LinkingError> {
        if determinant(&self.b)?.is_zero() {
            return Err(LinkingError::NotRationalHomologySphere);
        }
        let abt = self.a.mul(&self.b.transpose())?;
        if !abt.is_symmetric() {
            return Err(LinkingError::NotSymplectic);
        }
        Ok(())
    }
}

/// `-B⁻¹A` reduced mod 1: the pairing on the images of the standard basis vectors.
pub fn heegaard_pairing(h: &HeegaardGluingData) -> Result<RatMatrix, LinkingError> {
    h.check()?;
    let binv = rational_inverse(&h.b)?;
    Ok(binv.mul(&RatMatrix::from_int(&h.a))?.neg().mod_one())
}

/// Torsion linking form of the rational homology sphere glued from `h`,
/// on the Smith-normal-form generators of `Z^g / BᵗZ^g`.
pub fn linking_form_from_heegaard(h: &HeegaardGluingData) -> Result<LinkingGram, LinkingError> {
    let pairing = heegaard_pairing(h)?;
    let g = h.genus();
    // rows of B are the relations; v ↦ v·V identifies the quotient with ⊕ Z/dᵢ
    let snf = smith_normal_form(&h.b);
    let vinv = rational_inverse(&snf.v)?;
    let mut orders = Vec::new();
    let mut gens: Vec<Vec<BigRational>> = Vec::new();
    for (i, d) in snf.diagonal().into_iter().enumerate() {
        if d > BigInt::one() {
            orders.push(d);
            gens.push((0..g).map(|j| vinv.get(i, j).clone()).collect());
        }
    }
    let n = gens.len();
    let mut gram = vec![vec![BigRational::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = BigRational::zero();
            for a in 0..g {
                for b in 0..g {
                    acc += &gens[i][a] * pairing.get(a, b) * &gens[j][b];
                }
            }
            gram[i][j] = acc;
        }
    }
    LinkingGram::new(orders, gram)
}

/// Whether some group isomorphism carries `g1` to `g2`, by enumerating
/// generator images with matching orders and pairings.
pub fn gram_equivalent(g1: &LinkingGram, g2: &LinkingGram, order_bound: u64) -> Result<bool, LinkingError> {
    let a = FiniteGram::from_gram(g1, order_bound)?;
    let b = FiniteGram::from_gram(g2, order_bound)?;
    if g1.group() != g2.group() {
        return Ok(false);
    }
    let modulus = lcm_u64(a.modulus, b.modulus);
    let a = a.rescaled(modulus);
    let b = b.rescaled(modulus);

    let elements: Vec<Vec<u64>> = b.elements().collect();
    let orders: Vec<u64> = elements.iter().map(|e| b.element_order(e)).collect();
    let mut images: Vec<usize> = Vec::with_capacity(a.orders.len());
    Ok(extend_isomorphism(&a, &b, &elements, &orders, &mut images))
}

fn extend_isomorphism(
    a: &FiniteGram,
    b: &FiniteGram,
    elements: &[Vec<u64>],
    orders: &[u64],
    images: &mut Vec<usize>,
) -> bool {
    let i = images.len();
    if i == a.orders.len() {
        return is_injective(a, b, elements, images);
    }
    for (h, e) in elements.iter().enumerate() {
        if orders[h] != a.orders[i] || b.pair(e, e) != a.gram[i][i] {
            continue;
        }
        if images.iter().enumerate().any(|(j, &hj)| b.pair(e, &elements[hj]) != a.gram[i][j]) {
            continue;
        }
        images.push(h);
        if extend_isomorphism(a, b, elements, orders, images) {
            return true;
        }
        images.pop();
    }
    false
}

fn is_injective(a: &FiniteGram, b: &FiniteGram, elements: &[Vec<u64>], images: &[usize]) -> bool {
    let mut seen = std::collections::HashSet::new();
    a.elements().all(|coeffs| {
        let mut img = vec![0u64; b.orders.len()];
        for (c, &h) in coeffs.iter().zip(images) {
            for (slot, (x, n)) in img.iter_mut().zip(elements[h].iter().zip(&b.orders)) {
                *slot = (*slot + c * x) % n;
            }
        }
        seen.insert(img)
    })
}

/// A gram with small orders, entries scaled to integers mod `modulus`.
struct FiniteGram {
    orders: Vec<u64>,
    modulus: u64,
    gram: Vec<Vec<u64>>,
}

impl FiniteGram {
    fn from_gram(g: &LinkingGram, bound: u64) -> Result<Self, LinkingError> {
        let order = g.order();
        if order > BigInt::from(bound) {
            return Err(LinkingError::Capacity { order, bound });
        }
        let orders: Vec<u64> = g.orders.iter().map(|o| o.to_u64().expect("bounded")).collect();
        let modulus = orders.iter().copied().fold(1, lcm_u64);
        let scale = BigRational::from_integer(modulus.into());
        let gram = g
            .gram
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| {
                        let y = x * &scale;
                        debug_assert!(y.is_integer());
                        y.to_integer().to_u64().expect("entry in [0, modulus)")
                    })
                    .collect()
            })
            .collect();
        Ok(Self { orders, modulus, gram })
    }

    fn rescaled(self, modulus: u64) -> Self {
        let f = modulus / self.modulus;
        let gram = self.gram.iter().map(|r| r.iter().map(|x| x * f).collect()).collect();
        Self { orders: self.orders, modulus, gram }
    }

    fn pair(&self, x: &[u64], y: &[u64]) -> u64 {
        let n = self.orders.len();
        let mut acc = 0u64;
        for i in 0..n {
            if x[i] == 0 {
                continue;
            }
            for j in 0..n {
                acc = (acc + x[i] * y[j] % self.modulus * self.gram[i][j]) % self.modulus;
            }
        }
        acc
    }

    fn pair_with_generator(&self, x: &[u64], b: usize) -> u64 {
        let mut acc = 0u64;
        for (i, xi) in x.iter().enumerate() {
            acc = (acc + xi * self.gram[i][b]) % self.modulus;
        }
        acc
    }

    fn element_order(&self, e: &[u64]) -> u64 {
        e.iter().zip(&self.orders).fold(1, |acc, (&c, &n)| lcm_u64(acc, n / c.gcd(&n)))
    }

    /// All elements in mixed-radix order, starting with zero.
    fn elements(&self) -> impl Iterator<Item = Vec<u64>> + '_ {
        let total: u64 = self.orders.iter().product();
        (0..total).map(move |mut idx| {
            let mut e = vec![0u64; self.orders.len()];
            for (slot, &n) in e.iter_mut().zip(&self.orders).rev() {
                *slot = idx % n;
                idx /= n;
            }
            e
        })
    }
}

fn lcm_u64(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn normalize_drops_trivial_terms() {
        let d = LinkingDecomposition::new(0, vec![GeneratorTerm::a(1, 5), GeneratorTerm::E0 { k: 2 }]);
        assert_eq!(normalize(&d).unwrap(), LinkingDecomposition::new(0, vec![GeneratorTerm::E0 { k: 2 }]));
        let d = LinkingDecomposition::new(2, vec![]);
        assert_eq!(normalize(&d).unwrap(), d);
        let d = LinkingDecomposition::new(0, vec![GeneratorTerm::E1 { k: 2 }, GeneratorTerm::a(3, 1)]);
        assert_eq!(normalize(&d).unwrap().terms, vec![GeneratorTerm::a(3, 1), GeneratorTerm::E1 { k: 2 }]);
    }

    #[test]
    fn normalize_rejects_bad_terms() {
        for (t, idx) in [
            (GeneratorTerm::a(4, 2), 1),
            (GeneratorTerm::a(-3, 1), 1),
            (GeneratorTerm::E1 { k: 1 }, 1),
        ] {
            let d = LinkingDecomposition::new(0, vec![GeneratorTerm::a(3, 1), t]);
            assert!(matches!(normalize(&d), Err(LinkingError::InvalidTerm { index, .. }) if index == idx));
        }
    }

    #[test]
    fn direct_sum_examples() {
        let d = LinkingDecomposition::new(1, vec![GeneratorTerm::a(3, 1)]);
        let s = direct_sum(&d, &d).unwrap();
        assert_eq!(s, LinkingDecomposition::new(2, vec![GeneratorTerm::a(3, 1), GeneratorTerm::a(3, 1)]));
        assert_eq!(direct_sum(&LinkingDecomposition::default(), &d).unwrap(), d);
    }

    #[test]
    fn theorem_matrices_examples() {
        let (s, t) = theorem_matrices(&LinkingDecomposition::default()).unwrap();
        assert_eq!((s, t), (IntMatrix::empty(), IntMatrix::empty()));

        let (s, t) = theorem_matrices(&LinkingDecomposition::new(0, vec![GeneratorTerm::a(7, 3)])).unwrap();
        assert_eq!((s, t), (IntMatrix::from([[7]]), IntMatrix::from([[-3]])));

        let (s, t) = theorem_matrices(&LinkingDecomposition::new(0, vec![GeneratorTerm::E1 { k: 2 }])).unwrap();
        assert_eq!(s, IntMatrix::from([[8, -4], [-12, 8]]));
        assert_eq!(t, IntMatrix::from([[-1, 0], [0, -3]]));

        let (s, t) = theorem_matrices(&LinkingDecomposition::new(1, vec![GeneratorTerm::E0 { k: 1 }])).unwrap();
        assert_eq!(s, IntMatrix::from([[0, 0, 0], [0, 0, 2], [0, 2, 0]]));
        assert_eq!(t, IntMatrix::identity(3));
    }

    #[test]
    fn generator_grams() {
        let g = gram_of_generator(&GeneratorTerm::a(5, 2)).unwrap();
        assert_eq!(g.entries(), &[vec![rat(2, 5)]]);
        let g = gram_of_generator(&GeneratorTerm::E0 { k: 1 }).unwrap();
        assert_eq!(g.entries(), &[vec![rat(0, 1), rat(1, 2)], vec![rat(1, 2), rat(0, 1)]]);
        let g = gram_of_generator(&GeneratorTerm::E1 { k: 2 }).unwrap();
        assert_eq!(g.entries(), &[vec![rat(1, 2), rat(1, 4)], vec![rat(1, 4), rat(1, 2)]]);
    }

    #[test]
    fn lens_heegaard_form() {
        // p = 5, q = 2: r = 2, s = -1 gives -rq - sp = -4 + 5 = 1
        let h = HeegaardGluingData::new(IntMatrix::from([[-2]]), IntMatrix::from([[-5]])).unwrap();
        let g = linking_form_from_heegaard(&h).unwrap();
        assert_eq!(g.orders(), &[BigInt::from(5)]);
        assert_eq!(g.entries(), &[vec![rat(3, 5)]]);
        assert!(gram_equivalent(&g, &gram_of_generator(&GeneratorTerm::a(5, 2)).unwrap(), 4096).unwrap());
    }

    #[test]
    fn heegaard_rejects_degenerate_input() {
        let h = HeegaardGluingData::new(IntMatrix::from([[1]]), IntMatrix::from([[0]])).unwrap();
        assert_eq!(linking_form_from_heegaard(&h), Err(LinkingError::NotRationalHomologySphere));
        let h = HeegaardGluingData::new(IntMatrix::from([[1, 0], [0, 1]]), IntMatrix::from([[1, 1], [0, 1]])).unwrap();
        assert_eq!(linking_form_from_heegaard(&h), Err(LinkingError::NotSymplectic));
    }

    #[test]
    fn gram_equivalence_small_cases() {
        let a51 = gram_of_generator(&GeneratorTerm::a(5, 1)).unwrap();
        let a52 = gram_of_generator(&GeneratorTerm::a(5, 2)).unwrap();
        let a54 = gram_of_generator(&GeneratorTerm::a(5, 4)).unwrap();
        assert!(!gram_equivalent(&a51, &a52, 4096).unwrap());
        assert!(gram_equivalent(&a51, &a54, 4096).unwrap());
        assert!(gram_equivalent(&a51, &a51, 4096).unwrap());
        let e0 = gram_of_generator(&GeneratorTerm::E0 { k: 3 }).unwrap();
        let e1 = gram_of_generator(&GeneratorTerm::E1 { k: 3 }).unwrap();
        assert!(!gram_equivalent(&e0, &e1, 4096).unwrap());
        assert!(!gram_equivalent(&a51, &e0, 4096).unwrap());
    }

    #[test]
    fn gram_equivalence_capacity() {
        let big = gram_of_generator(&GeneratorTerm::E0 { k: 7 }).unwrap();
        assert!(matches!(gram_equivalent(&big, &big, 4096), Err(LinkingError::Capacity { .. })));
    }

    #[test]
    fn generators_are_nonsingular() {
        for t in [GeneratorTerm::a(9, 2), GeneratorTerm::E0 { k: 2 }, GeneratorTerm::E1 { k: 3 }] {
            assert!(gram_of_generator(&t).unwrap().is_nonsingular(4096).unwrap(), "{t}");
        }
        let degenerate = LinkingGram::new(vec![BigInt::from(2)], vec![vec![rat(0, 1)]]).unwrap();
        assert!(!degenerate.is_nonsingular(4096).unwrap());
    }

    #[test]
    fn negation_changes_a_class() {
        // A(5,1) and A(5,-1) = A(5,4) agree; A(7,1) and A(7,-1) do not (-1 is not a square mod 7)
        let a = gram_of_generator(&GeneratorTerm::a(7, 1)).unwrap();
        assert!(!gram_equivalent(&a, &a.negated(), 4096).unwrap());
        assert_eq!(a.negated().entries(), &[vec![rat(6, 7)]]);
    }

    #[test]
    fn gram_rejects_asymmetric() {
        let r = LinkingGram::new(
            vec![BigInt::from(4), BigInt::from(4)],
            vec![vec![rat(0, 1), rat(1, 4)], vec![rat(1, 2), rat(0, 1)]],
        );
        assert!(matches!(r, Err(LinkingError::MalformedGram(_))));
    }
}
