//! Residue-level evaluation of the assembled determinant, shared by search
//! and modular enumeration.
//!
//! The last unknown is the bottom-right diagonal entry of `Y`, which occurs
//! exactly once in the assembled matrix, so the determinant is affine in it:
//! `det = a + b·t`. Both loops evaluate `(a, b)` once per assignment of the
//! other unknowns instead of once per value of `t`.

use super::{BlockProblem, FiberType};

pub(crate) struct ResidueForm {
    q: u64,
    m: usize,
    d: usize,
    fiber: FiberType,
    m0: Vec<u64>,
    w: Vec<u64>,
    y_slots: Vec<(usize, usize)>,
    full: Vec<u64>,
    scratch: Vec<u64>,
}

impl ResidueForm {
    pub(crate) fn new(p: &BlockProblem, q: u64) -> Self {
        let (m, d) = (p.m(), p.d());
        let mut y_slots = Vec::with_capacity(d * (d + 1) / 2);
        for i in 0..d {
            for j in i..d {
                y_slots.push((i, j));
            }
        }
        let n = m + d;
        Self {
            q,
            m,
            d,
            fiber: p.fiber(),
            m0: p.m0().residues(q),
            w: p.w().residues(q),
            y_slots,
            full: vec![0; n * n],
            scratch: vec![0; n * n],
        }
    }

    fn size(&self) -> usize {
        self.m + self.d
    }

    fn reduce(&self, v: i64) -> u64 {
        v.rem_euclid(self.q as i64) as u64
    }

    /// Fills the assembled matrix mod `q` from `head` (all unknowns but the last) with `t = 0`.
    fn fill(&mut self, head: &[i64]) {
        let (m, d, n, q) = (self.m, self.d, self.size(), self.q);
        let xr = |s: &Self, i: usize, c: usize| s.reduce(head[i * d + c]);
        for i in 0..m {
            for j in 0..m {
                self.full[i * n + j] = self.m0[i * m + j];
            }
        }
        for i in 0..m {
            for c in 0..d {
                let mut acc = 0u64;
                for k in 0..m {
                    let wk = self.w[i * m + k];
                    if wk != 0 {
                        acc = (acc + wk * xr(self, k, c)) % q;
                    }
                }
                self.full[i * n + m + c] = acc;
                self.full[(m + c) * n + i] = xr(self, i, c);
            }
        }
        let base = m * d;
        for (k, &(a, b)) in self.y_slots.iter().enumerate() {
            let y = if base + k < head.len() { self.reduce(head[base + k]) } else { 0 };
            self.full[(m + a) * n + m + b] = y;
            self.full[(m + b) * n + m + a] = y;
        }
        for i in 0..self.fiber.g {
            let at = (m + 2 * i) * n + m + 2 * i + 1;
            self.full[at] = (self.full[at] + 1) % q;
        }
    }

    /// `(a, b)` with `det ≡ a + b·t (mod q)` where `t` is the last unknown.
    pub(crate) fn affine(&mut self, head: &[i64]) -> (u64, u64) {
        let n = self.size();
        let q = self.q;
        self.fill(head);
        self.scratch.copy_from_slice(&self.full);
        let a = crate::linalg::det_mod_residues(&mut self.scratch, n, q);
        self.scratch.copy_from_slice(&self.full);
        let last = n * n - 1;
        self.scratch[last] = (self.scratch[last] + 1) % q;
        let a1 = crate::linalg::det_mod_residues(&mut self.scratch, n, q);
        (a, (a1 + q - a) % q)
    }
}

/// Calls `f` on every tuple of length `len` over `values`, in lexicographic
/// order of positions in `values`, writing into `buf[offset..]`. Stops at the
/// first `Some`.
pub(crate) fn scan_tuples<T>(
    buf: &mut [i64],
    offset: usize,
    values: &[i64],
    mut f: impl FnMut(&[i64]) -> Option<T>,
) -> Option<T> {
    let len = buf.len() - offset;
    if values.is_empty() && len > 0 {
        return None;
    }
    let mut idx = vec![0usize; len];
    for slot in &mut buf[offset..] {
        *slot = values[0];
    }
    loop {
        if let Some(found) = f(buf) {
            return Some(found);
        }
        let mut pos = len;
        loop {
            if pos == 0 {
                return None;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < values.len() {
                buf[offset + pos] = values[idx[pos]];
                break;
            }
            idx[pos] = 0;
            buf[offset + pos] = values[0];
        }
    }
}

/// All tuples of length `len` over `values`, in lexicographic order.
pub(crate) fn tuples(len: usize, values: &[i64]) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut buf = vec![0i64; len];
    scan_tuples::<()>(&mut buf, 0, values, |t| {
        out.push(t.to_vec());
        None
    });
    out
}
