//! The projective line over Z/N, indexing Manin symbols.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_integer::Integer;

use crate::arith::{inv_mod, xgcd};

/// Levels up to this use a dense `N x N` lookup table.
const DENSE_LIMIT: u64 = 2048;

#[derive(Clone, Debug)]
pub struct P1List {
    n: u64,
    elements: Vec<(u64, u64)>,
    dense: Vec<u32>,
    sparse: BTreeMap<(u64, u64), u32>,
}

const NONE: u32 = u32::MAX;

/// Canonical representative of `(c : d)`: first coordinate `gcd(c, N)`, second
/// minimized over the stabilizer. `None` when `gcd(c, d, N) != 1`.
pub fn normalize(n: u64, c: i64, d: i64) -> Option<(u64, u64)> {
    if n == 1 {
        return Some((0, 0));
    }
    let ni = n as i64;
    let c = c.rem_euclid(ni);
    let d = d.rem_euclid(ni);
    let g = c.gcd(&ni);
    if g.gcd(&d) != 1 {
        return None;
    }
    // unit s with s c = g (mod N)
    let ng = ni / g;
    let (_, s0, _) = xgcd(c / g, ng);
    let mut s = s0.rem_euclid(ng);
    while s.gcd(&ni) != 1 {
        s += ng;
    }
    let d1 = ((s as i128 * d as i128).rem_euclid(ni as i128)) as i64;
    // stabilizer of g: t = 1 (mod N/g)
    let mut best = d1;
    let mut t = 1i64;
    for _ in 1..g {
        t += ng;
        if t.gcd(&ni) == 1 {
            let cand = ((t as i128 * d1 as i128).rem_euclid(ni as i128)) as i64;
            best = best.min(cand);
        }
    }
    Some(((g % ni) as u64, best as u64))
}

impl P1List {
    pub fn new(n: u64) -> Self {
        assert!(n >= 1);
        let mut elements = Vec::new();
        let mut sparse = BTreeMap::new();
        let mut dense = Vec::new();
        if n == 1 {
            elements.push((0, 0));
            return Self { n, elements, dense: vec![0], sparse };
        }
        // canonical forms have c | N
        for c in 0..n {
            if c != 0 && n % c != 0 {
                continue;
            }
            for d in 0..n {
                if let Some(rep) = normalize(n, c as i64, d as i64) {
                    if rep == (c, d) {
                        sparse.insert(rep, elements.len() as u32);
                        elements.push(rep);
                    }
                }
            }
        }
        if n <= DENSE_LIMIT {
            dense = vec![NONE; (n * n) as usize];
            for c in 0..n {
                for d in 0..n {
                    if let Some(rep) = normalize(n, c as i64, d as i64) {
                        dense[(c * n + d) as usize] = sparse[&rep];
                    }
                }
            }
        }
        Self { n, elements, dense, sparse }
    }

    pub fn level(&self) -> u64 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element(&self, i: usize) -> (u64, u64) {
        self.elements[i]
    }

    /// Index of `(c : d)`, or `None` if it is not a point of P^1(Z/N).
    pub fn index(&self, c: i64, d: i64) -> Option<usize> {
        if self.n == 1 {
            return Some(0);
        }
        let ni = self.n as i64;
        if !self.dense.is_empty() {
            let k = c.rem_euclid(ni) as u64 * self.n + d.rem_euclid(ni) as u64;
            let v = self.dense[k as usize];
            return (v != NONE).then_some(v as usize);
        }
        normalize(self.n, c, d).map(|rep| self.sparse[&rep] as usize)
    }

    /// Index for residues already reduced modulo N (hot path).
    #[inline]
    pub fn index_reduced(&self, c: u64, d: u64) -> Option<usize> {
        if !self.dense.is_empty() {
            let v = self.dense[(c * self.n + d) as usize];
            return (v != NONE).then_some(v as usize);
        }
        self.index(c as i64, d as i64)
    }

    pub fn sigma(&self, i: usize) -> usize {
        let (c, d) = self.elements[i];
        self.index(d as i64, -(c as i64)).unwrap()
    }

    pub fn tau(&self, i: usize) -> usize {
        let (c, d) = self.elements[i];
        self.index(d as i64, -(c as i64) - d as i64).unwrap()
    }

    /// The involution induced by `diag(-1, 1)`.
    pub fn star(&self, i: usize) -> usize {
        let (c, d) = self.elements[i];
        self.index(-(c as i64), d as i64).unwrap()
    }

    /// Lifts `(c : d)` to a matrix `[[a, b], [c', d']]` in SL2(Z).
    pub fn lift_to_sl2z(&self, i: usize) -> [i64; 4] {
        let (c, d) = self.elements[i];
        let n = self.n as i64;
        let mut c1 = c as i64;
        if c1 == 0 {
            c1 = n;
        }
        let mut d1 = d as i64;
        while c1.gcd(&d1) != 1 {
            d1 += n;
        }
        let (_, s, t) = xgcd(d1, c1);
        // s d1 + t c1 = 1, so a = s, b = -t gives a d1 - b c1 = 1
        [s, -t, c1, d1]
    }

    /// Number of points: N prod (1 + 1/ell).
    pub fn expected_len(n: u64) -> usize {
        let mut count = n;
        for (q, _) in crate::arith::factor(n) {
            count = count / q * (q + 1);
        }
        count as usize
    }

    pub fn unit_inverse(&self, u: i64) -> Option<i64> {
        inv_mod(u, self.n as i64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_the_index_formula() {
        for n in [1u64, 2, 11, 12, 32, 40, 56, 288] {
            let p1 = P1List::new(n);
            assert_eq!(p1.len(), P1List::expected_len(n), "N = {n}");
        }
        assert_eq!(P1List::new(32).len(), 48);
        assert_eq!(P1List::new(11).len(), 12);
    }

    #[test]
    fn scalar_multiples_share_an_index() {
        let n = 40u64;
        let p1 = P1List::new(n);
        for i in 0..p1.len() {
            let (c, d) = p1.element(i);
            for u in 1..n as i64 {
                if u.gcd(&(n as i64)) == 1 {
                    assert_eq!(p1.index(u * c as i64, u * d as i64), Some(i));
                }
            }
        }
    }

    #[test]
    fn involutions_and_lifts() {
        let p1 = P1List::new(56);
        for i in 0..p1.len() {
            assert_eq!(p1.sigma(p1.sigma(i)), i);
            assert_eq!(p1.tau(p1.tau(p1.tau(i))), i);
            assert_eq!(p1.star(p1.star(i)), i);
            let [a, b, c, d] = p1.lift_to_sl2z(i);
            assert_eq!(a * d - b * c, 1);
            assert_eq!(p1.index(c, d), Some(i));
        }
    }
}
