//! Manin-symbol presentation of rational modular symbols for Gamma_0(N).

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::linalg::{axpy, coeff, scale, unit, SparseVec};
use super::p1::P1List;
use crate::error::{Error, Result};

/// Largest level accepted by `build_space`.
pub const LEVEL_BOUND: u64 = 10_000;

#[derive(Clone, Debug)]
pub struct ManinSymbolSpace {
    p1: P1List,
    /// Two- and three-term relations over generator indices.
    relations: Vec<Vec<(usize, i64)>>,
    /// Generators whose classes form the basis of the quotient.
    basis: Vec<usize>,
    coords: Vec<SparseVec>,
}

/// A point of P^1(Q): `(num, den)` with `den >= 0`; `den = 0` is the cusp infinity.
pub type Cusp = (i128, i128);

pub const INFINITY: Cusp = (1, 0);

/// Calls `f(c, d)` with the Manin symbols `(c : d)` (as integers) whose sum is
/// the path `{infinity, a/m}`, using the continued fraction of `a/m`.
#[inline]
pub fn for_each_manin_symbol(a: i128, m: i128, mut f: impl FnMut(i128, i128)) {
    debug_assert!(m > 0);
    let g = gcd128(a, m);
    let (mut x, mut y) = (a / g, m / g);
    let (mut q_prev2, mut q_prev) = (1i128, 0i128);
    let mut sign = -1i128;
    loop {
        let t = x.div_euclid(y);
        let r = x - t * y;
        let q = t * q_prev + q_prev2;
        f(sign * q, q_prev);
        if r == 0 {
            break;
        }
        (x, y) = (y, r);
        (q_prev2, q_prev) = (q_prev, q);
        sign = -sign;
    }
}

fn gcd128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl ManinSymbolSpace {
    pub fn build(level: u64) -> Result<Self> {
        if level == 0 {
            return Err(Error::InvalidArgument("level must be positive".into()));
        }
        if level > LEVEL_BOUND {
            return Err(Error::Resource(alloc::format!(
                "level {level} exceeds the bound {LEVEL_BOUND}"
            )));
        }
        let p1 = P1List::new(level);
        let n = p1.len();
        let mut relations: Vec<Vec<(usize, i64)>> = Vec::new();
        for i in 0..n {
            let s = p1.sigma(i);
            if i < s {
                relations.push(vec![(i, 1), (s, 1)]);
            } else if i == s {
                relations.push(vec![(i, 2)]);
            }
        }
        for i in 0..n {
            let t1 = p1.tau(i);
            let t2 = p1.tau(t1);
            if i == t1 {
                relations.push(vec![(i, 3)]);
            } else if i < t1 && i < t2 {
                let mut row = vec![(i, 1), (t1, 1), (t2, 1)];
                row.sort();
                relations.push(row);
            }
        }

        // Gauss-Jordan elimination keeping pivot rows fully reduced
        let mut pivots: BTreeMap<usize, SparseVec> = BTreeMap::new();
        for rel in &relations {
            let mut row: SparseVec =
                rel.iter().map(|&(i, c)| (i, BigRational::from_integer(c.into()))).collect();
            while let Some((var, c)) = row.iter().find(|(v, _)| pivots.contains_key(v)).cloned() {
                row = axpy(&row, &-c, &pivots[&var]);
            }
            let Some((pv, pc)) = row.last().cloned() else {
                continue;
            };
            let row = scale(&row, &(BigRational::one() / pc));
            for other in pivots.values_mut() {
                let c = coeff(other, pv);
                if !c.is_zero() {
                    *other = axpy(other, &-c, &row);
                }
            }
            pivots.insert(pv, row);
        }
        let basis: Vec<usize> = (0..n).filter(|i| !pivots.contains_key(i)).collect();
        let mut position = vec![usize::MAX; n];
        for (k, &g) in basis.iter().enumerate() {
            position[g] = k;
        }
        let coords = (0..n)
            .map(|i| match pivots.get(&i) {
                None => unit(position[i]),
                Some(row) => {
                    let mut v: SparseVec = row
                        .iter()
                        .filter(|(var, _)| *var != i)
                        .map(|(var, c)| (position[*var], -c))
                        .collect();
                    v.sort_by_key(|e| e.0);
                    v
                }
            })
            .collect();
        Ok(Self { p1, relations, basis, coords })
    }

    pub fn level(&self) -> u64 {
        self.p1.level()
    }

    pub fn p1(&self) -> &P1List {
        &self.p1
    }

    pub fn num_generators(&self) -> usize {
        self.p1.len()
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn relations(&self) -> &[Vec<(usize, i64)>] {
        &self.relations
    }

    pub fn basis_generators(&self) -> &[usize] {
        &self.basis
    }

    /// Coordinates of generator `i` in the quotient basis.
    pub fn coordinates(&self, i: usize) -> &SparseVec {
        &self.coords[i]
    }

    fn symbol_coords(&self, c: i128, d: i128) -> &SparseVec {
        let n = self.level() as i128;
        let i = self
            .p1
            .index_reduced(c.rem_euclid(n) as u64, d.rem_euclid(n) as u64)
            .expect("continued-fraction symbols are points of P^1");
        &self.coords[i]
    }

    /// Class of the path `{infinity, a/m}`.
    pub fn infinity_path(&self, cusp: Cusp) -> SparseVec {
        let (a, m) = cusp;
        if m == 0 {
            return Vec::new();
        }
        let mut acc: SparseVec = Vec::new();
        for_each_manin_symbol(a, m, |c, d| {
            acc = axpy(&acc, &BigRational::one(), self.symbol_coords(c, d));
        });
        acc
    }

    /// Class of the path `{alpha, beta}`.
    pub fn path(&self, alpha: Cusp, beta: Cusp) -> SparseVec {
        axpy(&self.infinity_path(beta), &-BigRational::one(), &self.infinity_path(alpha))
    }

    /// The endpoints `{g(0), g(infinity)}` of generator `i`.
    pub fn generator_path(&self, i: usize) -> (Cusp, Cusp) {
        let [a, b, c, d] = self.p1.lift_to_sl2z(i);
        (normalize_cusp(b as i128, d as i128), normalize_cusp(a as i128, c as i128))
    }

    /// `T_ell` applied to generator `i`, for `ell` not dividing the level.
    pub fn hecke_on_generator(&self, ell: u64, i: usize) -> SparseVec {
        let (alpha, beta) = self.generator_path(i);
        let l = ell as i128;
        let shift = |x: Cusp, w: i128| -> Cusp {
            if x.1 == 0 {
                INFINITY
            } else {
                normalize_cusp(x.0 + w * x.1, x.1 * l)
            }
        };
        let mut acc = self.path(
            if alpha.1 == 0 { INFINITY } else { normalize_cusp(alpha.0 * l, alpha.1) },
            if beta.1 == 0 { INFINITY } else { normalize_cusp(beta.0 * l, beta.1) },
        );
        for w in 0..l {
            let v = self.path(shift(alpha, w), shift(beta, w));
            acc = axpy(&acc, &BigRational::one(), &v);
        }
        acc
    }

    /// Columns of `T_ell` on the basis.
    pub fn hecke_matrix(&self, ell: u64) -> Vec<SparseVec> {
        self.basis.iter().map(|&g| self.hecke_on_generator(ell, g)).collect()
    }

    /// Columns of the star involution on the basis.
    pub fn star_matrix(&self) -> Vec<SparseVec> {
        self.basis.iter().map(|&g| self.coords[self.p1.star(g)].clone()).collect()
    }

    /// Product of two operators given by basis columns.
    pub fn compose(a: &[SparseVec], b: &[SparseVec]) -> Vec<SparseVec> {
        b.iter()
            .map(|col| {
                col.iter().fold(Vec::new(), |acc, (k, c)| axpy(&acc, c, &a[*k]))
            })
            .collect()
    }

    /// Every two- and three-term relation vanishes in the quotient.
    pub fn relations_hold(&self) -> bool {
        self.relations.iter().all(|rel| {
            rel.iter()
                .fold(Vec::new(), |acc, &(i, c)| {
                    axpy(&acc, &BigRational::from_integer(c.into()), &self.coords[i])
                })
                .is_empty()
        })
    }
}

pub fn normalize_cusp(num: i128, den: i128) -> Cusp {
    if den == 0 {
        return INFINITY;
    }
    let g = gcd128(num, den);
    let (num, den) = (num / g, den / g);
    if den < 0 {
        (-num, -den)
    } else {
        (num, den)
    }
}
