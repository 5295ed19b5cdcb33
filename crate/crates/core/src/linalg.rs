//! Row reduction over F_p (u32 vectors) and over F_q (FqElem vectors).

use crate::finite_field::{Fq, FqElem};
use crate::padic::inv_mod;

/// Echelon basis of an F_p row space, kept reduced as rows are added.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpSpan {
    p: u32,
    dim: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl FpSpan {
    pub fn new(p: u32, dim: usize) -> Self {
        FpSpan { p, dim, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    fn reduce(&self, v: &[u32]) -> Vec<u32> {
        let p = self.p as u64;
        let mut v: Vec<u32> = v.iter().map(|&x| x % self.p).collect();
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            let k = v[c] as u64;
            if k != 0 {
                for (x, &r) in v.iter_mut().zip(row) {
                    *x = ((*x as u64 + (p - k) * r as u64) % p) as u32;
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        assert_eq!(v.len(), self.dim);
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Adds v; returns whether the rank grew.
    pub fn insert(&mut self, v: &[u32]) -> bool {
        assert_eq!(v.len(), self.dim);
        let p = self.p as u64;
        let mut v = self.reduce(v);
        let Some(c) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = inv_mod(v[c] as u64, p).unwrap();
        for x in &mut v {
            *x = ((*x as u64 * inv) % p) as u32;
        }
        for row in &mut self.rows {
            let k = row[c] as u64;
            if k != 0 {
                for (x, &r) in row.iter_mut().zip(&v) {
                    *x = ((*x as u64 + (p - k) * r as u64) % p) as u32;
                }
            }
        }
        let at = self.pivots.partition_point(|&q| q < c);
        self.rows.insert(at, v);
        self.pivots.insert(at, c);
        true
    }
}

/// Basis of {x : A x = 0} for a matrix over F_q with `ncols` columns.
pub fn nullspace(field: &Fq, a: &[Vec<FqElem>], ncols: usize) -> Vec<Vec<FqElem>> {
    let zero = FqElem::zero(field);
    let mut m: Vec<Vec<FqElem>> = a.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(k) = (r..m.len()).find(|&k| !m[k][c].is_zero()) else {
            continue;
        };
        m.swap(r, k);
        let inv = m[r][c].inv().unwrap();
        m[r] = m[r].iter().map(|x| x * &inv).collect();
        for k in 0..m.len() {
            if k != r && !m[k][c].is_zero() {
                let t = m[k][c].clone();
                let row = m[r].clone();
                for (x, y) in m[k].iter_mut().zip(&row) {
                    *x = &*x - &(&t * y);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    let mut out = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![zero.clone(); ncols];
        v[free] = FqElem::one(field);
        for (row, &c) in pivots.iter().enumerate() {
            v[c] = -&m[row][free];
        }
        out.push(v);
    }
    out
}
