//! Dense reference model of A[q,n,z] over F_p: products from exact q-adic
//! digit addition of k·e, subspaces as row-reduced coordinate vectors.

#![allow(dead_code)]

use loewy::arith::{e_from_z, qadic_expand};
use loewy::{Nat, Word};

pub struct Dense {
    pub z: usize,
    pub p: u32,
    /// table[k][l] = Some(k + l) when b_k b_l ≠ 0.
    pub table: Vec<Vec<Option<usize>>>,
}

pub type Vector = Vec<u32>;

impl Dense {
    pub fn new(q: Word, n: Word, z: Word, p: u32) -> Self {
        let e = e_from_z(q, n, z).unwrap();
        let digits: Vec<Vec<Word>> = (0..=z)
            .map(|k| {
                let mut d = qadic_expand(&(&e * Nat::from(k)), q).unwrap().coeffs;
                d.resize(n as usize, 0);
                d
            })
            .collect();
        let z = z as usize;
        let table = (0..=z)
            .map(|k| {
                (0..=z)
                    .map(|l| {
                        let ok = k + l <= z && digits[k].iter().zip(&digits[l]).all(|(a, b)| a + b < q);
                        ok.then_some(k + l)
                    })
                    .collect()
            })
            .collect();
        Dense { z, p, table }
    }

    pub fn dim(&self) -> usize {
        self.z + 1
    }

    pub fn unit(&self, k: usize) -> Vector {
        let mut v = vec![0; self.dim()];
        v[k] = 1;
        v
    }

    pub fn mul(&self, x: &Vector, y: &Vector) -> Vector {
        let mut out = vec![0u64; self.dim()];
        for (k, &a) in x.iter().enumerate().filter(|(_, a)| **a != 0) {
            for (l, &b) in y.iter().enumerate().filter(|(_, b)| **b != 0) {
                if let Some(r) = self.table[k][l] {
                    out[r] = (out[r] + a as u64 * b as u64) % self.p as u64;
                }
            }
        }
        out.into_iter().map(|c| c as u32).collect()
    }

    pub fn power(&self, x: &Vector, e: u32) -> Vector {
        let mut acc = self.unit(0);
        for _ in 0..e {
            acc = self.mul(&acc, x);
        }
        acc
    }

    pub fn radical(&self) -> Vec<Vector> {
        (1..=self.z).map(|k| self.unit(k)).collect()
    }

    /// Basis of span { x y : x ∈ U, y ∈ V }.
    pub fn product_space(&self, u: &[Vector], v: &[Vector]) -> Vec<Vector> {
        let mut rows = Vec::new();
        for x in u {
            for y in v {
                rows.push(self.mul(x, y));
            }
        }
        basis(rows, self.p)
    }

    pub fn radical_powers(&self) -> Vec<Vec<Vector>> {
        let j = self.radical();
        let mut out = vec![basis(j.clone(), self.p)];
        loop {
            let next = self.product_space(out.last().unwrap(), &j);
            if next.is_empty() {
                return out;
            }
            out.push(next);
        }
    }

    /// Basis of { x ∈ A : x w = 0 for all w ∈ W }.
    pub fn annihilator(&self, w: &[Vector]) -> Vec<Vector> {
        let images: Vec<Vector> = (0..self.dim())
            .map(|k| {
                let e = self.unit(k);
                w.iter().flat_map(|y| self.mul(&e, y)).collect()
            })
            .collect();
        let all: Vec<Vector> = (0..self.dim()).map(|k| self.unit(k)).collect();
        kernel(&all, &images, self.p)
    }

    /// Basis of { x ∈ J : x^(p^k) = 0 }.
    pub fn frobenius_kernel(&self, k: u32) -> Vec<Vector> {
        let j = self.radical();
        let images: Vec<Vector> = j
            .iter()
            .map(|x| {
                let mut y = x.clone();
                for _ in 0..k {
                    y = self.power(&y, self.p);
                }
                y
            })
            .collect();
        kernel(&j, &images, self.p)
    }

    /// Basis of { x^p : x ∈ J } over F_p, where Frobenius is additive.
    pub fn frobenius_image(&self) -> Vec<Vector> {
        basis(self.radical().iter().map(|x| self.power(x, self.p)).collect(), self.p)
    }

    pub fn ideal(&self, v: &[Vector]) -> Vec<Vector> {
        let all: Vec<Vector> = (0..self.dim()).map(|k| self.unit(k)).collect();
        self.product_space(v, &all)
    }
}

fn inv(a: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let (mut b, mut e) = (a as u64, p as u64 - 2);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    r as u32
}

/// Row echelon basis of the span of `rows`.
pub fn basis(mut rows: Vec<Vector>, p: u32) -> Vec<Vector> {
    let Some(width) = rows.first().map(|r| r.len()) else { return rows };
    let mut rank = 0;
    for col in 0..width {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else { continue };
        rows.swap(rank, piv);
        let s = inv(rows[rank][col], p);
        for c in rows[rank].iter_mut() {
            *c = (*c as u64 * s as u64 % p as u64) as u32;
        }
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[col] != 0 {
                let f = row[col] as u64;
                for (c, pv) in row.iter_mut().zip(&pivot) {
                    *c = ((*c as u64 + (p as u64 - f) * *pv as u64) % p as u64) as u32;
                }
            }
        }
        rank += 1;
    }
    rows.truncate(rank);
    rows
}

pub fn rank(rows: Vec<Vector>, p: u32) -> usize {
    basis(rows, p).len()
}

/// Basis of { Σ c_i src_i : Σ c_i img_i = 0 }.
pub fn kernel(src: &[Vector], img: &[Vector], p: u32) -> Vec<Vector> {
    let n = src.len();
    let width = img.first().map_or(0, |r| r.len());
    let live: Vec<usize> = (0..width).filter(|&c| img.iter().any(|r| r[c] != 0)).collect();
    let w = live.len();
    let rows: Vec<Vector> = img
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row: Vector = live.iter().map(|&c| r[c]).collect();
            row.extend((0..n).map(|j| (i == j) as u32));
            row
        })
        .collect();
    let reduced = basis(rows, p);
    let coeffs: Vec<&[u32]> =
        reduced.iter().filter(|r| r[..w].iter().all(|&c| c == 0)).map(|r| &r[w..]).collect();
    let vectors = coeffs
        .iter()
        .map(|c| {
            let mut v = vec![0u64; src[0].len()];
            for (ci, s) in c.iter().zip(src) {
                for (x, y) in v.iter_mut().zip(s) {
                    *x = (*x + *ci as u64 * *y as u64) % p as u64;
                }
            }
            v.into_iter().map(|x| x as u32).collect()
        })
        .collect();
    basis(vectors, p)
}

pub fn sum(u: &[Vector], v: &[Vector], p: u32) -> usize {
    rank(u.iter().chain(v).cloned().collect(), p)
}

/// Dense counterpart of the labelled ideal dimensions over F_p.
pub fn oracle_dims(d: &Dense, ll: Word, p: Word) -> Vec<(String, Word)> {
    let powers = d.radical_powers();
    assert_eq!(powers.len() as Word, ll - 1);
    let socle: Vec<_> = powers.iter().map(|j| d.annihilator(j)).collect();
    let mut out = Vec::new();
    for (i, j) in powers.iter().enumerate() {
        out.push((format!("J^{}", i + 1), j.len() as Word));
    }
    for (i, s) in socle.iter().enumerate() {
        out.push((format!("S_{}", i + 1), s.len() as Word));
    }
    for (i, j) in powers.iter().enumerate() {
        for (k, s) in socle.iter().enumerate() {
            out.push((format!("J^{}+S_{}", i + 1, k + 1), sum(j, s, d.p) as Word));
            out.push((format!("J^{}*S_{}", i + 1, k + 1), d.product_space(j, s).len() as Word));
        }
    }
    out.push((format!("U_{p}"), d.frobenius_image().len() as Word));
    let mut prev = None;
    for k in 1.. {
        let v = d.frobenius_kernel(k);
        let dim = v.len() as Word;
        out.push((format!("V_{p},{k}"), dim));
        out.push((format!("V_{p},{k}*A"), d.ideal(&v).len() as Word));
        if dim == d.z as Word || prev == Some(dim) {
            break;
        }
        prev = Some(dim);
    }
    out
}
