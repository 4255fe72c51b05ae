//! Dense binary matrices and small GF(2)[x] polynomial helpers.

use std::fmt;

/// A dense matrix over GF(2), rows stored as packed `u64` words.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let s: String = (0..self.cols).map(|c| if self.get(r, c) { '1' } else { '0' }).collect();
            writeln!(f, "  {s}")?;
        }
        Ok(())
    }
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = cols.div_ceil(64);
        BitMatrix { rows, cols, stride, data: vec![0; rows * stride] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from rows of 0/1 bytes.
    pub fn from_rows(rows: &[Vec<u8>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = Self::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged rows");
            for (c, &v) in row.iter().enumerate() {
                if v != 0 {
                    m.set(r, c, true);
                }
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        self.data[r * self.stride + c / 64] >> (c % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        debug_assert!(r < self.rows && c < self.cols);
        let w = &mut self.data[r * self.stride + c / 64];
        if v {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    #[inline]
    pub fn toggle(&mut self, r: usize, c: usize) {
        self.data[r * self.stride + c / 64] ^= 1 << (c % 64);
    }

    #[inline]
    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    #[inline]
    pub fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.stride..(r + 1) * self.stride]
    }

    /// XORs row `src` of `other` into row `dst` of `self`. Widths must agree.
    pub fn xor_row_from(&mut self, dst: usize, other: &BitMatrix, src: usize) {
        debug_assert_eq!(self.cols, other.cols);
        let s = self.stride;
        let src_words = &other.data[src * s..(src + 1) * s];
        for (d, w) in self.data[dst * s..(dst + 1) * s].iter_mut().zip(src_words) {
            *d ^= *w;
        }
    }

    pub fn row_weight(&self, r: usize) -> usize {
        self.row_words(r).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn weight(&self) -> usize {
        self.data.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Column indices of the ones in row `r`, ascending.
    pub fn row_ones(&self, r: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.row_weight(r));
        for (wi, &w) in self.row_words(r).iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let b = w.trailing_zeros() as usize;
                out.push(wi * 64 + b);
                w &= w - 1;
            }
        }
        out
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in self.row_ones(r) {
                t.set(c, r, true);
            }
        }
        t
    }

    /// Product over GF(2).
    pub fn mul(&self, rhs: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = BitMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in self.row_ones(r) {
                out.xor_row_from(r, rhs, k);
            }
        }
        out
    }

    /// Kronecker product: row (r1, r2) ↦ r1·rhs.rows + r2, column likewise.
    pub fn kron(&self, rhs: &BitMatrix) -> BitMatrix {
        let mut out = BitMatrix::zeros(self.rows * rhs.rows, self.cols * rhs.cols);
        for r1 in 0..self.rows {
            for c1 in self.row_ones(r1) {
                for r2 in 0..rhs.rows {
                    for c2 in rhs.row_ones(r2) {
                        out.set(r1 * rhs.rows + r2, c1 * rhs.cols + c2, true);
                    }
                }
            }
        }
        out
    }

    /// Keeps the listed rows in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> BitMatrix {
        let mut out = BitMatrix::zeros(rows.len(), self.cols);
        for (i, &r) in rows.iter().enumerate() {
            out.row_words_mut(i).copy_from_slice(self.row_words(r));
        }
        out
    }

    /// Keeps the listed columns in the given order.
    pub fn select_cols(&self, cols: &[usize]) -> BitMatrix {
        let mut out = BitMatrix::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (i, &c) in cols.iter().enumerate() {
                if self.get(r, c) {
                    out.set(r, i, true);
                }
            }
        }
        out
    }

    /// Stacks `self` above `below`.
    pub fn vstack(&self, below: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, below.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&below.data);
        BitMatrix { rows: self.rows + below.rows, cols: self.cols, stride: self.stride, data }
    }

    /// Row as a lowercase hex string, least significant nibble = columns 0..4,
    /// written most significant first.
    pub fn row_to_hex(&self, r: usize) -> String {
        let nibbles = self.cols.div_ceil(4).max(1);
        let mut s = String::with_capacity(nibbles);
        for i in (0..nibbles).rev() {
            let mut v = 0u8;
            for b in 0..4 {
                let c = i * 4 + b;
                if c < self.cols && self.get(r, c) {
                    v |= 1 << b;
                }
            }
            s.push(char::from_digit(v as u32, 16).unwrap());
        }
        s
    }

    /// Parses a row written by [`BitMatrix::row_to_hex`] into row `r`.
    pub fn set_row_from_hex(&mut self, r: usize, hex: &str) -> Result<(), String> {
        let hex = hex.trim_start_matches("0x");
        let n = hex.len();
        for (i, ch) in hex.chars().enumerate() {
            let v = ch.to_digit(16).ok_or_else(|| format!("bad hex digit {ch:?}"))?;
            let nib = n - 1 - i;
            for b in 0..4 {
                if v >> b & 1 == 1 {
                    let c = nib * 4 + b;
                    if c >= self.cols {
                        return Err(format!("bit {c} beyond width {}", self.cols));
                    }
                    self.set(r, c, true);
                }
            }
        }
        Ok(())
    }
}

/// Degree of a GF(2)[x] polynomial held as a bitmask; `None` for zero.
pub fn poly_degree(p: u64) -> Option<u32> {
    if p == 0 {
        None
    } else {
        Some(63 - p.leading_zeros())
    }
}

pub fn poly_mul(a: u64, b: u64) -> u64 {
    let mut acc = 0u64;
    let mut b = b;
    let mut i = 0;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a << i;
        }
        b >>= 1;
        i += 1;
    }
    acc
}

/// Quotient and remainder of `a / b` over GF(2).
pub fn poly_divmod(mut a: u64, b: u64) -> (u64, u64) {
    let db = poly_degree(b).expect("division by zero polynomial");
    let mut q = 0u64;
    while let Some(da) = poly_degree(a) {
        if da < db {
            break;
        }
        q ^= 1 << (da - db);
        a ^= b << (da - db);
    }
    (q, a)
}

pub fn poly_mod(a: u64, b: u64) -> u64 {
    poly_divmod(a, b).1
}

/// Inverse of `a` modulo `m`, assuming gcd(a, m) = 1.
pub fn poly_inv_mod(a: u64, m: u64) -> Option<u64> {
    // extended Euclid on (m, a)
    let (mut r0, mut r1) = (m, poly_mod(a, m));
    let (mut t0, mut t1) = (0u64, 1u64);
    while r1 != 0 {
        let (q, r) = poly_divmod(r0, r1);
        r0 = r1;
        r1 = r;
        let t = t0 ^ poly_mul(q, t1);
        t0 = t1;
        t1 = t;
    }
    if r0 != 1 {
        return None;
    }
    Some(poly_mod(t0, m))
}

/// Factors a nonzero polynomial into irreducible factors with multiplicity,
/// in ascending order of the factor bitmask.
pub fn poly_factor(mut p: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d: u64 = 2;
    while poly_degree(p).unwrap_or(0) > 0 {
        let dd = poly_degree(d).unwrap();
        if 2 * dd > poly_degree(p).unwrap() {
            out.push((p, 1));
            break;
        }
        let mut e = 0;
        loop {
            let (q, r) = poly_divmod(p, d);
            if r != 0 {
                break;
            }
            p = q;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += 1;
    }
    out
}
