//! Bilinear algorithms for short cyclic convolutions with binary coefficients.
//!
//! Every algorithm has the shape `y = post · ((pre_a · u) ⊙ (pre_b · v))` where all
//! three matrices are over GF(2), so it is valid in every GF(2^m).
//!
//! Base algorithms come from the polynomial CRT on the GF(2) factorization of
//! x^s + 1, each residue product done by a Karatsuba-style linear convolution.
//! Coprime composite lengths are nested (Agarwal–Cooley), and a direct s²
//! algorithm is always available as a fallback.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::gf::{FieldContext, FieldElement};
use crate::gf2::{poly_degree, poly_divmod, poly_factor, poly_inv_mod, poly_mod, poly_mul, BitMatrix};

/// Longest cyclic convolution handled. Coset sizes never exceed m ≤ 16.
pub const MAX_CONV_LENGTH: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Construction {
    Trivial,
    /// Hand-written two-point algorithm.
    TwoPoint,
    Crt,
    Nested(usize, usize),
    Direct,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShortConvAlg {
    pub length: usize,
    pub pre_a: BitMatrix,
    pub pre_b: BitMatrix,
    pub post: BitMatrix,
    pub construction: Construction,
}

impl ShortConvAlg {
    pub fn mult_count(&self) -> usize {
        self.pre_a.rows()
    }

    /// Checks the bilinear identity on every pair of basis vectors. Because all
    /// coefficients lie in GF(2) this is equivalent to the identity over any
    /// extension field.
    pub fn verify(&self) -> bool {
        let s = self.length;
        let m = self.mult_count();
        if self.pre_a.cols() != s || self.pre_b.cols() != s || self.pre_b.rows() != m {
            return false;
        }
        if self.post.rows() != s || self.post.cols() != m {
            return false;
        }
        for i in 0..s {
            for j in 0..s {
                let active: Vec<usize> =
                    (0..m).filter(|&r| self.pre_a.get(r, i) && self.pre_b.get(r, j)).collect();
                for k in 0..s {
                    let parity = active.iter().filter(|&&r| self.post.get(k, r)).count() % 2 == 1;
                    if parity != ((i + j) % s == k) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Evaluates the algorithm on field vectors.
    pub fn apply(&self, ctx: &FieldContext, u: &[FieldElement], v: &[FieldElement]) -> Vec<FieldElement> {
        let products: Vec<FieldElement> = (0..self.mult_count())
            .map(|r| {
                let a = self.pre_a.row_ones(r).into_iter().fold(FieldElement::ZERO, |s, c| s + u[c]);
                let b = self.pre_b.row_ones(r).into_iter().fold(FieldElement::ZERO, |s, c| s + v[c]);
                ctx.mul(a, b)
            })
            .collect();
        (0..self.length)
            .map(|k| self.post.row_ones(k).into_iter().fold(FieldElement::ZERO, |s, r| s + products[r]))
            .collect()
    }

    /// Algorithms equivalent under the symmetries of the cyclic convolution
    /// tensor [i + j ≡ k]: exchanging the two operands, and moving the output
    /// role onto the second operand with index negation. The receiver comes first.
    pub fn variants(&self) -> Vec<ShortConvAlg> {
        let mut out = vec![self.clone()];
        let mut i = 0;
        while i < out.len() {
            for next in [out[i].swap_operands(), out[i].rotate_roles()] {
                if !out.iter().any(|a| a.pre_a == next.pre_a && a.pre_b == next.pre_b && a.post == next.post) {
                    out.push(next);
                }
            }
            i += 1;
        }
        out
    }

    fn swap_operands(&self) -> ShortConvAlg {
        ShortConvAlg { pre_a: self.pre_b.clone(), pre_b: self.pre_a.clone(), ..self.clone() }
    }

    // T(i, j, k) = T(i, −k, −j)
    fn rotate_roles(&self) -> ShortConvAlg {
        let s = self.length;
        let m = self.mult_count();
        let mut pre_b = BitMatrix::zeros(m, s);
        let mut post = BitMatrix::zeros(s, m);
        for r in 0..m {
            for j in 0..s {
                if self.post.get((s - j) % s, r) {
                    pre_b.set(r, j, true);
                }
            }
            for k in 0..s {
                if self.pre_b.get(r, (s - k) % s) {
                    post.set(k, r, true);
                }
            }
        }
        ShortConvAlg { pre_a: self.pre_a.clone(), pre_b, post, ..self.clone() }
    }
}

/// The best available algorithm for a cyclic convolution of `length` points.
pub fn short_conv(length: usize) -> Result<ShortConvAlg> {
    if length == 0 || length > MAX_CONV_LENGTH {
        return Err(Error::UnsupportedLength(length));
    }
    static CACHE: OnceLock<Vec<ShortConvAlg>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| {
        let mut algs: Vec<ShortConvAlg> = Vec::with_capacity(MAX_CONV_LENGTH);
        for s in 1..=MAX_CONV_LENGTH {
            let alg = select_cyclic(s, &algs);
            assert!(alg.verify(), "cyclic convolution algorithm of length {s} failed verification");
            algs.push(alg);
        }
        algs
    });
    Ok(cache[length - 1].clone())
}

/// The s² schoolbook algorithm, valid for any length.
pub fn direct_conv(length: usize) -> ShortConvAlg {
    let s = length;
    let mut pre_a = BitMatrix::zeros(s * s, s);
    let mut pre_b = BitMatrix::zeros(s * s, s);
    let mut post = BitMatrix::zeros(s, s * s);
    for i in 0..s {
        for j in 0..s {
            let r = i * s + j;
            pre_a.set(r, i, true);
            pre_b.set(r, j, true);
            post.set((i + j) % s, r, true);
        }
    }
    ShortConvAlg { length, pre_a, pre_b, post, construction: Construction::Direct }
}

fn select_cyclic(s: usize, smaller: &[ShortConvAlg]) -> ShortConvAlg {
    match s {
        1 => {
            let one = BitMatrix::identity(1);
            return ShortConvAlg {
                length: 1,
                pre_a: one.clone(),
                pre_b: one.clone(),
                post: one,
                construction: Construction::Trivial,
            };
        }
        2 => return two_point(),
        _ => {}
    }
    let mut candidates = Vec::new();
    for s1 in 2..s {
        let s2 = s / s1;
        if s1 < s2 && s1 * s2 == s && crate::gf::gcd(s1, s2) == 1 {
            candidates.push(nest_coprime(&smaller[s1 - 1], &smaller[s2 - 1]));
        }
    }
    candidates.push(crt_cyclic(s));
    candidates.push(direct_conv(s));
    // min_by_key keeps the first minimum: nesting, then CRT, then direct
    candidates.into_iter().min_by_key(|a| a.mult_count()).unwrap()
}

/// y0 = (u0+u1)v0 + u1(v0+v1), y1 = (u0+u1)v0 + u0(v0+v1).
fn two_point() -> ShortConvAlg {
    ShortConvAlg {
        length: 2,
        pre_a: BitMatrix::from_rows(&[vec![1, 1], vec![1, 0], vec![0, 1]]),
        pre_b: BitMatrix::from_rows(&[vec![1, 0], vec![1, 1], vec![1, 1]]),
        post: BitMatrix::from_rows(&[vec![1, 0, 1], vec![1, 1, 0]]),
        construction: Construction::TwoPoint,
    }
}

/// Agarwal–Cooley nesting: CRT index map turns the length s1·s2 convolution
/// into a two-dimensional one computed by the Kronecker product.
fn nest_coprime(a1: &ShortConvAlg, a2: &ShortConvAlg) -> ShortConvAlg {
    let (s1, s2) = (a1.length, a2.length);
    let s = s1 * s2;
    let map: Vec<usize> = (0..s).map(|i| (i % s1) * s2 + i % s2).collect();
    ShortConvAlg {
        length: s,
        pre_a: a1.pre_a.kron(&a2.pre_a).select_cols(&map),
        pre_b: a1.pre_b.kron(&a2.pre_b).select_cols(&map),
        post: a1.post.kron(&a2.post).select_rows(&map),
        construction: Construction::Nested(s1, s2),
    }
}

/// Linear convolution of two length-n sequences: `c` has 2n − 1 rows.
#[derive(Clone, Debug)]
struct LinearAlg {
    n: usize,
    a: BitMatrix,
    b: BitMatrix,
    c: BitMatrix,
}

impl LinearAlg {
    fn count(&self) -> usize {
        self.a.rows()
    }

    // Products a_i b_i and (a_i + a_j)(b_i + b_j): n(n+1)/2 multiplications.
    fn symmetric(n: usize) -> LinearAlg {
        let mut pairs: Vec<(usize, usize)> = (0..n).map(|i| (i, i)).collect();
        for i in 0..n {
            for j in i + 1..n {
                pairs.push((i, j));
            }
        }
        let m = pairs.len();
        let mut a = BitMatrix::zeros(m, n);
        let mut c = BitMatrix::zeros(2 * n - 1, m);
        for (r, &(i, j)) in pairs.iter().enumerate() {
            a.set(r, i, true);
            a.set(r, j, true);
            if i == j {
                c.toggle(2 * i, r);
            } else {
                c.toggle(i + j, r);
                c.toggle(i + j, i);
                c.toggle(i + j, j);
            }
        }
        LinearAlg { n, b: a.clone(), a, c }
    }

    // Splits the inputs into blocks handled by `inner`, combined by `outer`.
    fn nested(outer: &LinearAlg, inner: &LinearAlg, n: usize) -> LinearAlg {
        let bsz = inner.n;
        assert!(outer.n * bsz >= n);
        let a = outer.a.kron(&inner.a).select_cols(&(0..n).collect::<Vec<_>>());
        let b = outer.b.kron(&inner.b).select_cols(&(0..n).collect::<Vec<_>>());
        let full = outer.c.kron(&inner.c);
        let mut c = BitMatrix::zeros(2 * n - 1, full.cols());
        for p in 0..outer.c.rows() {
            for q in 0..inner.c.rows() {
                let target = p * bsz + q;
                if target < 2 * n - 1 {
                    c.xor_row_from(target, &full, p * inner.c.rows() + q);
                }
            }
        }
        let alg = LinearAlg { n, a, b, c };
        alg.drop_dead_products()
    }

    fn drop_dead_products(self) -> LinearAlg {
        let ct = self.c.transpose();
        let keep: Vec<usize> = (0..self.count())
            .filter(|&r| self.a.row_weight(r) > 0 && self.b.row_weight(r) > 0 && ct.row_weight(r) > 0)
            .collect();
        LinearAlg {
            n: self.n,
            a: self.a.select_rows(&keep),
            b: self.b.select_rows(&keep),
            c: self.c.select_cols(&keep),
        }
    }

    #[cfg(test)]
    fn verify(&self) -> bool {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                let active: Vec<usize> = (0..self.count()).filter(|&r| self.a.get(r, i) && self.b.get(r, j)).collect();
                for k in 0..2 * n - 1 {
                    let parity = active.iter().filter(|&&r| self.c.get(k, r)).count() % 2 == 1;
                    if parity != (i + j == k) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

fn best_linear(n: usize) -> LinearAlg {
    let mut memo: Vec<LinearAlg> = Vec::with_capacity(n);
    for len in 1..=n {
        let mut best = LinearAlg::symmetric(len);
        for k in [2usize, 3] {
            if k < len {
                let inner = &memo[len.div_ceil(k) - 1];
                let cand = LinearAlg::nested(&memo[k - 1], inner, len);
                if cand.count() < best.count() {
                    best = cand;
                }
            }
        }
        memo.push(best);
    }
    memo.pop().unwrap()
}

/// Column j holds the coefficients of x^j mod q, for j < cols.
fn reduction_matrix(q: u64, cols: usize) -> BitMatrix {
    let d = poly_degree(q).unwrap() as usize;
    let mut m = BitMatrix::zeros(d, cols);
    for j in 0..cols {
        let r = poly_mod(1u64 << j, q);
        for i in 0..d {
            if r >> i & 1 == 1 {
                m.set(i, j, true);
            }
        }
    }
    m
}

fn crt_cyclic(s: usize) -> ShortConvAlg {
    let modulus: u64 = (1 << s) | 1;
    let factors: Vec<u64> = poly_factor(modulus)
        .into_iter()
        .map(|(p, e)| (0..e).fold(1u64, |acc, _| poly_mul(acc, p)))
        .collect();
    let mut a_blocks = Vec::new();
    let mut b_blocks = Vec::new();
    let mut c_blocks_t = Vec::new();
    for &q in &factors {
        let d = poly_degree(q).unwrap() as usize;
        let lin = best_linear(d);
        let rin = reduction_matrix(q, s);
        let red = reduction_matrix(q, 2 * d - 1);
        let cq = red.mul(&lin.c);
        // idempotent e ≡ 1 mod q, ≡ 0 mod the other factors
        let cofactor = poly_divmod(modulus, q).0;
        let e = if factors.len() == 1 {
            1
        } else {
            poly_mod(poly_mul(cofactor, poly_inv_mod(cofactor, q).unwrap()), modulus)
        };
        let mut out = BitMatrix::zeros(s, d);
        for l in 0..d {
            let col = poly_mod(poly_mul(e, 1 << l), modulus);
            for i in 0..s {
                if col >> i & 1 == 1 {
                    out.set(i, l, true);
                }
            }
        }
        a_blocks.push(lin.a.mul(&rin));
        b_blocks.push(lin.b.mul(&rin));
        c_blocks_t.push(out.mul(&cq).transpose());
    }
    let stack = |blocks: Vec<BitMatrix>| blocks.into_iter().reduce(|acc, b| acc.vstack(&b)).unwrap();
    ShortConvAlg {
        length: s,
        pre_a: stack(a_blocks),
        pre_b: stack(b_blocks),
        post: stack(c_blocks_t).transpose(),
        construction: Construction::Crt,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn circular(ctx: &FieldContext, u: &[FieldElement], v: &[FieldElement]) -> Vec<FieldElement> {
        let s = u.len();
        let mut y = vec![FieldElement::ZERO; s];
        for i in 0..s {
            for j in 0..s {
                y[(i + j) % s] += ctx.mul(u[i], v[j]);
            }
        }
        y
    }

    #[test]
    fn length_one_is_trivial() {
        let a = short_conv(1).unwrap();
        assert_eq!(a.mult_count(), 1);
        assert_eq!(a.pre_a, BitMatrix::identity(1));
        assert_eq!(a.post, BitMatrix::identity(1));
    }

    #[test]
    fn mult_counts() {
        let counts: Vec<usize> = (1..=MAX_CONV_LENGTH).map(|s| short_conv(s).unwrap().mult_count()).collect();
        assert_eq!(counts[1], 3);
        assert_eq!(counts[2], 4);
        assert_eq!(counts[3], 9);
        // 6 = 2 × 3 nested
        assert_eq!(counts[5], 3 * 4);
        assert!(matches!(short_conv(6).unwrap().construction, Construction::Nested(2, 3)));
        assert!(matches!(short_conv(12).unwrap().construction, Construction::Nested(3, 4)));
        assert_eq!(counts[11], 4 * 9);
        for (i, &c) in counts.iter().enumerate() {
            let s = i + 1;
            assert!(c <= s * s, "length {s}: {c}");
        }
    }

    #[test]
    fn unsupported_lengths() {
        assert_eq!(short_conv(0), Err(Error::UnsupportedLength(0)));
        assert_eq!(short_conv(17), Err(Error::UnsupportedLength(17)));
        assert!(direct_conv(17).verify());
    }

    #[test]
    fn linear_algorithms_verify() {
        for n in 1..=16 {
            let l = best_linear(n);
            assert!(l.verify(), "linear {n}");
        }
        assert_eq!(best_linear(2).count(), 3);
        assert_eq!(best_linear(4).count(), 9);
    }

    #[test]
    fn exhaustive_small_lengths_over_gf16() {
        let ctx = FieldContext::new(4, 0x13).unwrap();
        for s in 1..=3 {
            let alg = short_conv(s).unwrap();
            let total = 16usize.pow(s as u32);
            for ui in 0..total {
                let u: Vec<FieldElement> = (0..s).map(|i| FieldElement(((ui >> (4 * i)) & 15) as u16)).collect();
                for vi in 0..total {
                    let v: Vec<FieldElement> =
                        (0..s).map(|i| FieldElement(((vi >> (4 * i)) & 15) as u16)).collect();
                    assert_eq!(alg.apply(&ctx, &u, &v), circular(&ctx, &u, &v));
                }
            }
        }
    }

    #[test]
    fn random_pairs_longer_lengths() {
        let ctx = FieldContext::with_default_poly(12).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for s in 4..=MAX_CONV_LENGTH {
            let alg = short_conv(s).unwrap();
            for variant in alg.variants() {
                assert!(variant.verify());
            }
            for _ in 0..10_000 / 13 {
                let u: Vec<FieldElement> = (0..s).map(|_| FieldElement(rng.gen_range(0..4096))).collect();
                let v: Vec<FieldElement> = (0..s).map(|_| FieldElement(rng.gen_range(0..4096))).collect();
                assert_eq!(alg.apply(&ctx, &u, &v), circular(&ctx, &u, &v), "length {s}");
            }
        }
    }

    #[test]
    fn variants_include_receiver_first() {
        let a = short_conv(2).unwrap();
        let vs = a.variants();
        assert_eq!(vs[0], a);
        assert!(vs.len() > 1 && vs.len() <= 6);
    }
}
