//! Arithmetic in GF(2^m), 2 ≤ m ≤ 16, in polynomial basis with log/antilog tables.

use std::fmt;
use std::ops::{Add, AddAssign};

use crate::error::{Error, Result};

/// An element of GF(2^m) in polynomial-basis coordinates.
#[derive(Copy, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement(pub u16);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn value(self) -> u16 {
        self.0
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#x}", self.0)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:x}", self.0)
    }
}

impl Add for FieldElement {
    type Output = FieldElement;

    #[inline]
    fn add(self, rhs: FieldElement) -> FieldElement {
        FieldElement(self.0 ^ rhs.0)
    }
}

impl AddAssign for FieldElement {
    #[inline]
    fn add_assign(&mut self, rhs: FieldElement) {
        self.0 ^= rhs.0;
    }
}

/// Conventional primitive polynomial for each supported degree, as a bitmask
/// including the leading term.
pub fn default_primitive_poly(m: u32) -> Option<u32> {
    let p = match m {
        2 => 0x7,
        3 => 0xB,
        4 => 0x13,
        5 => 0x25,
        6 => 0x43,
        7 => 0x83,
        8 => 0x11D,
        9 => 0x211,
        10 => 0x409,
        11 => 0x805,
        12 => 0x1053,
        13 => 0x201B,
        14 => 0x4443,
        15 => 0x8003,
        16 => 0x1100B,
        _ => return None,
    };
    Some(p)
}

/// GF(2^m) defined by a primitive polynomial. Immutable once built.
#[derive(Clone)]
pub struct FieldContext {
    m: u32,
    prim_poly: u32,
    order: u32,
    // log[0] is unused
    log: Vec<u32>,
    // antilog table doubled so that exp[log a + log b] needs no reduction
    exp: Vec<u16>,
}

impl fmt::Debug for FieldContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldContext")
            .field("m", &self.m)
            .field("prim_poly", &format_args!("{:#x}", self.prim_poly))
            .finish()
    }
}

impl PartialEq for FieldContext {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m && self.prim_poly == other.prim_poly
    }
}

impl Eq for FieldContext {}

impl FieldContext {
    /// Builds GF(2^m) from `prim_poly`, verifying that x generates the
    /// multiplicative group.
    pub fn new(m: u32, prim_poly: u32) -> Result<Self> {
        if !(2..=16).contains(&m) {
            return Err(Error::DegreeOutOfRange(m));
        }
        if prim_poly >> m != 1 {
            return Err(Error::PolynomialDegree { poly: prim_poly, m });
        }
        let size = 1u32 << m;
        let order = size - 1;
        let mut exp = vec![0u16; 2 * order as usize];
        let mut log = vec![0u32; size as usize];
        let mut x: u32 = 1;
        for i in 0..order {
            if i > 0 && x == 1 {
                return Err(Error::NonPrimitivePolynomial { poly: prim_poly, order: i });
            }
            if x == 0 {
                return Err(Error::NonPrimitivePolynomial { poly: prim_poly, order: 0 });
            }
            exp[i as usize] = x as u16;
            exp[(i + order) as usize] = x as u16;
            log[x as usize] = i;
            x <<= 1;
            if x & size != 0 {
                x ^= prim_poly;
            }
        }
        if x != 1 {
            return Err(Error::NonPrimitivePolynomial { poly: prim_poly, order: 0 });
        }
        Ok(FieldContext { m, prim_poly, order, log, exp })
    }

    /// GF(2^m) with the conventional default primitive polynomial.
    pub fn with_default_poly(m: u32) -> Result<Self> {
        let poly = default_primitive_poly(m).ok_or(Error::DegreeOutOfRange(m))?;
        Self::new(m, poly)
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn prim_poly(&self) -> u32 {
        self.prim_poly
    }

    /// Number of field elements, 2^m.
    pub fn size(&self) -> usize {
        1 << self.m
    }

    /// Order of the multiplicative group, 2^m − 1.
    pub fn group_order(&self) -> usize {
        self.order as usize
    }

    pub fn element(&self, value: u32) -> Result<FieldElement> {
        if value >= 1 << self.m {
            return Err(Error::DimensionMismatch { expected: self.size(), got: value as usize });
        }
        Ok(FieldElement(value as u16))
    }

    /// The generator α (the class of x).
    pub fn alpha(&self) -> FieldElement {
        FieldElement(self.exp[1])
    }

    /// α^e for any integer exponent (reduced modulo 2^m − 1).
    pub fn alpha_pow(&self, e: i64) -> FieldElement {
        let r = e.rem_euclid(self.order as i64) as usize;
        FieldElement(self.exp[r])
    }

    /// Discrete logarithm base α; `None` for zero.
    pub fn log(&self, a: FieldElement) -> Option<u32> {
        if a.is_zero() {
            None
        } else {
            Some(self.log[a.0 as usize])
        }
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        a + b
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        let s = self.log[a.0 as usize] + self.log[b.0 as usize];
        FieldElement(self.exp[s as usize])
    }

    /// Multiplies `a` by the constant whose logarithm is `log_c`.
    #[inline]
    pub fn mul_by_log(&self, a: FieldElement, log_c: u32) -> FieldElement {
        if a.0 == 0 {
            return FieldElement::ZERO;
        }
        FieldElement(self.exp[(self.log[a.0 as usize] + log_c) as usize])
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let l = self.log[a.0 as usize];
        Ok(FieldElement(self.exp[((self.order - l) % self.order) as usize]))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        if b.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if a.is_zero() {
            return Ok(FieldElement::ZERO);
        }
        let s = self.log[a.0 as usize] + self.order - self.log[b.0 as usize];
        Ok(FieldElement(self.exp[s as usize]))
    }

    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        if e == 0 {
            return FieldElement::ONE;
        }
        if a.is_zero() {
            return FieldElement::ZERO;
        }
        let l = self.log[a.0 as usize] as u64;
        FieldElement(self.exp[((l * (e % self.order as u64)) % self.order as u64) as usize])
    }

    /// Multiplicative order of a nonzero element.
    pub fn order_of(&self, a: FieldElement) -> Result<usize> {
        let l = self.log(a).ok_or(Error::DivisionByZero)? as usize;
        let n = self.group_order();
        Ok(n / gcd(n, l))
    }

    /// The element α^((2^m−1)/n), which has order exactly n.
    pub fn element_of_order(&self, n: usize) -> Result<FieldElement> {
        let q = self.group_order();
        if n == 0 || q % n != 0 {
            return Err(Error::OrderUnavailable { n, m: self.m });
        }
        Ok(self.alpha_pow((q / n) as i64))
    }
}

pub(crate) fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    // Carry-less multiply then reduce: independent of the tables.
    fn clmul_reduce(a: u32, b: u32, poly: u32, m: u32) -> u32 {
        let mut acc: u64 = 0;
        for i in 0..m {
            if b >> i & 1 == 1 {
                acc ^= (a as u64) << i;
            }
        }
        for bit in (m..2 * m).rev() {
            if acc >> bit & 1 == 1 {
                acc ^= (poly as u64) << (bit - m);
            }
        }
        acc as u32
    }

    fn brute_order(ctx: &FieldContext, a: FieldElement) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != FieldElement::ONE {
            x = ctx.mul(x, a);
            k += 1;
        }
        k
    }

    #[test]
    fn gf16_alpha_has_order_15() {
        let ctx = FieldContext::new(4, 0x13).unwrap();
        assert_eq!(brute_order(&ctx, ctx.alpha()), 15);
    }

    #[test]
    fn rejects_non_primitive_polynomial() {
        // x^4+x^3+x^2+x+1: x has order 5
        match FieldContext::new(4, 0x1F) {
            Err(Error::NonPrimitivePolynomial { order, .. }) => assert_eq!(order, 5),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(FieldContext::new(1, 0x3), Err(Error::DegreeOutOfRange(1))));
        assert!(matches!(FieldContext::new(17, 0x3), Err(Error::DegreeOutOfRange(17))));
        assert!(matches!(FieldContext::new(4, 0x3), Err(Error::PolynomialDegree { .. })));
    }

    #[test]
    fn default_polys_are_primitive() {
        for m in 2..=16 {
            FieldContext::with_default_poly(m).unwrap();
        }
    }

    #[test]
    fn alpha_squared_squared() {
        let ctx = FieldContext::new(4, 0x13).unwrap();
        let a2 = ctx.alpha_pow(2);
        assert_eq!(ctx.mul(a2, a2), FieldElement(0b0011));
    }

    #[test]
    fn table_mul_matches_clmul_exhaustive_small() {
        for m in 2..=8 {
            let ctx = FieldContext::with_default_poly(m).unwrap();
            let size = 1u32 << m;
            for a in 0..size {
                for b in 0..size {
                    let got = ctx.mul(FieldElement(a as u16), FieldElement(b as u16));
                    assert_eq!(got.0 as u32, clmul_reduce(a, b, ctx.prim_poly(), m), "m={m} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn table_mul_matches_clmul_random_large() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for m in 9..=16 {
            let ctx = FieldContext::with_default_poly(m).unwrap();
            for _ in 0..100_000 / 8 {
                let a = rng.gen_range(0..1u32 << m);
                let b = rng.gen_range(0..1u32 << m);
                let got = ctx.mul(FieldElement(a as u16), FieldElement(b as u16));
                assert_eq!(got.0 as u32, clmul_reduce(a, b, ctx.prim_poly(), m));
            }
        }
    }

    #[test]
    fn identities() {
        let ctx = FieldContext::with_default_poly(6).unwrap();
        for a in 0..64u16 {
            let a = FieldElement(a);
            assert_eq!(ctx.mul(a, FieldElement::ONE), a);
            assert_eq!(ctx.mul(a, FieldElement::ZERO), FieldElement::ZERO);
            assert_eq!(a + a, FieldElement::ZERO);
            if !a.is_zero() {
                assert_eq!(ctx.mul(a, ctx.inv(a).unwrap()), FieldElement::ONE);
            }
        }
    }

    #[test]
    fn inverse_cases() {
        let ctx = FieldContext::new(4, 0x13).unwrap();
        assert_eq!(ctx.inv(FieldElement::ONE).unwrap(), FieldElement::ONE);
        // exhaustive search for the inverse of α
        let alpha = ctx.alpha();
        let found = (1..16u16)
            .map(FieldElement)
            .find(|&x| clmul_reduce(alpha.0 as u32, x.0 as u32, 0x13, 4) == 1)
            .unwrap();
        assert_eq!(found, ctx.alpha_pow(14));
        assert_eq!(ctx.inv(alpha).unwrap(), found);
        assert_eq!(ctx.inv(FieldElement::ZERO), Err(Error::DivisionByZero));
    }

    #[test]
    fn element_of_order_cases() {
        let ctx = FieldContext::new(4, 0x13).unwrap();
        assert_eq!(ctx.element_of_order(15).unwrap(), ctx.alpha());
        let g5 = ctx.element_of_order(5).unwrap();
        assert_eq!(g5, ctx.alpha_pow(3));
        assert_eq!(brute_order(&ctx, g5), 5);
        assert!(matches!(ctx.element_of_order(7), Err(Error::OrderUnavailable { .. })));
        for m in 2..=12 {
            let ctx = FieldContext::with_default_poly(m).unwrap();
            let q = ctx.group_order();
            for n in (1..=q).filter(|n| q % n == 0) {
                let g = ctx.element_of_order(n).unwrap();
                assert_eq!(ctx.pow(g, n as u64), FieldElement::ONE);
                assert_eq!(ctx.order_of(g).unwrap(), n);
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn field_axioms(m in 2u32..=16, a: u16, b: u16, c: u16) {
                let ctx = FieldContext::with_default_poly(m).unwrap();
                let mask = ((1u32 << m) - 1) as u16;
                let (a, b, c) = (FieldElement(a & mask), FieldElement(b & mask), FieldElement(c & mask));
                prop_assert_eq!((a + b) + c, a + (b + c));
                prop_assert_eq!(ctx.mul(a, b + c), ctx.mul(a, b) + ctx.mul(a, c));
                prop_assert_eq!(ctx.mul(ctx.mul(a, b), c), ctx.mul(a, ctx.mul(b, c)));
                if !b.is_zero() {
                    prop_assert_eq!(ctx.mul(ctx.div(a, b).unwrap(), b), a);
                }
            }
        }
    }
}
