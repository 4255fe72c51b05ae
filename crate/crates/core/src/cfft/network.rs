use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::conv::{direct_conv, short_conv, ShortConvAlg, MAX_CONV_LENGTH};
use super::cosets::{orbit, CyclotomicCosets};
use crate::error::{Error, Result};
use crate::gf::{FieldContext, FieldElement};
use crate::gf2::BitMatrix;

/// Which factorization of the DFT matrix a network realizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    /// F = AQ(c · P f')
    Dcfft,
    /// Transpose of the direct form.
    Scfft,
}

impl Form {
    pub fn name(self) -> &'static str {
        match self {
            Form::Dcfft => "dcfft",
            Form::Scfft => "scfft",
        }
    }
}

impl std::str::FromStr for Form {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "dcfft" | "d" => Ok(Form::Dcfft),
            "scfft" | "s" => Ok(Form::Scfft),
            other => Err(format!("unknown form {other:?} (expected dcfft or scfft)")),
        }
    }
}

/// A bilinear network `F = post · (constants ⊙ (pre · f'))` with
/// `f'[t] = f[input_perm[t]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BilinearNetwork {
    pub n_in: usize,
    pub n_out: usize,
    /// The element whose powers define the transform.
    pub root: FieldElement,
    pub form: Form,
    /// Binary n_out × M matrix (the merged AQ).
    pub post_matrix: BitMatrix,
    /// Length-M vector of nonzero constants.
    pub constants: Vec<FieldElement>,
    /// Binary M × n_in matrix acting on the permuted input.
    pub pre_matrix: BitMatrix,
    pub input_perm: Vec<usize>,
}

impl BilinearNetwork {
    /// Number of entrywise products, M.
    pub fn products(&self) -> usize {
        self.constants.len()
    }

    /// Products whose constant is not 1.
    pub fn mult_count(&self) -> usize {
        self.constants.iter().filter(|&&c| c != FieldElement::ONE).count()
    }

    /// Additions in the pre- and post-networks, one fewer than the row weight
    /// for every nonempty row.
    pub fn add_count(&self) -> usize {
        matrix_adds(&self.pre_matrix) + matrix_adds(&self.post_matrix)
    }

    /// The pre-matrix with the input permutation folded in, so that it acts on
    /// `f` directly.
    pub fn natural_pre(&self) -> BitMatrix {
        let mut out = BitMatrix::zeros(self.pre_matrix.rows(), self.n_in);
        for r in 0..self.pre_matrix.rows() {
            for t in self.pre_matrix.row_ones(r) {
                out.set(r, self.input_perm[t], true);
            }
        }
        out
    }

    pub fn eval(&self, ctx: &FieldContext, f: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if f.len() != self.n_in {
            return Err(Error::DimensionMismatch { expected: self.n_in, got: f.len() });
        }
        let permuted: Vec<FieldElement> = self.input_perm.iter().map(|&i| f[i]).collect();
        let products: Vec<FieldElement> = (0..self.products())
            .map(|r| {
                let s = self.pre_matrix.row_ones(r).into_iter().fold(FieldElement::ZERO, |acc, c| acc + permuted[c]);
                ctx.mul(s, self.constants[r])
            })
            .collect();
        Ok((0..self.n_out)
            .map(|j| self.post_matrix.row_ones(j).into_iter().fold(FieldElement::ZERO, |acc, r| acc + products[r]))
            .collect())
    }

    /// The network of the transposed linear map; the input permutation moves
    /// into the post-matrix.
    pub fn transposed(&self, form: Form) -> BilinearNetwork {
        BilinearNetwork {
            n_in: self.n_out,
            n_out: self.n_in,
            root: self.root,
            form,
            pre_matrix: self.post_matrix.transpose(),
            constants: self.constants.clone(),
            post_matrix: self.natural_pre().transpose(),
            input_perm: (0..self.n_out).collect(),
        }
    }
}

pub(crate) fn matrix_adds(m: &BitMatrix) -> usize {
    (0..m.rows()).map(|r| m.row_weight(r).saturating_sub(1)).sum()
}

/// Builds the direct-form cyclotomic FFT computing F_j = Σ_i f_i γ^{ij}.
pub fn build_dcfft(ctx: &FieldContext, n: usize, gamma: FieldElement) -> Result<BilinearNetwork> {
    if gamma.is_zero() || ctx.order_of(gamma)? != n {
        return Err(Error::OrderUnavailable { n, m: ctx.m() });
    }
    let cosets = CyclotomicCosets::new(n)?;
    let log_gamma = ctx.log(gamma).unwrap() as u64;
    let q = ctx.group_order() as u64;

    let mut input_perm = Vec::with_capacity(n);
    let mut pre_rows: Vec<Vec<usize>> = Vec::new();
    let mut constants = Vec::new();
    // post-matrix assembled column block by column block
    let mut post_blocks: Vec<BitMatrix> = Vec::new();
    let mut coord_cache: HashMap<u16, Vec<u32>> = HashMap::new();

    for leader in cosets.leaders() {
        let orb = orbit(leader, n);
        let s = orb.len();
        let offset = input_perm.len();
        // u'_p = f_{k·2^{−p}} turns the correlation into a cyclic convolution
        for p in 0..s {
            input_perm.push(orb[(s - p) % s]);
        }
        let gk = ctx.pow(gamma, leader as u64);
        let beta = normal_element(ctx, gk, s);
        let basis = conjugates(ctx, beta, s);
        let coords = coord_cache.entry(beta.0).or_insert_with(|| coordinate_table(ctx, &basis));

        let alg = choose_variant(ctx, s, &basis);
        let consts = fold_constants(&alg, &basis);
        for r in 0..alg.mult_count() {
            pre_rows.push(alg.pre_a.row_ones(r).into_iter().map(|c| c + offset).collect());
        }
        constants.extend(consts);

        let mut block = BitMatrix::zeros(n, alg.mult_count());
        for j in 0..n {
            let e = (log_gamma * ((j * leader) as u64 % q)) % q;
            let value = ctx.alpha_pow(e as i64);
            let mask = coords[value.0 as usize];
            debug_assert!(mask != u32::MAX, "γ^(jk) outside the coset subfield");
            for l in 0..s {
                if mask >> l & 1 == 1 {
                    block.xor_row_from(j, &alg.post, l);
                }
            }
        }
        post_blocks.push(block.transpose());
    }

    let m_total = constants.len();
    let mut pre_matrix = BitMatrix::zeros(m_total, n);
    for (r, cols) in pre_rows.iter().enumerate() {
        for &c in cols {
            pre_matrix.set(r, c, true);
        }
    }
    let post_matrix = post_blocks.into_iter().reduce(|a, b| a.vstack(&b)).unwrap().transpose();
    Ok(BilinearNetwork {
        n_in: n,
        n_out: n,
        root: gamma,
        form: Form::Dcfft,
        post_matrix,
        constants,
        pre_matrix,
        input_perm,
    })
}

/// Builds the symmetric form as the transpose of the direct network; the DFT
/// matrix is symmetric so the map is unchanged.
pub fn build_scfft(ctx: &FieldContext, n: usize, gamma: FieldElement) -> Result<BilinearNetwork> {
    Ok(build_dcfft(ctx, n, gamma)?.transposed(Form::Scfft))
}

pub fn build_network(ctx: &FieldContext, n: usize, gamma: FieldElement, form: Form) -> Result<BilinearNetwork> {
    match form {
        Form::Dcfft => build_dcfft(ctx, n, gamma),
        Form::Scfft => build_scfft(ctx, n, gamma),
    }
}

pub fn eval_network(ctx: &FieldContext, net: &BilinearNetwork, f: &[FieldElement]) -> Result<Vec<FieldElement>> {
    net.eval(ctx, f)
}

fn conjugates(ctx: &FieldContext, beta: FieldElement, s: usize) -> Vec<FieldElement> {
    let mut out = Vec::with_capacity(s);
    let mut x = beta;
    for _ in 0..s {
        out.push(x);
        x = ctx.mul(x, x);
    }
    out
}

fn independent(values: &[FieldElement]) -> bool {
    // Gaussian elimination on m-bit vectors
    let mut pivots: Vec<u16> = Vec::new();
    for &v in values {
        let mut x = v.0;
        for &p in &pivots {
            let top = 15 - p.leading_zeros();
            if x >> top & 1 == 1 {
                x ^= p;
            }
        }
        if x == 0 {
            return false;
        }
        pivots.push(x);
        pivots.sort_unstable_by(|a, b| b.cmp(a));
    }
    true
}

/// A normal element of GF(2^s) ⊂ GF(2^m): `preferred` when its conjugates are
/// independent, otherwise the first power of the subfield generator that is.
fn normal_element(ctx: &FieldContext, preferred: FieldElement, s: usize) -> FieldElement {
    if independent(&conjugates(ctx, preferred, s)) {
        return preferred;
    }
    let sub_order = (1usize << s) - 1;
    let zeta = ctx.alpha_pow((ctx.group_order() / sub_order) as i64);
    (1..sub_order as u64)
        .map(|e| ctx.pow(zeta, e))
        .find(|&b| independent(&conjugates(ctx, b, s)))
        .expect("every finite field has a normal basis")
}

/// Maps each element of span(basis) to its coordinate mask; u32::MAX elsewhere.
fn coordinate_table(ctx: &FieldContext, basis: &[FieldElement]) -> Vec<u32> {
    let mut table = vec![u32::MAX; ctx.size()];
    for mask in 0u32..1 << basis.len() {
        let v = basis
            .iter()
            .enumerate()
            .filter(|(l, _)| mask >> l & 1 == 1)
            .fold(FieldElement::ZERO, |acc, (_, &b)| acc + b);
        table[v.0 as usize] = mask;
    }
    table
}

fn fold_constants(alg: &ShortConvAlg, v: &[FieldElement]) -> Vec<FieldElement> {
    (0..alg.mult_count())
        .map(|r| alg.pre_b.row_ones(r).into_iter().fold(FieldElement::ZERO, |acc, c| acc + v[c]))
        .collect()
}

/// Picks the variant with the fewest nontrivial constants for this operand,
/// then the fewest additions; earlier variants win ties.
fn choose_variant(_ctx: &FieldContext, s: usize, v: &[FieldElement]) -> ShortConvAlg {
    let base = if s <= MAX_CONV_LENGTH { short_conv(s).expect("length checked") } else { direct_conv(s) };
    base.variants()
        .into_iter()
        .min_by_key(|alg| {
            let nontrivial = fold_constants(alg, v).iter().filter(|&&c| c != FieldElement::ONE).count();
            (nontrivial, matrix_adds(&alg.pre_a) + matrix_adds(&alg.post))
        })
        .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn naive_dft(ctx: &FieldContext, gamma: FieldElement, f: &[FieldElement]) -> Vec<FieldElement> {
        let n = f.len();
        (0..n)
            .map(|j| {
                let x = ctx.pow(gamma, j as u64);
                // Horner
                f.iter().rev().fold(FieldElement::ZERO, |acc, &c| ctx.mul(acc, x) + c)
            })
            .collect()
    }

    fn random_vec(rng: &mut impl Rng, ctx: &FieldContext, n: usize) -> Vec<FieldElement> {
        (0..n).map(|_| FieldElement(rng.gen_range(0..ctx.size()) as u16)).collect()
    }

    #[test]
    fn five_point_dcfft_has_ten_constants() {
        let ctx = FieldContext::new(4, 0x13).unwrap();
        let g = ctx.element_of_order(5).unwrap();
        assert_eq!(g, ctx.alpha_pow(3));
        let net = build_dcfft(&ctx, 5, g).unwrap();
        assert_eq!(net.products(), 10);
        assert!(net.constants.iter().all(|c| !c.is_zero()));
        let mut e0 = vec![FieldElement::ZERO; 5];
        e0[0] = FieldElement::ONE;
        assert_eq!(net.eval(&ctx, &e0).unwrap(), vec![FieldElement::ONE; 5]);
    }

    #[test]
    fn three_point_scfft_matches_printed_matrices() {
        let ctx = FieldContext::new(4, 0x13).unwrap();
        let beta = ctx.alpha_pow(5);
        let net = build_scfft(&ctx, 3, beta).unwrap();
        let a = |e| ctx.alpha_pow(e);
        assert_eq!(net.constants, vec![a(0), a(5), a(0), a(0)]);
        assert_eq!(
            net.post_matrix,
            BitMatrix::from_rows(&[vec![1, 0, 0, 0], vec![0, 1, 1, 0], vec![0, 1, 0, 1]])
        );
        assert_eq!(
            net.pre_matrix,
            BitMatrix::from_rows(&[vec![1, 1, 1], vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]])
        );
        assert_eq!(net.mult_count(), 1);
    }

    #[test]
    fn single_point_is_identity() {
        let ctx = FieldContext::new(4, 0x13).unwrap();
        for form in [Form::Dcfft, Form::Scfft] {
            let net = build_network(&ctx, 1, FieldElement::ONE, form).unwrap();
            assert_eq!(net.eval(&ctx, &[FieldElement(9)]).unwrap(), vec![FieldElement(9)]);
            assert_eq!(net.mult_count(), 0);
            assert_eq!(net.add_count(), 0);
        }
    }

    #[test]
    fn rejects_wrong_order() {
        let ctx = FieldContext::new(4, 0x13).unwrap();
        assert!(matches!(build_dcfft(&ctx, 5, ctx.alpha()), Err(Error::OrderUnavailable { .. })));
        assert!(matches!(
            build_dcfft(&ctx, 5, FieldElement::ONE).unwrap_err(),
            Error::OrderUnavailable { .. }
        ));
    }

    #[test]
    fn dimension_mismatch() {
        let ctx = FieldContext::new(4, 0x13).unwrap();
        let net = build_dcfft(&ctx, 15, ctx.alpha()).unwrap();
        assert_eq!(
            net.eval(&ctx, &[FieldElement::ZERO; 3]),
            Err(Error::DimensionMismatch { expected: 15, got: 3 })
        );
    }

    #[test]
    fn networks_match_naive_dft() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for (m, n) in [(4, 15), (4, 5), (4, 3), (6, 63), (6, 9), (6, 21), (8, 255), (8, 17), (9, 73), (10, 33), (12, 65)] {
            let ctx = FieldContext::with_default_poly(m).unwrap();
            let g = ctx.element_of_order(n).unwrap();
            let d = build_dcfft(&ctx, n, g).unwrap();
            let s = build_scfft(&ctx, n, g).unwrap();
            assert_eq!(d.mult_count(), s.mult_count());
            assert_eq!(d.add_count(), s.add_count());
            let trials = if n > 100 { 10 } else { 100 };
            for _ in 0..trials {
                let f = random_vec(&mut rng, &ctx, n);
                let want = naive_dft(&ctx, g, &f);
                assert_eq!(d.eval(&ctx, &f).unwrap(), want, "dcfft m={m} n={n}");
                assert_eq!(s.eval(&ctx, &f).unwrap(), want, "scfft m={m} n={n}");
            }
            assert_eq!(d.eval(&ctx, &vec![FieldElement::ZERO; n]).unwrap(), vec![FieldElement::ZERO; n]);
        }
    }

    #[test]
    fn other_roots_of_same_order() {
        let ctx = FieldContext::new(4, 0x13).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for e in [1, 2, 4, 7, 8, 11, 13, 14] {
            let g = ctx.alpha_pow(e);
            let net = build_dcfft(&ctx, 15, g).unwrap();
            for _ in 0..20 {
                let f = random_vec(&mut rng, &ctx, 15);
                assert_eq!(net.eval(&ctx, &f).unwrap(), naive_dft(&ctx, g, &f));
            }
        }
    }
}
