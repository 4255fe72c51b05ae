//! Dead-computation removal for plans with known-zero inputs and a subset of
//! wanted outputs, plus a flattened executor for the surviving computation.

use super::{Tier, TransformPlan};
use crate::error::{Error, Result};
use crate::gf::{FieldContext, FieldElement};
use crate::gf2::BitMatrix;

/// Surviving parts of one module: network input slots, products (rows of the
/// pre-matrix together with their constants) and outputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleLive {
    pub inputs: Vec<bool>,
    pub products: Vec<bool>,
    pub outputs: Vec<bool>,
}

impl ModuleLive {
    pub fn is_dead(&self) -> bool {
        !self.outputs.iter().any(|&b| b)
    }
}

#[derive(Clone, Debug)]
pub struct PrunedPlan {
    pub base: TransformPlan,
    /// Sorted input indices known to be zero.
    pub zero_inputs: Vec<usize>,
    /// Sorted output indices that are computed.
    pub wanted_outputs: Vec<usize>,
    /// Per tier, per module.
    pub live: Vec<Vec<ModuleLive>>,
    /// Per tier, aligned with `Tier::twiddles`.
    pub live_twiddles: Vec<Vec<bool>>,
    exec: Executor,
}

fn bits_from(v: &[bool]) -> Vec<u64> {
    let mut out = vec![0u64; v.len().div_ceil(64)];
    for (i, &b) in v.iter().enumerate() {
        if b {
            out[i / 64] |= 1 << (i % 64);
        }
    }
    out
}

#[inline]
fn bit(words: &[u64], i: usize) -> bool {
    words[i / 64] >> (i % 64) & 1 == 1
}

#[inline]
fn intersects(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).any(|(x, y)| x & y != 0)
}

fn ones_in(words: &[u64], len: usize) -> Vec<bool> {
    (0..len).map(|i| bit(words, i)).collect()
}

struct ModuleForward {
    slot_nz: Vec<u64>,
    prod_nz: Vec<u64>,
    out_nz: Vec<bool>,
}

fn forward(pre: &BitMatrix, post: &BitMatrix, slot_nz: Vec<u64>) -> ModuleForward {
    let m = pre.rows();
    let mut prod_nz = vec![0u64; m.div_ceil(64)];
    for r in 0..m {
        if intersects(pre.row_words(r), &slot_nz) {
            prod_nz[r / 64] |= 1 << (r % 64);
        }
    }
    let out_nz = (0..post.rows()).map(|j| intersects(post.row_words(j), &prod_nz)).collect();
    ModuleForward { slot_nz, prod_nz, out_nz }
}

fn backward(pre: &BitMatrix, post: &BitMatrix, fw: &ModuleForward, out_needed: &[bool]) -> ModuleLive {
    let outputs: Vec<bool> = fw.out_nz.iter().zip(out_needed).map(|(&a, &b)| a && b).collect();
    let mut prod = vec![0u64; fw.prod_nz.len()];
    for (j, _) in outputs.iter().enumerate().filter(|(_, &l)| l) {
        for (p, w) in prod.iter_mut().zip(post.row_words(j)) {
            *p |= w;
        }
    }
    for (p, nz) in prod.iter_mut().zip(&fw.prod_nz) {
        *p &= nz;
    }
    let mut slots = vec![0u64; fw.slot_nz.len()];
    for r in 0..pre.rows() {
        if bit(&prod, r) {
            for (s, w) in slots.iter_mut().zip(pre.row_words(r)) {
                *s |= w;
            }
        }
    }
    for (s, nz) in slots.iter_mut().zip(&fw.slot_nz) {
        *s &= nz;
    }
    ModuleLive {
        inputs: ones_in(&slots, pre.cols()),
        products: ones_in(&prod, pre.rows()),
        outputs,
    }
}

/// Removes every computation that cannot influence a wanted output or is
/// structurally zero. A forward sweep marks possibly-nonzero values, a backward
/// sweep marks needed ones; together they reach the fixed point of local
/// row/column/constant elimination, so no further iteration is required.
pub fn prune(ctx: &FieldContext, plan: &TransformPlan, zero_inputs: &[usize], wanted_outputs: &[usize]) -> Result<PrunedPlan> {
    let n = plan.n;
    for &i in zero_inputs.iter().chain(wanted_outputs) {
        if i >= n {
            return Err(Error::DimensionMismatch { expected: n, got: i });
        }
    }
    let mut zero: Vec<usize> = zero_inputs.to_vec();
    zero.sort_unstable();
    zero.dedup();
    let mut wanted: Vec<usize> = wanted_outputs.to_vec();
    wanted.sort_unstable();
    wanted.dedup();

    let mut nz = vec![true; n];
    for &i in &zero {
        nz[i] = false;
    }
    let mut forwards: Vec<Vec<ModuleForward>> = Vec::with_capacity(plan.tiers.len());
    for tier in &plan.tiers {
        let post = &tier.network.post_matrix;
        let mut next = vec![false; n];
        let fws: Vec<ModuleForward> = tier
            .modules
            .iter()
            .map(|module| {
                let slot_nz = bits_from(&module.inputs.iter().map(|&w| nz[w]).collect::<Vec<_>>());
                let fw = forward(&tier.natural_pre, post, slot_nz);
                for (&w, &o) in module.outputs.iter().zip(&fw.out_nz) {
                    next[w] = o;
                }
                fw
            })
            .collect();
        forwards.push(fws);
        nz = next;
    }

    let mut need = vec![false; n];
    for &j in &wanted {
        need[plan.output_wires[j]] = true;
    }
    let mut live: Vec<Vec<ModuleLive>> = vec![Vec::new(); plan.tiers.len()];
    let mut live_twiddles: Vec<Vec<bool>> = vec![Vec::new(); plan.tiers.len()];
    for (t, tier) in plan.tiers.iter().enumerate().rev() {
        let post = &tier.network.post_matrix;
        let mut prev_need = vec![false; n];
        live[t] = tier
            .modules
            .iter()
            .zip(&forwards[t])
            .map(|(module, fw)| {
                let out_needed: Vec<bool> = module.outputs.iter().map(|&w| need[w]).collect();
                let ml = backward(&tier.natural_pre, post, fw, &out_needed);
                for (&w, &l) in module.inputs.iter().zip(&ml.inputs) {
                    prev_need[w] = l;
                }
                ml
            })
            .collect();
        live_twiddles[t] = tier.twiddles.iter().map(|&(w, _)| prev_need[w]).collect();
        need = prev_need;
    }

    let exec = Executor::compile(ctx, plan, &live, &live_twiddles, &wanted);
    Ok(PrunedPlan { base: plan.clone(), zero_inputs: zero, wanted_outputs: wanted, live, live_twiddles, exec })
}

impl PrunedPlan {
    /// Rebuilds a pruned plan from stored masks, recompiling the executor.
    pub(crate) fn from_parts(
        ctx: &FieldContext,
        base: TransformPlan,
        zero_inputs: Vec<usize>,
        wanted_outputs: Vec<usize>,
        live: Vec<Vec<ModuleLive>>,
        live_twiddles: Vec<Vec<bool>>,
    ) -> PrunedPlan {
        let exec = Executor::compile(ctx, &base, &live, &live_twiddles, &wanted_outputs);
        PrunedPlan { base, zero_inputs, wanted_outputs, live, live_twiddles, exec }
    }

    /// Multiplications: live products with a constant ≠ 1 plus live twiddles.
    pub fn mult_count(&self) -> usize {
        self.exec.mults
    }

    pub fn add_count(&self) -> usize {
        self.exec.adds
    }

    /// Modules of tier `t` that were removed entirely.
    pub fn dead_modules(&self, t: usize) -> usize {
        self.live[t].iter().filter(|m| m.is_dead()).count()
    }

    fn check_zeros(&self, f: &[FieldElement]) -> Result<()> {
        for &i in &self.zero_inputs {
            if i < f.len() && !f[i].is_zero() {
                return Err(Error::NonzeroDeclaredZero(i));
            }
        }
        Ok(())
    }

    /// Wanted outputs paired with their values, in ascending index order.
    pub fn eval(&self, ctx: &FieldContext, f: &[FieldElement]) -> Result<Vec<(usize, FieldElement)>> {
        if f.len() != self.base.n {
            return Err(Error::DimensionMismatch { expected: self.base.n, got: f.len() });
        }
        let values = self.eval_values(ctx, f)?;
        Ok(self.wanted_outputs.iter().copied().zip(values).collect())
    }

    /// Values aligned with `wanted_outputs`. `f` may be shorter than the
    /// transform length; missing entries are zero.
    pub fn eval_values(&self, ctx: &FieldContext, f: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if f.len() > self.base.n {
            return Err(Error::DimensionMismatch { expected: self.base.n, got: f.len() });
        }
        self.check_zeros(f)?;
        Ok(self.exec.run(ctx, f))
    }
}

pub fn eval_pruned(ctx: &FieldContext, pruned: &PrunedPlan, f: &[FieldElement]) -> Result<Vec<(usize, FieldElement)>> {
    pruned.eval(ctx, f)
}

const ONE_CONST: u32 = u32::MAX;

#[derive(Clone, Debug, Default)]
struct ExecTier {
    twiddles: Vec<(u32, u32)>,
    prod_const: Vec<u32>,
    prod_start: Vec<u32>,
    prod_wires: Vec<u32>,
    out_wire: Vec<u32>,
    out_start: Vec<u32>,
    out_terms: Vec<u32>,
}

#[derive(Clone, Debug, Default)]
struct Executor {
    n: usize,
    tiers: Vec<ExecTier>,
    wanted_wires: Vec<Option<u32>>,
    mults: usize,
    adds: usize,
}

impl Executor {
    fn compile(
        ctx: &FieldContext,
        plan: &TransformPlan,
        live: &[Vec<ModuleLive>],
        live_twiddles: &[Vec<bool>],
        wanted: &[usize],
    ) -> Executor {
        let mut mults = 0;
        let mut adds = 0;
        let mut tiers = Vec::with_capacity(plan.tiers.len());
        let mut written = vec![false; plan.n];
        for (t, tier) in plan.tiers.iter().enumerate() {
            let mut et = ExecTier::default();
            for (&(w, c), &l) in tier.twiddles.iter().zip(&live_twiddles[t]) {
                if l {
                    et.twiddles.push((w as u32, ctx.log(c).unwrap()));
                    mults += 1;
                }
            }
            let mut next_written = vec![false; plan.n];
            compile_tier(ctx, tier, &live[t], &mut et, &mut next_written);
            mults += et.prod_const.iter().filter(|&&c| c != ONE_CONST).count();
            adds += (0..et.prod_const.len())
                .map(|p| (et.prod_start[p + 1] - et.prod_start[p]) as usize - 1)
                .sum::<usize>();
            adds += (0..et.out_wire.len()).map(|o| (et.out_start[o + 1] - et.out_start[o]) as usize - 1).sum::<usize>();
            written = next_written;
            tiers.push(et);
        }
        let wanted_wires = wanted
            .iter()
            .map(|&j| {
                let w = plan.output_wires[j];
                written[w].then_some(w as u32)
            })
            .collect();
        Executor { n: plan.n, tiers, wanted_wires, mults, adds }
    }

    fn run(&self, ctx: &FieldContext, f: &[FieldElement]) -> Vec<FieldElement> {
        let mut stage = vec![FieldElement::ZERO; self.n];
        stage[..f.len()].copy_from_slice(f);
        let mut next = vec![FieldElement::ZERO; self.n];
        let mut products: Vec<FieldElement> = Vec::new();
        for et in &self.tiers {
            for &(w, lc) in &et.twiddles {
                stage[w as usize] = ctx.mul_by_log(stage[w as usize], lc);
            }
            products.clear();
            for (p, &lc) in et.prod_const.iter().enumerate() {
                let wires = &et.prod_wires[et.prod_start[p] as usize..et.prod_start[p + 1] as usize];
                let s = wires.iter().fold(FieldElement::ZERO, |acc, &w| acc + stage[w as usize]);
                products.push(if lc == ONE_CONST { s } else { ctx.mul_by_log(s, lc) });
            }
            next.iter_mut().for_each(|v| *v = FieldElement::ZERO);
            for (o, &w) in et.out_wire.iter().enumerate() {
                let terms = &et.out_terms[et.out_start[o] as usize..et.out_start[o + 1] as usize];
                next[w as usize] = terms.iter().fold(FieldElement::ZERO, |acc, &p| acc + products[p as usize]);
            }
            std::mem::swap(&mut stage, &mut next);
        }
        self.wanted_wires
            .iter()
            .map(|w| w.map_or(FieldElement::ZERO, |w| stage[w as usize]))
            .collect()
    }
}

fn compile_tier(ctx: &FieldContext, tier: &Tier, live: &[ModuleLive], et: &mut ExecTier, written: &mut [bool]) {
    let net = &tier.network;
    let pre = &tier.natural_pre;
    let post = &net.post_matrix;
    let const_logs: Vec<u32> = net
        .constants
        .iter()
        .map(|&c| if c == FieldElement::ONE { ONE_CONST } else { ctx.log(c).unwrap() })
        .collect();
    et.prod_start.push(0);
    et.out_start.push(0);
    for (module, ml) in tier.modules.iter().zip(live) {
        if ml.is_dead() {
            continue;
        }
        // product index within this tier for each live product of the module
        let mut local_index = vec![u32::MAX; net.products()];
        for r in (0..net.products()).filter(|&r| ml.products[r]) {
            local_index[r] = et.prod_const.len() as u32;
            et.prod_const.push(const_logs[r]);
            for slot in pre.row_ones(r) {
                if ml.inputs[slot] {
                    et.prod_wires.push(module.inputs[slot] as u32);
                }
            }
            et.prod_start.push(et.prod_wires.len() as u32);
        }
        for j in (0..net.n_out).filter(|&j| ml.outputs[j]) {
            et.out_wire.push(module.outputs[j] as u32);
            written[module.outputs[j]] = true;
            for r in post.row_ones(j) {
                if ml.products[r] {
                    et.out_terms.push(local_index[r]);
                }
            }
            et.out_start.push(et.out_terms.len() as u32);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{naive_dft, plan};
    use super::*;
    use crate::cfft::Form;
    use rand::{seq::SliceRandom, Rng, SeedableRng};

    fn gf16() -> FieldContext {
        FieldContext::new(4, 0x13).unwrap()
    }

    #[test]
    fn example_one_survivors() {
        // (15,11) syndrome: outputs 0..3 on the 3 × 5 plan
        let ctx = gf16();
        let p = plan(&ctx, 15, &[3, 5], &[Form::Scfft, Form::Scfft]).unwrap();
        let pr = prune(&ctx, &p, &[], &[0, 1, 2, 3]).unwrap();
        let outs: Vec<Vec<usize>> = pr.live[1]
            .iter()
            .map(|m| m.outputs.iter().enumerate().filter(|(_, &l)| l).map(|(j, _)| j).collect())
            .collect();
        assert_eq!(outs, vec![vec![0, 3], vec![1], vec![2]]);
        // first tier untouched
        assert!(pr.live[0].iter().all(|m| m.outputs.iter().all(|&l| l)));
        assert!(pr.mult_count() < prune(&ctx, &p, &[], &(0..15).collect::<Vec<_>>()).unwrap().mult_count());
    }

    #[test]
    fn example_two_removes_third_module() {
        let ctx = gf16();
        let p = plan(&ctx, 15, &[3, 5], &[Form::Scfft, Form::Scfft]).unwrap();
        let pr = prune(&ctx, &p, &[], &[0, 1]).unwrap();
        assert!(pr.live[1][2].is_dead());
        assert_eq!(pr.dead_modules(1), 1);
        for m in &pr.live[0] {
            assert_eq!(m.outputs, vec![true, true, false]);
        }
    }

    #[test]
    fn example_three_both_tiers_reduced() {
        let ctx = gf16();
        let p = plan(&ctx, 15, &[3, 5], &[Form::Dcfft, Form::Scfft]).unwrap();
        let zeros: Vec<usize> = (10..15).collect();
        let syndrome_only = prune(&ctx, &p, &[], &[0, 1, 2, 3]).unwrap();
        let pr = prune(&ctx, &p, &zeros, &[0, 1, 2, 3]).unwrap();
        let reduced_first_tier = pr.live[0].iter().filter(|m| m.inputs.iter().any(|&l| !l)).count();
        assert_eq!(reduced_first_tier, 5);
        assert!(pr.add_count() + pr.mult_count() < syndrome_only.add_count() + syndrome_only.mult_count());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let mut f: Vec<FieldElement> = (0..15).map(|_| FieldElement(rng.gen_range(0..16))).collect();
            for &z in &zeros {
                f[z] = FieldElement::ZERO;
            }
            let full = p.eval(&ctx, &f).unwrap();
            let got = pr.eval(&ctx, &f).unwrap();
            assert_eq!(got, (0..4).map(|j| (j, full[j])).collect::<Vec<_>>());
        }
    }

    #[test]
    fn no_op_prune_matches_full_counts() {
        let ctx = FieldContext::with_default_poly(6).unwrap();
        for factors in [vec![63], vec![7, 9], vec![3, 3, 7]] {
            let forms = vec![Form::Scfft; factors.len()];
            let p = plan(&ctx, 63, &factors, &forms).unwrap();
            let pr = prune(&ctx, &p, &[], &(0..63).collect::<Vec<_>>()).unwrap();
            let net_mults: usize = p.tiers.iter().map(|t| t.network.mult_count() * t.modules.len()).sum();
            let tw: usize = p.tiers.iter().map(|t| t.twiddles.len()).sum();
            let net_adds: usize = p.tiers.iter().map(|t| t.network.add_count() * t.modules.len()).sum();
            assert_eq!(pr.mult_count(), net_mults + tw);
            assert_eq!(pr.add_count(), net_adds);
        }
    }

    #[test]
    fn empty_wanted_is_empty_plan() {
        let ctx = gf16();
        let p = plan(&ctx, 15, &[3, 5], &[Form::Dcfft, Form::Dcfft]).unwrap();
        let pr = prune(&ctx, &p, &[], &[]).unwrap();
        assert_eq!((pr.mult_count(), pr.add_count()), (0, 0));
        assert!(pr.eval(&ctx, &[FieldElement(3); 15]).unwrap().is_empty());
    }

    #[test]
    fn rejects_nonzero_on_declared_zero() {
        let ctx = gf16();
        let p = plan(&ctx, 15, &[3, 5], &[Form::Dcfft, Form::Scfft]).unwrap();
        let pr = prune(&ctx, &p, &[10, 11], &[0]).unwrap();
        let mut f = vec![FieldElement::ZERO; 15];
        f[11] = FieldElement(1);
        assert_eq!(pr.eval(&ctx, &f), Err(Error::NonzeroDeclaredZero(11)));
        assert_eq!(pr.eval(&ctx, &[FieldElement::ZERO; 15]).unwrap(), vec![(0, FieldElement::ZERO)]);
    }

    #[test]
    fn random_sets_soundness_and_monotonicity() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for (m, n, factors) in [(4u32, 15usize, vec![5, 3]), (6, 63, vec![9, 7]), (6, 63, vec![3, 3, 7]), (6, 9, vec![3, 3])] {
            let ctx = FieldContext::with_default_poly(m).unwrap();
            let g = ctx.element_of_order(n).unwrap();
            for forms in [vec![Form::Dcfft; factors.len()], vec![Form::Scfft; factors.len()]] {
                let p = plan(&ctx, n, &factors, &forms).unwrap();
                let full = prune(&ctx, &p, &[], &(0..n).collect::<Vec<_>>()).unwrap();
                for _ in 0..20 {
                    let mut idx: Vec<usize> = (0..n).collect();
                    idx.shuffle(&mut rng);
                    let zeros = idx[..rng.gen_range(0..n)].to_vec();
                    idx.shuffle(&mut rng);
                    let wanted = idx[..rng.gen_range(0..=n)].to_vec();
                    let pr = prune(&ctx, &p, &zeros, &wanted).unwrap();
                    assert!(pr.mult_count() <= full.mult_count());
                    assert!(pr.add_count() <= full.add_count());
                    for _ in 0..5 {
                        let mut f: Vec<FieldElement> =
                            (0..n).map(|_| FieldElement(rng.gen_range(0..ctx.size()) as u16)).collect();
                        for &z in &zeros {
                            f[z] = FieldElement::ZERO;
                        }
                        let want = naive_dft(&ctx, g, &f);
                        for (j, v) in pr.eval(&ctx, &f).unwrap() {
                            assert_eq!(v, want[j]);
                        }
                    }
                }
            }
        }
    }
}
