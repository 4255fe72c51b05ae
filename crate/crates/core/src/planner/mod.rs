//! Composite transforms: an N-point DFT split into tiers of short cyclotomic
//! FFTs via the prime-factor (Good) or Cooley-Tukey index mappings.
//!
//! Wires are numbered per stage. Stage 0 holds the input vector in natural
//! order; tier `t` reads stage `t` and writes stage `t + 1`. Every module of a
//! tier evaluates the same network built for the canonical root
//! `element_of_order(size)`; the module's input wiring absorbs the difference
//! between that root and the root the mapping actually requires.
//!
//! Good's mapping uses the CRT on both sides: input i ↦ (i mod N1, i mod N2),
//! output j ↦ (j mod N1, j mod N2). Tier one runs N2 transforms of N1 points
//! and writes the intermediate value (i2, j1) to wire `j1·N2 + i2`, so the
//! second tier's module `j1` sees a contiguous block.

mod prune;
mod serial;

use std::collections::HashMap;
use std::sync::Arc;

pub use prune::{eval_pruned, prune, ModuleLive, PrunedPlan};
pub use serial::{load_plan, save_plan, LoadedPlan, PlanFile};

use crate::cfft::{build_network, BilinearNetwork, Form};
use crate::error::{Error, Result};
use crate::gf::{gcd, FieldContext, FieldElement};
use crate::gf2::BitMatrix;

/// Index mapping used at one split of the factor list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mapping {
    PrimeFactor,
    CooleyTukey,
}

/// One sub-transform instance: `inputs[slot]` is the wire feeding network
/// input `slot`, `outputs[j]` the wire receiving network output `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Module {
    pub inputs: Vec<usize>,
    pub outputs: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct Tier {
    pub size: usize,
    pub form: Form,
    pub network: Arc<BilinearNetwork>,
    /// Network pre-matrix with its input permutation folded in.
    pub natural_pre: Arc<BitMatrix>,
    /// Constants ≠ 1 applied to incoming wires before the modules run.
    pub twiddles: Vec<(usize, FieldElement)>,
    pub modules: Vec<Module>,
}

#[derive(Clone, Debug)]
pub struct TransformPlan {
    pub m: u32,
    pub prim_poly: u32,
    pub n: usize,
    pub root: FieldElement,
    pub factors: Vec<usize>,
    pub mappings: Vec<Mapping>,
    pub tiers: Vec<Tier>,
    /// Output index j lives on wire `output_wires[j]` of the last stage.
    pub output_wires: Vec<usize>,
}

impl TransformPlan {
    pub fn forms(&self) -> Vec<Form> {
        self.tiers.iter().map(|t| t.form).collect()
    }

    /// Human-readable shape such as "63x65".
    pub fn shape(&self) -> String {
        self.factors.iter().map(|f| f.to_string()).collect::<Vec<_>>().join("x")
    }

    pub fn eval(&self, ctx: &FieldContext, f: &[FieldElement]) -> Result<Vec<FieldElement>> {
        eval_plan(ctx, self, f)
    }
}

type CacheEntry = (Arc<BilinearNetwork>, Arc<BitMatrix>);

/// Networks shared across plans, keyed by (size, form). Cloning is cheap.
#[derive(Clone, Default)]
pub struct NetworkCache {
    entries: HashMap<(usize, Form), CacheEntry>,
}

impl NetworkCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&mut self, ctx: &FieldContext, size: usize, form: Form) -> Result<CacheEntry> {
        if let Some(e) = self.entries.get(&(size, form)) {
            return Ok(e.clone());
        }
        let entry = Self::build(ctx, size, form)?;
        self.entries.insert((size, form), entry.clone());
        Ok(entry)
    }

    fn build(ctx: &FieldContext, size: usize, form: Form) -> Result<CacheEntry> {
        let root = ctx.element_of_order(size)?;
        let net = build_network(ctx, size, root, form)?;
        let pre = net.natural_pre();
        Ok((Arc::new(net), Arc::new(pre)))
    }

    /// Builds the missing networks concurrently.
    pub fn prefill(&mut self, ctx: &FieldContext, keys: &[(usize, Form)]) -> Result<()> {
        use rayon::prelude::*;
        let missing: Vec<(usize, Form)> = keys.iter().copied().filter(|k| !self.entries.contains_key(k)).collect();
        let built = missing
            .par_iter()
            .map(|&(size, form)| Ok(((size, form), Self::build(ctx, size, form)?)))
            .collect::<Result<Vec<_>>>()?;
        self.entries.extend(built);
        Ok(())
    }
}

/// Builds the tiered plan for the DFT with root `element_of_order(n)`.
pub fn plan(ctx: &FieldContext, n: usize, factors: &[usize], forms: &[Form]) -> Result<TransformPlan> {
    plan_with_cache(ctx, n, factors, forms, &mut NetworkCache::new())
}

pub fn plan_with_cache(
    ctx: &FieldContext,
    n: usize,
    factors: &[usize],
    forms: &[Form],
    cache: &mut NetworkCache,
) -> Result<TransformPlan> {
    let bad = || Error::BadFactorization { n, factors: factors.to_vec() };
    if factors.is_empty() || factors.iter().product::<usize>() != n || forms.len() != factors.len() {
        return Err(bad());
    }
    if factors.len() > 1 && factors.iter().any(|&f| f < 2) {
        return Err(bad());
    }
    let root = ctx.element_of_order(n)?;
    let local = build_local(ctx, root, factors, forms, cache)?;
    let mappings = (0..factors.len() - 1)
        .map(|i| {
            let rest: usize = factors[i + 1..].iter().product();
            if gcd(factors[i], rest) == 1 {
                Mapping::PrimeFactor
            } else {
                Mapping::CooleyTukey
            }
        })
        .collect();
    let tiers = local
        .tiers
        .into_iter()
        .zip(forms)
        .map(|(lt, &form)| {
            let (network, natural_pre) = cache.get(ctx, lt.size, form)?;
            Ok(Tier { size: lt.size, form, network, natural_pre, twiddles: lt.twiddles, modules: lt.modules })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TransformPlan {
        m: ctx.m(),
        prim_poly: ctx.prim_poly(),
        n,
        root,
        factors: factors.to_vec(),
        mappings,
        tiers,
        output_wires: local.output_wires,
    })
}

struct LocalTier {
    size: usize,
    twiddles: Vec<(usize, FieldElement)>,
    modules: Vec<Module>,
}

struct LocalPlan {
    tiers: Vec<LocalTier>,
    output_wires: Vec<usize>,
}

fn inv_mod(a: usize, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    (1..n).find(|&x| a * x % n == 1).expect("unit modulo n")
}

/// For a root ω of order `size`: slot i' of the canonical network must read
/// DFT input index `slot_map[i']`.
fn slot_map(ctx: &FieldContext, omega: FieldElement, size: usize) -> Vec<usize> {
    if size == 1 {
        return vec![0];
    }
    let step = ctx.group_order() / size;
    let u = ctx.log(omega).unwrap() as usize / step % size;
    let uinv = inv_mod(u, size);
    (0..size).map(|i| uinv * i % size).collect()
}

fn build_local(
    ctx: &FieldContext,
    root: FieldElement,
    factors: &[usize],
    forms: &[Form],
    cache: &mut NetworkCache,
) -> Result<LocalPlan> {
    let n: usize = factors.iter().product();
    // make sure the network exists before wiring anything to it
    cache.get(ctx, factors[0], forms[0])?;
    if factors.len() == 1 {
        let slots = slot_map(ctx, root, n);
        return Ok(LocalPlan {
            tiers: vec![LocalTier {
                size: n,
                twiddles: Vec::new(),
                modules: vec![Module { inputs: slots, outputs: (0..n).collect() }],
            }],
            output_wires: (0..n).collect(),
        });
    }

    let n1 = factors[0];
    let r = n / n1;
    let coprime = gcd(n1, r) == 1;
    let (omega1, omega2) = if coprime {
        let e1 = r * inv_mod(r % n1, n1) % n;
        let e2 = n1 * inv_mod(n1 % r, r) % n;
        (ctx.pow(root, e1 as u64), ctx.pow(root, e2 as u64))
    } else {
        (ctx.pow(root, r as u64), ctx.pow(root, n1 as u64))
    };
    let input_index = |i1: usize, i2: usize| -> usize {
        if coprime {
            // CRT: ≡ i1 mod n1, ≡ i2 mod r
            (0..n).step_by(r).map(|base| base + i2).find(|&i| i % n1 == i1).unwrap()
        } else {
            r * i1 + i2
        }
    };

    let slots1 = slot_map(ctx, omega1, n1);
    let mut first = LocalTier { size: n1, twiddles: Vec::new(), modules: Vec::with_capacity(r) };
    for i2 in 0..r {
        first.modules.push(Module {
            inputs: slots1.iter().map(|&i1| input_index(i1, i2)).collect(),
            outputs: (0..n1).map(|j1| j1 * r + i2).collect(),
        });
    }

    let mut twiddles = Vec::new();
    if !coprime {
        for j1 in 0..n1 {
            for i2 in 0..r {
                let w = ctx.pow(root, (i2 * j1) as u64);
                if w != FieldElement::ONE {
                    twiddles.push((j1 * r + i2, w));
                }
            }
        }
        twiddles.sort_unstable_by_key(|&(wire, _)| wire);
    }

    let sub = build_local(ctx, omega2, &factors[1..], &forms[1..], cache)?;
    let mut tiers = vec![first];
    for (ti, st) in sub.tiers.into_iter().enumerate() {
        let mut tier = LocalTier { size: st.size, twiddles: Vec::new(), modules: Vec::new() };
        if ti == 0 {
            tier.twiddles = twiddles.clone();
        }
        for c in 0..n1 {
            let off = c * r;
            for &(w, v) in &st.twiddles {
                tier.twiddles.push((w + off, v));
            }
            for m in &st.modules {
                tier.modules.push(Module {
                    inputs: m.inputs.iter().map(|w| w + off).collect(),
                    outputs: m.outputs.iter().map(|w| w + off).collect(),
                });
            }
        }
        tier.twiddles.sort_unstable_by_key(|&(wire, _)| wire);
        tiers.push(tier);
    }
    let output_wires = (0..n)
        .map(|j| {
            let j1 = j % n1;
            let j2 = if coprime { j % r } else { j / n1 };
            j1 * r + sub.output_wires[j2]
        })
        .collect();
    Ok(LocalPlan { tiers, output_wires })
}

/// Evaluates the full plan module by module.
pub fn eval_plan(ctx: &FieldContext, plan: &TransformPlan, f: &[FieldElement]) -> Result<Vec<FieldElement>> {
    if f.len() != plan.n {
        return Err(Error::DimensionMismatch { expected: plan.n, got: f.len() });
    }
    let mut stage = f.to_vec();
    for tier in &plan.tiers {
        for &(w, c) in &tier.twiddles {
            stage[w] = ctx.mul(stage[w], c);
        }
        let mut next = vec![FieldElement::ZERO; plan.n];
        for module in &tier.modules {
            let local: Vec<FieldElement> = module.inputs.iter().map(|&w| stage[w]).collect();
            let out = tier.network.eval(ctx, &local)?;
            for (&w, v) in module.outputs.iter().zip(out) {
                next[w] = v;
            }
        }
        stage = next;
    }
    Ok(plan.output_wires.iter().map(|&w| stage[w]).collect())
}

/// Reference O(n²) DFT: F_j = Σ f_i γ^{ij}.
pub fn naive_dft(ctx: &FieldContext, gamma: FieldElement, f: &[FieldElement]) -> Vec<FieldElement> {
    (0..f.len())
        .map(|j| {
            let x = ctx.pow(gamma, j as u64);
            f.iter().rev().fold(FieldElement::ZERO, |acc, &c| ctx.mul(acc, x) + c)
        })
        .collect()
}

/// Which side of the transform is partial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scenario {
    /// Only some outputs are needed.
    FreqPartial,
    /// Some inputs are known to be zero.
    TimePartial,
    Both,
}

/// Recommended form per tier: symmetric forms prune well from the output side,
/// direct forms from the input side.
pub fn choose_forms(scenario: Scenario, tiers: usize) -> Vec<Form> {
    match scenario {
        Scenario::FreqPartial => vec![Form::Scfft; tiers],
        Scenario::TimePartial => vec![Form::Dcfft; tiers],
        Scenario::Both => (0..tiers).map(|t| if t == 0 { Form::Dcfft } else { Form::Scfft }).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn random_vec(rng: &mut impl Rng, ctx: &FieldContext, n: usize) -> Vec<FieldElement> {
        (0..n).map(|_| FieldElement(rng.gen_range(0..ctx.size()) as u16)).collect()
    }

    #[test]
    fn fifteen_as_three_by_five() {
        let ctx = FieldContext::new(4, 0x13).unwrap();
        let p = plan(&ctx, 15, &[3, 5], &[Form::Scfft, Form::Dcfft]).unwrap();
        assert_eq!(p.tiers.len(), 2);
        assert_eq!(p.tiers[0].modules.len(), 5);
        assert_eq!(p.tiers[0].size, 3);
        assert_eq!(p.tiers[1].modules.len(), 3);
        assert_eq!(p.tiers[1].size, 5);
        assert!(p.tiers.iter().all(|t| t.twiddles.is_empty()));
        assert_eq!(p.mappings, vec![Mapping::PrimeFactor]);
    }

    #[test]
    fn plans_match_naive_dft() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let cases: &[(u32, usize, &[usize])] = &[
            (4, 15, &[15]),
            (4, 15, &[3, 5]),
            (4, 15, &[5, 3]),
            (6, 9, &[3, 3]),
            (6, 63, &[7, 9]),
            (6, 63, &[3, 21]),
            (6, 63, &[3, 3, 7]),
            (6, 63, &[9, 7]),
            (6, 21, &[3, 7]),
            (8, 255, &[3, 5, 17]),
            (8, 255, &[15, 17]),
        ];
        for &(m, n, factors) in cases {
            let ctx = FieldContext::with_default_poly(m).unwrap();
            let g = ctx.element_of_order(n).unwrap();
            for form in [Form::Dcfft, Form::Scfft] {
                let p = plan(&ctx, n, factors, &vec![form; factors.len()]).unwrap();
                for _ in 0..10 {
                    let f = random_vec(&mut rng, &ctx, n);
                    assert_eq!(p.eval(&ctx, &f).unwrap(), naive_dft(&ctx, g, &f), "n={n} {factors:?} {form:?}");
                }
                let mut e0 = vec![FieldElement::ZERO; n];
                e0[0] = FieldElement::ONE;
                assert_eq!(p.eval(&ctx, &e0).unwrap(), vec![FieldElement::ONE; n]);
            }
        }
    }

    #[test]
    fn cooley_tukey_has_twiddles() {
        let ctx = FieldContext::with_default_poly(6).unwrap();
        let p = plan(&ctx, 9, &[3, 3], &[Form::Dcfft, Form::Dcfft]).unwrap();
        assert_eq!(p.mappings, vec![Mapping::CooleyTukey]);
        assert!(p.tiers[0].twiddles.is_empty());
        // i2·j1 ≠ 0 for i2, j1 ∈ {1, 2}
        assert_eq!(p.tiers[1].twiddles.len(), 4);
    }

    #[test]
    fn bad_factorizations() {
        let ctx = FieldContext::new(4, 0x13).unwrap();
        assert!(matches!(plan(&ctx, 15, &[3, 4], &[Form::Dcfft; 2]), Err(Error::BadFactorization { .. })));
        assert!(matches!(plan(&ctx, 15, &[1, 15], &[Form::Dcfft; 2]), Err(Error::BadFactorization { .. })));
        assert!(matches!(plan(&ctx, 15, &[15], &[Form::Dcfft; 2]), Err(Error::BadFactorization { .. })));
        assert!(matches!(plan(&ctx, 7, &[7], &[Form::Dcfft]), Err(Error::OrderUnavailable { .. })));
        let p = plan(&ctx, 15, &[15], &[Form::Dcfft]).unwrap();
        assert_eq!(p.eval(&ctx, &[FieldElement::ZERO; 4]), Err(Error::DimensionMismatch { expected: 15, got: 4 }));
    }

    #[test]
    fn form_recommendations() {
        assert_eq!(choose_forms(Scenario::Both, 2), vec![Form::Dcfft, Form::Scfft]);
        assert_eq!(choose_forms(Scenario::FreqPartial, 2)[1], Form::Scfft);
        assert_eq!(choose_forms(Scenario::TimePartial, 2)[0], Form::Dcfft);
    }
}
