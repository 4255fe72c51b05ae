//! JSON plan files. Binary matrices are stored as one hex string per row
//! (bit c of the row value is column c), field elements as hex integers.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::prune::{ModuleLive, PrunedPlan};
use super::{Mapping, Module, Tier, TransformPlan};
use crate::cfft::{BilinearNetwork, Form};
use crate::error::{Error, Result};
use crate::gf::{FieldContext, FieldElement};
use crate::gf2::BitMatrix;

pub const PLAN_FORMAT: &str = "ccft-plan/1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldFile {
    pub m: u32,
    pub prim_poly: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkFile {
    pub n_in: usize,
    pub n_out: usize,
    pub root: String,
    pub input_perm: Vec<usize>,
    pub pre: Vec<String>,
    pub constants: Vec<String>,
    pub post: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleFile {
    pub inputs: Vec<usize>,
    pub outputs: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TierFile {
    pub size: usize,
    pub form: Form,
    pub network: NetworkFile,
    /// (wire, constant) pairs.
    pub twiddles: Vec<(usize, String)>,
    pub modules: Vec<ModuleFile>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiveFile {
    pub inputs: String,
    pub products: String,
    pub outputs: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PruningFile {
    pub zero_inputs: Vec<usize>,
    pub wanted_outputs: Vec<usize>,
    /// Per tier: twiddle mask, then one entry per module.
    pub live_twiddles: Vec<String>,
    pub live: Vec<Vec<LiveFile>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanFile {
    pub format: String,
    pub field: FieldFile,
    pub n: usize,
    pub root: String,
    pub factors: Vec<usize>,
    pub mappings: Vec<Mapping>,
    pub tiers: Vec<TierFile>,
    pub output_wires: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pruning: Option<PruningFile>,
}

/// Result of reading a plan file.
#[derive(Clone, Debug)]
pub struct LoadedPlan {
    pub ctx: FieldContext,
    pub plan: TransformPlan,
    pub pruned: Option<PrunedPlan>,
}

fn hex(e: FieldElement) -> String {
    format!("{:x}", e.0)
}

fn bad(msg: impl Into<String>) -> Error {
    Error::PlanFormat(msg.into())
}

fn parse_hex_u32(s: &str) -> Result<u32> {
    u32::from_str_radix(s.trim_start_matches("0x"), 16).map_err(|e| bad(format!("{s:?}: {e}")))
}

fn parse_element(ctx: &FieldContext, s: &str) -> Result<FieldElement> {
    ctx.element(parse_hex_u32(s)?).map_err(|_| bad(format!("{s:?} is not a field element")))
}

fn matrix_to_hex(mat: &BitMatrix) -> Vec<String> {
    (0..mat.rows()).map(|r| mat.row_to_hex(r)).collect()
}

fn matrix_from_hex(rows: &[String], cols: usize) -> Result<BitMatrix> {
    let mut mat = BitMatrix::zeros(rows.len(), cols);
    for (r, s) in rows.iter().enumerate() {
        mat.set_row_from_hex(r, s).map_err(bad)?;
    }
    Ok(mat)
}

fn mask_to_hex(v: &[bool]) -> String {
    let mut mat = BitMatrix::zeros(1, v.len());
    for (i, &b) in v.iter().enumerate() {
        mat.set(0, i, b);
    }
    mat.row_to_hex(0)
}

fn mask_from_hex(s: &str, len: usize) -> Result<Vec<bool>> {
    let mat = matrix_from_hex(&[s.to_string()], len)?;
    Ok((0..len).map(|i| mat.get(0, i)).collect())
}

fn network_file(net: &BilinearNetwork) -> NetworkFile {
    NetworkFile {
        n_in: net.n_in,
        n_out: net.n_out,
        root: hex(net.root),
        input_perm: net.input_perm.clone(),
        pre: matrix_to_hex(&net.pre_matrix),
        constants: net.constants.iter().map(|&c| hex(c)).collect(),
        post: matrix_to_hex(&net.post_matrix),
    }
}

fn network_from_file(ctx: &FieldContext, nf: &NetworkFile, form: Form) -> Result<BilinearNetwork> {
    let m = nf.constants.len();
    if nf.pre.len() != m || nf.post.len() != nf.n_out || nf.input_perm.len() != nf.n_in {
        return Err(bad("network dimensions disagree"));
    }
    let mut perm = nf.input_perm.clone();
    perm.sort_unstable();
    if perm != (0..nf.n_in).collect::<Vec<_>>() {
        return Err(bad("input_perm is not a permutation"));
    }
    let constants = nf.constants.iter().map(|s| parse_element(ctx, s)).collect::<Result<Vec<_>>>()?;
    if constants.iter().any(|c| c.is_zero()) {
        return Err(bad("zero network constant"));
    }
    Ok(BilinearNetwork {
        n_in: nf.n_in,
        n_out: nf.n_out,
        root: parse_element(ctx, &nf.root)?,
        form,
        post_matrix: matrix_from_hex(&nf.post, m)?,
        constants,
        pre_matrix: matrix_from_hex(&nf.pre, nf.n_in)?,
        input_perm: nf.input_perm.clone(),
    })
}

impl PlanFile {
    pub fn new(plan: &TransformPlan, pruned: Option<&PrunedPlan>) -> PlanFile {
        let tiers = plan
            .tiers
            .iter()
            .map(|t| TierFile {
                size: t.size,
                form: t.form,
                network: network_file(&t.network),
                twiddles: t.twiddles.iter().map(|&(w, c)| (w, hex(c))).collect(),
                modules: t.modules.iter().map(|m| ModuleFile { inputs: m.inputs.clone(), outputs: m.outputs.clone() }).collect(),
            })
            .collect();
        let pruning = pruned.map(|p| PruningFile {
            zero_inputs: p.zero_inputs.clone(),
            wanted_outputs: p.wanted_outputs.clone(),
            live_twiddles: p.live_twiddles.iter().map(|v| mask_to_hex(v)).collect(),
            live: p
                .live
                .iter()
                .map(|tier| {
                    tier.iter()
                        .map(|ml| LiveFile {
                            inputs: mask_to_hex(&ml.inputs),
                            products: mask_to_hex(&ml.products),
                            outputs: mask_to_hex(&ml.outputs),
                        })
                        .collect()
                })
                .collect(),
        });
        PlanFile {
            format: PLAN_FORMAT.to_string(),
            field: FieldFile { m: plan.m, prim_poly: format!("0x{:x}", plan.prim_poly) },
            n: plan.n,
            root: hex(plan.root),
            factors: plan.factors.clone(),
            mappings: plan.mappings.clone(),
            tiers,
            output_wires: plan.output_wires.clone(),
            pruning,
        }
    }

    pub fn into_plan(self) -> Result<LoadedPlan> {
        if self.format != PLAN_FORMAT {
            return Err(bad(format!("unknown format {:?}", self.format)));
        }
        let ctx = FieldContext::new(self.field.m, parse_hex_u32(&self.field.prim_poly)?)?;
        let n = self.n;
        if self.output_wires.len() != n || self.output_wires.iter().any(|&w| w >= n) {
            return Err(bad("output_wires malformed"));
        }
        if self.factors.iter().product::<usize>() != n || self.factors.len() != self.tiers.len() {
            return Err(bad("factors disagree with n or tier count"));
        }
        let mut networks: Vec<(Arc<BilinearNetwork>, Arc<BitMatrix>)> = Vec::new();
        let mut tiers = Vec::with_capacity(self.tiers.len());
        for tf in &self.tiers {
            let net = network_from_file(&ctx, &tf.network, tf.form)?;
            if net.n_in != tf.size || net.n_out != tf.size {
                return Err(bad("network size disagrees with tier size"));
            }
            let shared = match networks.iter().find(|(a, _)| **a == net) {
                Some(e) => e.clone(),
                None => {
                    let pre = net.natural_pre();
                    let e = (Arc::new(net), Arc::new(pre));
                    networks.push(e.clone());
                    e
                }
            };
            let twiddles = tf
                .twiddles
                .iter()
                .map(|(w, c)| {
                    if *w >= n {
                        return Err(bad("twiddle wire out of range"));
                    }
                    Ok((*w, parse_element(&ctx, c)?))
                })
                .collect::<Result<Vec<_>>>()?;
            let mut modules = Vec::with_capacity(tf.modules.len());
            for mf in &tf.modules {
                if mf.inputs.len() != tf.size
                    || mf.outputs.len() != tf.size
                    || mf.inputs.iter().chain(&mf.outputs).any(|&w| w >= n)
                {
                    return Err(bad("module wiring malformed"));
                }
                modules.push(Module { inputs: mf.inputs.clone(), outputs: mf.outputs.clone() });
            }
            tiers.push(Tier {
                size: tf.size,
                form: tf.form,
                network: shared.0,
                natural_pre: shared.1,
                twiddles,
                modules,
            });
        }
        let plan = TransformPlan {
            m: ctx.m(),
            prim_poly: ctx.prim_poly(),
            n,
            root: parse_element(&ctx, &self.root)?,
            factors: self.factors,
            mappings: self.mappings,
            tiers,
            output_wires: self.output_wires,
        };
        let pruned = match self.pruning {
            None => None,
            Some(pf) => {
                if pf.live.len() != plan.tiers.len() || pf.live_twiddles.len() != plan.tiers.len() {
                    return Err(bad("pruning masks disagree with tier count"));
                }
                if pf.zero_inputs.iter().chain(&pf.wanted_outputs).any(|&i| i >= n) {
                    return Err(bad("pruning index out of range"));
                }
                let mut live = Vec::with_capacity(plan.tiers.len());
                let mut live_tw = Vec::with_capacity(plan.tiers.len());
                for (t, tier) in plan.tiers.iter().enumerate() {
                    if pf.live[t].len() != tier.modules.len() {
                        return Err(bad("pruning masks disagree with module count"));
                    }
                    live_tw.push(mask_from_hex(&pf.live_twiddles[t], tier.twiddles.len())?);
                    live.push(
                        pf.live[t]
                            .iter()
                            .map(|lf| {
                                Ok(ModuleLive {
                                    inputs: mask_from_hex(&lf.inputs, tier.size)?,
                                    products: mask_from_hex(&lf.products, tier.network.products())?,
                                    outputs: mask_from_hex(&lf.outputs, tier.size)?,
                                })
                            })
                            .collect::<Result<Vec<_>>>()?,
                    );
                }
                Some(PrunedPlan::from_parts(&ctx, plan.clone(), pf.zero_inputs, pf.wanted_outputs, live, live_tw))
            }
        };
        Ok(LoadedPlan { ctx, plan, pruned })
    }
}

/// Serializes a plan, with pruning masks when `pruned` is given.
pub fn save_plan(plan: &TransformPlan, pruned: Option<&PrunedPlan>) -> String {
    serde_json::to_string_pretty(&PlanFile::new(plan, pruned)).expect("plan serializes")
}

pub fn load_plan(text: &str) -> Result<LoadedPlan> {
    let file: PlanFile = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    file.into_plan()
}

#[cfg(test)]
mod tests {
    use super::super::{plan, prune};
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn round_trip_is_exact() {
        let ctx = FieldContext::with_default_poly(6).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for factors in [vec![63], vec![7, 9], vec![3, 3, 7]] {
            let forms: Vec<Form> = (0..factors.len()).map(|i| if i == 0 { Form::Dcfft } else { Form::Scfft }).collect();
            let p = plan(&ctx, 63, &factors, &forms).unwrap();
            let zeros: Vec<usize> = (40..63).collect();
            let pr = prune(&ctx, &p, &zeros, &[1, 2, 3, 4, 5, 6]).unwrap();
            let text = save_plan(&p, Some(&pr));
            let loaded = load_plan(&text).unwrap();
            assert_eq!(save_plan(&loaded.plan, loaded.pruned.as_ref()), text);
            let lp = loaded.pruned.unwrap();
            assert_eq!((lp.mult_count(), lp.add_count()), (pr.mult_count(), pr.add_count()));
            for _ in 0..10 {
                let mut f: Vec<FieldElement> = (0..63).map(|_| FieldElement(rng.gen_range(0..64))).collect();
                assert_eq!(loaded.plan.eval(&ctx, &f).unwrap(), p.eval(&ctx, &f).unwrap());
                for &z in &zeros {
                    f[z] = FieldElement::ZERO;
                }
                assert_eq!(lp.eval(&ctx, &f).unwrap(), pr.eval(&ctx, &f).unwrap());
            }
        }
    }

    #[test]
    fn rejects_garbage() {
        assert!(matches!(load_plan("{}"), Err(Error::PlanFormat(_))));
        let ctx = FieldContext::new(4, 0x13).unwrap();
        let p = plan(&ctx, 15, &[15], &[Form::Dcfft]).unwrap();
        let mut file = PlanFile::new(&p, None);
        file.tiers[0].modules[0].inputs[0] = 99;
        assert!(matches!(file.into_plan(), Err(Error::PlanFormat(_))));
        let mut file = PlanFile::new(&p, None);
        file.format = "other".into();
        assert!(file.into_plan().is_err());
    }
}
