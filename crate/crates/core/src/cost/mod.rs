//! Operation counts, baselines, factorization search and comparison reports.

mod cse;

use rayon::prelude::*;
use serde::Serialize;

use crate::cfft::{BilinearNetwork, Form};
use crate::error::Result;
use crate::gf::FieldContext;
use crate::planner::{plan_with_cache, prune, NetworkCache, PrunedPlan, TransformPlan};
use crate::rs::{Poly, RSCodeSpec};

pub use cse::{cse, SharedSumNetwork, XorProgram};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CostReport {
    pub mult: usize,
    pub add: usize,
    pub div: usize,
    /// (2m − 1)·mult + add.
    pub weighted_total: usize,
}

impl CostReport {
    pub fn new(m: u32, mult: usize, add: usize, div: usize) -> CostReport {
        CostReport { mult, add, div, weighted_total: weighted_total(m, mult, add) }
    }

    /// Component-wise sum; both reports must come from the same field.
    pub fn plus(self, m: u32, other: CostReport) -> CostReport {
        CostReport::new(m, self.mult + other.mult, self.add + other.add, self.div + other.div)
    }
}

pub fn weighted_total(m: u32, mult: usize, add: usize) -> usize {
    (2 * m as usize - 1) * mult + add
}

pub fn count_network(net: &BilinearNetwork, m: u32) -> CostReport {
    CostReport::new(m, net.mult_count(), net.add_count(), 0)
}

/// Full, unpruned plan: every module plus the twiddles.
pub fn count_plan(plan: &TransformPlan) -> CostReport {
    let mult = plan.tiers.iter().map(|t| t.network.mult_count() * t.modules.len() + t.twiddles.len()).sum();
    let add = plan.tiers.iter().map(|t| t.network.add_count() * t.modules.len()).sum();
    CostReport::new(plan.m, mult, add, 0)
}

pub fn count_pruned(pruned: &PrunedPlan) -> CostReport {
    CostReport::new(pruned.base.m, pruned.mult_count(), pruned.add_count(), 0)
}

/// Steps of the decoder that have baselines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Step {
    Syndrome,
    ChienForney,
}

impl std::str::FromStr for Step {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "syndrome" => Ok(Step::Syndrome),
            "chien-forney" | "chien" => Ok(Step::ChienForney),
            other => Err(format!("unknown step {other:?} (expected syndrome or chien-forney)")),
        }
    }
}

impl Step {
    pub fn name(self) -> &'static str {
        match self {
            Step::Syndrome => "syndrome",
            Step::ChienForney => "chien-forney",
        }
    }

    pub fn polys(self) -> &'static [Poly] {
        match self {
            Step::Syndrome => &[Poly::Syndrome],
            Step::ChienForney => &Poly::CHIEN_FORNEY,
        }
    }
}

/// Horner's rule for one polynomial step. Multiplications by α^0 are free.
pub fn horner_poly(spec: &RSCodeSpec, poly: Poly) -> CostReport {
    let (t, two_t, n1) = (spec.t, spec.two_t(), spec.n_short);
    let (mult, add) = match poly {
        Poly::Syndrome => {
            let nontrivial = (0..two_t).filter(|j| (spec.b + j) % spec.n != 0).count();
            (nontrivial * (n1 - 1), two_t * (n1 - 1))
        }
        Poly::Omega => (two_t * two_t.saturating_sub(1), two_t * two_t.saturating_sub(1)),
        Poly::LambdaEven => (t * (n1 - 1), t * n1),
        Poly::LambdaOdd => (t * (n1 - 1), t.saturating_sub(1) * n1),
    };
    CostReport::new(spec.m(), mult, add, 0)
}

/// The Λe + Λo combine and the magnitude divisions.
pub fn misc_cost(spec: &RSCodeSpec) -> CostReport {
    if spec.t == 0 {
        return CostReport::default();
    }
    CostReport::new(spec.m(), 0, spec.n_short, spec.two_t())
}

pub fn horner_baseline(spec: &RSCodeSpec, step: Step) -> CostReport {
    let m = spec.m();
    let base = step.polys().iter().fold(CostReport::default(), |acc, &p| acc.plus(m, horner_poly(spec, p)));
    match step {
        Step::Syndrome => base,
        Step::ChienForney => base.plus(m, misc_cost(spec)),
    }
}

/// Limits of the factorization search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    pub min_tiers: usize,
    pub max_tiers: usize,
    /// Search only this factorization (forms are still searched).
    pub factors: Option<Vec<usize>>,
    /// Restrict every tier to this form.
    pub form: Option<Form>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { min_tiers: 1, max_tiers: 2, factors: None, form: None }
    }
}

impl SearchOptions {
    pub fn multi_tier(max_tiers: usize) -> Self {
        SearchOptions { min_tiers: 2, max_tiers, ..Default::default() }
    }

    pub fn single_tier() -> Self {
        SearchOptions { min_tiers: 1, max_tiers: 1, ..Default::default() }
    }

    pub fn fixed(factors: Vec<usize>) -> Self {
        SearchOptions { factors: Some(factors), ..Default::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Candidate {
    pub factors: Vec<usize>,
    pub forms: Vec<Form>,
    pub report: CostReport,
}

impl Candidate {
    pub fn shape(&self) -> String {
        self.factors.iter().map(|f| f.to_string()).collect::<Vec<_>>().join("x")
    }
}

/// Ordered factorizations of n into 1..=max_parts factors, each > 1.
pub fn ordered_factorizations(n: usize, max_parts: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if max_parts == 0 {
        return out;
    }
    if n == 1 {
        out.push(vec![1]);
        return out;
    }
    out.push(vec![n]);
    if max_parts == 1 {
        return out;
    }
    for d in (2..n).filter(|d| n % d == 0) {
        for rest in ordered_factorizations(n / d, max_parts - 1) {
            let mut f = vec![d];
            f.extend(rest);
            out.push(f);
        }
    }
    out
}

fn form_choices(tiers: usize, fixed: Option<Form>) -> Vec<Vec<Form>> {
    if let Some(f) = fixed {
        return vec![vec![f; tiers]];
    }
    (0..1usize << tiers)
        .map(|mask| (0..tiers).map(|t| if mask >> t & 1 == 0 { Form::Dcfft } else { Form::Scfft }).collect())
        .collect()
}

/// Every candidate within `opts`, cheapest first. Ties prefer fewer tiers,
/// then smaller leading factors, then direct forms.
pub fn search(ctx: &FieldContext, n: usize, zero: &[usize], wanted: &[usize], opts: &SearchOptions) -> Result<Vec<Candidate>> {
    let shapes: Vec<Vec<usize>> = match &opts.factors {
        Some(f) => vec![f.clone()],
        None => ordered_factorizations(n, opts.max_tiers)
            .into_iter()
            .filter(|f| f.len() >= opts.min_tiers)
            .collect(),
    };
    let combos: Vec<(Vec<usize>, Vec<Form>)> = shapes
        .iter()
        .flat_map(|f| form_choices(f.len(), opts.form).into_iter().map(move |forms| (f.clone(), forms)))
        .collect();
    let mut keys: Vec<(usize, Form)> =
        combos.iter().flat_map(|(f, forms)| f.iter().copied().zip(forms.iter().copied())).collect();
    keys.sort_unstable();
    keys.dedup();
    let mut cache = NetworkCache::new();
    cache.prefill(ctx, &keys)?;
    let mut cands = combos
        .into_par_iter()
        .map(|(factors, forms)| {
            let mut local = cache.clone();
            let plan = plan_with_cache(ctx, n, &factors, &forms, &mut local)?;
            let pruned = prune(ctx, &plan, zero, wanted)?;
            Ok(Candidate { factors, forms, report: count_pruned(&pruned) })
        })
        .collect::<Result<Vec<_>>>()?;
    cands.sort_by(|a, b| {
        (a.report.weighted_total, a.factors.len(), &a.factors, &a.forms).cmp(&(
            b.report.weighted_total,
            b.factors.len(),
            &b.factors,
            &b.forms,
        ))
    });
    Ok(cands)
}

/// The cheapest candidate and its pruned plan.
pub fn best_plan(
    ctx: &FieldContext,
    n: usize,
    zero: &[usize],
    wanted: &[usize],
    opts: &SearchOptions,
) -> Result<(PrunedPlan, Candidate)> {
    let cands = search(ctx, n, zero, wanted, opts)?;
    let best = cands.into_iter().next().ok_or_else(|| crate::Error::BadFactorization {
        n,
        factors: opts.factors.clone().unwrap_or_default(),
    })?;
    let plan = crate::planner::plan(ctx, n, &best.factors, &best.forms)?;
    Ok((prune(ctx, &plan, zero, wanted)?, best))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReportRow {
    pub code: String,
    pub step: Step,
    pub method: String,
    pub factorization: String,
    pub mult: usize,
    pub add: usize,
    pub div: usize,
    pub total: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub rows: Vec<ReportRow>,
}

/// Comparison rows per code: best multi-tier partial transform, best
/// single-tier partial transform, Horner's rule.
pub fn report_table(specs: &[RSCodeSpec], step: Step, max_tiers: usize) -> Result<Report> {
    let mut report = Report::default();
    for spec in specs {
        let m = spec.m();
        let methods: [(&str, Option<SearchOptions>); 3] = [
            ("partial-ccft", Some(SearchOptions::multi_tier(max_tiers.max(2)))),
            ("partial-cfft", Some(SearchOptions::single_tier())),
            ("horner", None),
        ];
        for (name, opts) in methods {
            let mut total = CostReport::default();
            let mut shapes = Vec::new();
            for &poly in step.polys() {
                let part = match &opts {
                    None => horner_poly(spec, poly),
                    Some(o) => {
                        let (zero, wanted) = spec.transform_sets(poly);
                        match search(&spec.field, spec.n, &zero, &wanted, o)?.into_iter().next() {
                            Some(c) => {
                                shapes.push(format!("{}:{}", c.shape(), c.forms.iter().map(|f| f.name()).collect::<Vec<_>>().join("+")));
                                c.report
                            }
                            // no composite factorization exists
                            None => continue,
                        }
                    }
                };
                total = total.plus(m, part);
            }
            if opts.is_some() && shapes.len() != step.polys().len() {
                continue;
            }
            if step == Step::ChienForney {
                total = total.plus(m, misc_cost(spec));
            }
            report.rows.push(ReportRow {
                code: spec.label(),
                step,
                method: name.to_string(),
                factorization: if shapes.is_empty() { "-".into() } else { shapes.join(",") },
                mult: total.mult,
                add: total.add,
                div: total.div,
                total: total.weighted_total,
            });
        }
    }
    Ok(report)
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.rows).expect("report serializes")
    }

    pub fn render_text(&self) -> String {
        let header = ["code", "step", "method", "factorization", "mult", "add", "div", "total"];
        let cells: Vec<[String; 8]> = self
            .rows
            .iter()
            .map(|r| {
                [
                    r.code.clone(),
                    r.step.name().to_string(),
                    r.method.clone(),
                    r.factorization.clone(),
                    r.mult.to_string(),
                    r.add.to_string(),
                    r.div.to_string(),
                    r.total.to_string(),
                ]
            })
            .collect();
        let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
        for row in &cells {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |row: &[String]| {
            row.iter()
                .enumerate()
                .map(|(i, c)| if i >= 4 { format!("{c:>w$}", w = widths[i]) } else { format!("{c:<w$}", w = widths[i]) })
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
        };
        let mut out = line(&header.map(String::from)) + "\n";
        for row in &cells {
            out += &line(row);
            out.push('\n');
        }
        out
    }
}
