use std::path::PathBuf;

use anyhow::{Context, Result};
use ccft_core::cfft::Form;
use ccft_core::cost::{self, count_pruned, report_table, SearchOptions, Step};
use ccft_core::planner::{plan, prune, save_plan};
use ccft_core::rs::Poly;
use clap::Args;

use crate::common::{build_spec, parse_factors, parse_indices, usage, CodeArg, CodeArgs, FieldArgs, IndexList};
use crate::Status;

#[derive(Args, Debug)]
pub struct PlanArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[command(flatten)]
    code: CodeArgs,
    /// Decoder step whose transform is planned (with --code).
    #[arg(long, default_value = "syndrome")]
    step: Poly,
    /// Inputs known to be zero, e.g. `10..15` (without --code).
    #[arg(long, value_parser = parse_indices)]
    zero: Option<IndexList>,
    /// Outputs to compute, e.g. `0..4` (without --code; default all).
    #[arg(long, value_parser = parse_indices)]
    wanted: Option<IndexList>,
    /// Force a factorization such as `63x65`; otherwise search.
    #[arg(long, value_parser = parse_factors)]
    factors: Option<IndexList>,
    /// Force the per-tier forms, e.g. `dcfft,scfft`.
    #[arg(long, value_delimiter = ',')]
    forms: Option<Vec<Form>>,
    /// Largest number of tiers considered by the search.
    #[arg(long, default_value_t = 2)]
    max_tiers: usize,
    /// Number of candidates listed.
    #[arg(long, default_value_t = 5)]
    top: usize,
    /// Write the plan file here.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run_plan(a: PlanArgs) -> Result<Status> {
    let (ctx, n, zero, wanted) = match a.code.code {
        Some(code) => {
            if a.zero.is_some() || a.wanted.is_some() {
                return Err(usage("--zero/--wanted cannot be combined with --code"));
            }
            let spec = build_spec(&a.field, code, a.code.n, a.code.b)?;
            let (zero, wanted) = spec.transform_sets(a.step);
            println!("code {} t={} step {}", spec.label(), spec.t, a.step.name());
            (spec.field, spec.n, zero, wanted)
        }
        None => {
            let ctx = a.field.context(None)?;
            let n = a.code.n.unwrap_or(ctx.group_order());
            let wanted = a.wanted.clone().unwrap_or_else(|| (0..n).collect());
            (ctx, n, a.zero.clone().unwrap_or_default(), wanted)
        }
    };
    if let Some(&bad) = zero.iter().chain(&wanted).find(|&&i| i >= n) {
        return Err(usage(format!("index {bad} out of range for length {n}")));
    }
    println!(
        "transform n={n} over GF(2^{}) poly {:#x}; {} zero inputs, {} wanted outputs",
        ctx.m(),
        ctx.prim_poly(),
        zero.len(),
        wanted.len()
    );

    let (factors, forms) = match (&a.factors, &a.forms) {
        (Some(f), Some(forms)) => {
            if forms.len() != f.len() {
                return Err(usage(format!("{} forms given for {} factors", forms.len(), f.len())));
            }
            (f.clone(), forms.clone())
        }
        _ => {
            let mut opts = SearchOptions { max_tiers: a.max_tiers.max(1), ..Default::default() };
            opts.factors = a.factors.clone();
            if let Some(forms) = &a.forms {
                // one form for all tiers of every candidate
                match forms.as_slice() {
                    [f] => opts.form = Some(*f),
                    _ => return Err(usage("--forms with several entries needs --factors")),
                }
            }
            let cands = cost::search(&ctx, n, &zero, &wanted, &opts).map_err(|e| usage(e.to_string()))?;
            println!("candidates (best {} of {}):", a.top.min(cands.len()), cands.len());
            for c in cands.iter().take(a.top) {
                let r = c.report;
                println!(
                    "  {:<12} {:<20} mult {:>8} add {:>9} total {:>10}",
                    c.shape(),
                    forms_label(&c.forms),
                    r.mult,
                    r.add,
                    r.weighted_total
                );
            }
            let best = cands.into_iter().next().ok_or_else(|| usage("no candidate factorization"))?;
            (best.factors, best.forms)
        }
    };
    let p = plan(&ctx, n, &factors, &forms).map_err(|e| usage(e.to_string()))?;
    let pruned = prune(&ctx, &p, &zero, &wanted)?;
    let r = count_pruned(&pruned);
    println!("chosen {} ({})", p.shape(), forms_label(&forms));
    println!("cost mult={} add={} div={} total={}", r.mult, r.add, r.div, r.weighted_total);
    if let Some(out) = &a.out {
        std::fs::write(out, save_plan(&p, Some(&pruned))).with_context(|| format!("writing {}", out.display()))?;
        println!("wrote {}", out.display());
    }
    Ok(Status::Ok)
}

fn forms_label(forms: &[Form]) -> String {
    forms.iter().map(|f| f.name()).collect::<Vec<_>>().join("+")
}

#[derive(Args, Debug)]
pub struct CostArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Codes to compare, N',K' or M:N',K' (repeatable).
    #[arg(long = "code", required = true)]
    codes: Vec<CodeArg>,
    #[arg(long, default_value_t = 0)]
    b: usize,
    /// syndrome or chien-forney.
    #[arg(long, default_value = "syndrome")]
    step: Step,
    #[arg(long, default_value_t = 2)]
    max_tiers: usize,
    /// Print JSON instead of the aligned table.
    #[arg(long)]
    json: bool,
    /// Also write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run_cost(a: CostArgs) -> Result<Status> {
    let specs = a.codes.iter().map(|&c| build_spec(&a.field, c, None, a.b)).collect::<Result<Vec<_>>>()?;
    let report = report_table(&specs, a.step, a.max_tiers)?;
    if a.json {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.render_text());
    }
    if let Some(out) = &a.out {
        std::fs::write(out, report.to_json() + "\n").with_context(|| format!("writing {}", out.display()))?;
    }
    Ok(Status::Ok)
}
