use anyhow::Result;
use ccft_core::cfft::{build_network, Form};
use ccft_core::cost::{cse, ordered_factorizations, SearchOptions};
use ccft_core::planner::{naive_dft, plan, prune, TransformPlan};
use ccft_core::rs::{encode, DecodeStatus, Decoder, RSCodeSpec};
use ccft_core::{FieldContext, FieldElement};
use clap::{Args, ValueEnum};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::common::{build_spec, degree_for_length, usage, CodeArg, FieldArgs};
use crate::Status;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Dft,
    Prune,
    Cse,
    Decode,
    All,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    suite: Suite,
    #[command(flatten)]
    field: FieldArgs,
    /// Transform length for the dft/prune/cse suites (default 15 and 63).
    #[arg(long)]
    n: Option<usize>,
    /// Code for the decode suite (default 15,11).
    #[arg(long)]
    code: Option<CodeArg>,
    #[arg(long, default_value_t = 0)]
    b: usize,
    /// Also decode every single-error pattern.
    #[arg(long)]
    exhaustive_single: bool,
    /// Random trials per case.
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

type Check = std::result::Result<String, String>;

fn random_vec(rng: &mut impl Rng, ctx: &FieldContext, n: usize) -> Vec<FieldElement> {
    (0..n).map(|_| FieldElement(rng.gen_range(0..ctx.size()) as u16)).collect()
}

fn lengths(a: &VerifyArgs) -> Result<Vec<(FieldContext, usize)>> {
    let ns = a.n.map_or(vec![15, 63], |n| vec![n]);
    ns.into_iter()
        .map(|n| {
            let m = match a.field.m {
                Some(m) => m,
                None => degree_for_length(n).ok_or_else(|| usage(format!("no field GF(2^m), m ≤ 16, has length {n}")))?,
            };
            let ctx = a.field.context(Some(m))?;
            if ctx.group_order() % n != 0 {
                return Err(usage(format!("{n} does not divide 2^{m} − 1")));
            }
            Ok((ctx, n))
        })
        .collect()
}

fn plans_for(ctx: &FieldContext, n: usize) -> Vec<TransformPlan> {
    ordered_factorizations(n, 3)
        .into_iter()
        .flat_map(|f| {
            [Form::Dcfft, Form::Scfft].into_iter().map(move |form| (f.clone(), form))
        })
        .map(|(f, form)| plan(ctx, n, &f, &vec![form; f.len()]).unwrap())
        .collect()
}

fn suite_dft(ctx: &FieldContext, n: usize, trials: usize, rng: &mut ChaCha8Rng) -> Check {
    let gamma = ctx.element_of_order(n).unwrap();
    let plans = plans_for(ctx, n);
    for p in &plans {
        for t in 0..trials {
            let f = random_vec(rng, ctx, n);
            if p.eval(ctx, &f).unwrap() != naive_dft(ctx, gamma, &f) {
                return Err(format!("n={n} {} {:?}: vector {t} {f:?}", p.shape(), p.forms()));
            }
        }
    }
    Ok(format!("dft n={n}: {} plans x {trials} vectors match the naive DFT", plans.len()))
}

fn suite_prune(ctx: &FieldContext, n: usize, trials: usize, rng: &mut ChaCha8Rng) -> Check {
    let plans = plans_for(ctx, n);
    let subset = |rng: &mut ChaCha8Rng| {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(rng);
        idx.truncate(rng.gen_range(0..=n));
        idx
    };
    for p in &plans {
        for _ in 0..trials {
            let zero = subset(rng);
            let wanted = subset(rng);
            let pruned = prune(ctx, p, &zero, &wanted).unwrap();
            let mut f = random_vec(rng, ctx, n);
            for &z in &zero {
                f[z] = FieldElement::ZERO;
            }
            let full = p.eval(ctx, &f).unwrap();
            let want: Vec<_> = pruned.wanted_outputs.iter().map(|&j| (j, full[j])).collect();
            if pruned.eval(ctx, &f).unwrap() != want {
                return Err(format!("n={n} {} zero={zero:?} wanted={wanted:?}", p.shape()));
            }
        }
    }
    Ok(format!("prune n={n}: {} plans x {trials} random zero/wanted sets sound", plans.len()))
}

fn suite_cse(ctx: &FieldContext, n: usize, trials: usize, rng: &mut ChaCha8Rng) -> Check {
    let mut sizes: Vec<usize> = ordered_factorizations(n, 3).into_iter().flatten().collect();
    sizes.sort_unstable();
    sizes.dedup();
    let (mut before, mut after) = (0, 0);
    for &s in &sizes {
        for form in [Form::Dcfft, Form::Scfft] {
            let net = build_network(ctx, s, ctx.element_of_order(s).unwrap(), form).unwrap();
            let shared = cse(&net);
            if shared.add_count() > net.add_count() {
                return Err(format!("cse n={s} {form:?}: additions grew"));
            }
            for t in 0..trials {
                let f = random_vec(rng, ctx, s);
                if shared.eval(ctx, &f).unwrap() != net.eval(ctx, &f).unwrap() {
                    return Err(format!("cse n={s} {form:?}: vector {t} {f:?}"));
                }
            }
            before += net.add_count();
            after += shared.add_count();
        }
    }
    Ok(format!("cse n={n}: {} networks preserved, additions {before} -> {after}", 2 * sizes.len()))
}

fn suite_decode(spec: &RSCodeSpec, trials: usize, exhaustive: bool, rng: &mut ChaCha8Rng) -> Check {
    let decoders = [
        ("horner", Decoder::horner(spec.clone())),
        ("plan", Decoder::with_plans(spec.clone(), &SearchOptions::default()).map_err(|e| e.to_string())?),
    ];
    let q = spec.field.size();
    let mut count = 0;
    let mut check = |name: &str, d: &Decoder, c: &[FieldElement], r: &[FieldElement], er: &[usize]| -> std::result::Result<(), String> {
        let res = d.decode(r, er).map_err(|e| e.to_string())?;
        count += 1;
        if res.status != DecodeStatus::Corrected || res.codeword != c {
            return Err(format!("{name} {}: received {r:?} erasures {er:?}", spec.label()));
        }
        if res.stats.divisions > spec.two_t() || (res.stats.combine_adds != spec.n_short && res.stats.combine_adds != 0) {
            return Err(format!("{name} {}: counters {:?}", spec.label(), res.stats));
        }
        Ok(())
    };
    for (name, d) in &decoders {
        if exhaustive {
            let c = encode(spec, &random_vec(rng, &spec.field, spec.k_short)).unwrap();
            for p in 0..spec.n_short {
                for v in 1..q {
                    let mut r = c.clone();
                    r[p] += FieldElement(v as u16);
                    check(name, d, &c, &r, &[])?;
                }
            }
        }
        for _ in 0..trials {
            let c = encode(spec, &random_vec(rng, &spec.field, spec.k_short)).unwrap();
            let rho = rng.gen_range(0..=spec.two_t());
            let nu = rng.gen_range(0..=(spec.two_t() - rho) / 2);
            let mut pos: Vec<usize> = (0..spec.n_short).collect();
            pos.shuffle(rng);
            let mut r = c.clone();
            for &p in &pos[..nu + rho] {
                r[p] += FieldElement(rng.gen_range(1..q) as u16);
            }
            check(name, d, &c, &r, &pos[nu..nu + rho])?;
        }
    }
    Ok(format!("decode {}: {count} decodes recovered the codeword (both backends)", spec.label()))
}

pub fn run(a: VerifyArgs) -> Result<Status> {
    println!("seed {}", a.seed);
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut checks: Vec<Check> = Vec::new();
    let wants = |s: Suite| a.suite == s || a.suite == Suite::All;
    if wants(Suite::Dft) || wants(Suite::Prune) || wants(Suite::Cse) {
        for (ctx, n) in lengths(&a)? {
            if wants(Suite::Dft) {
                checks.push(suite_dft(&ctx, n, a.trials, &mut rng));
            }
            if wants(Suite::Prune) {
                checks.push(suite_prune(&ctx, n, a.trials, &mut rng));
            }
            if wants(Suite::Cse) {
                checks.push(suite_cse(&ctx, n, a.trials, &mut rng));
            }
        }
    }
    if wants(Suite::Decode) {
        let code = a.code.unwrap_or(CodeArg { m: None, n: 15, k: 11 });
        let mut field = a.field.clone();
        if field.m.is_none() && code.m.is_none() {
            field.m = (2..=16u32).find(|&m| (1usize << m) > code.n);
        }
        let spec = build_spec(&field, code, None, a.b)?;
        checks.push(suite_decode(&spec, a.trials, a.exhaustive_single, &mut rng));
    }
    let mut ok = true;
    for c in checks {
        match c {
            Ok(line) => println!("pass  {line}"),
            Err(line) => {
                println!("FAIL  {line}");
                ok = false;
                break;
            }
        }
    }
    println!("{}", if ok { "all suites passed" } else { "verification failed" });
    Ok(if ok { Status::Ok } else { Status::Failed })
}
