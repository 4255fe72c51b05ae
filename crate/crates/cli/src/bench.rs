use std::time::Instant;

use anyhow::Result;
use ccft_core::cost::SearchOptions;
use ccft_core::rs::{encode, Decoder};
use ccft_core::FieldElement;
use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::common::{build_spec, usage, CodeArgs, FieldArgs};
use crate::Status;

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[command(flatten)]
    code: CodeArgs,
    /// Received words per measurement.
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2)]
    max_tiers: usize,
}

fn rate(count: usize, f: impl FnMut()) -> f64 {
    let mut f = f;
    let start = Instant::now();
    for _ in 0..count {
        f();
    }
    count as f64 / start.elapsed().as_secs_f64().max(1e-9)
}

pub fn run(a: BenchArgs) -> Result<Status> {
    let code = a.code.code.ok_or_else(|| usage("--code is required"))?;
    let spec = build_spec(&a.field, code, a.code.n, a.code.b)?;
    println!("code {} t={} seed {} trials {}", spec.label(), spec.t, a.seed, a.trials);
    println!("{:<10} {:<8} {:>14}", "step", "backend", "vectors/s");
    if a.trials == 0 {
        return Ok(Status::Ok);
    }

    let horner = Decoder::horner(spec.clone());
    let planned = Decoder::with_plans(spec.clone(), &SearchOptions { max_tiers: a.max_tiers.max(1), ..Default::default() })?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let q = spec.field.size();
    let words: Vec<Vec<FieldElement>> = (0..a.trials)
        .map(|_| {
            let msg: Vec<_> = (0..spec.k_short).map(|_| FieldElement(rng.gen_range(0..q) as u16)).collect();
            let mut w = encode(&spec, &msg).expect("message length");
            for _ in 0..rng.gen_range(0..=spec.t) {
                let p = rng.gen_range(0..spec.n_short);
                w[p] += FieldElement(rng.gen_range(1..q) as u16);
            }
            w
        })
        .collect();

    for w in &words {
        if horner.syndromes(w)? != planned.syndromes(w)? {
            println!("syndrome mismatch between backends on {w:?}");
            return Ok(Status::Failed);
        }
    }

    let mut rates = Vec::new();
    for (step, backend, d) in [("syndrome", "horner", &horner), ("syndrome", "plan", &planned), ("decode", "horner", &horner), ("decode", "plan", &planned)] {
        let mut it = words.iter().cycle();
        let r = if step == "syndrome" {
            rate(words.len(), || {
                std::hint::black_box(d.syndromes(it.next().unwrap()).unwrap());
            })
        } else {
            rate(words.len(), || {
                std::hint::black_box(d.decode(it.next().unwrap(), &[]).unwrap());
            })
        };
        println!("{step:<10} {backend:<8} {r:>14.1}");
        rates.push(r);
    }
    println!("speedup syndrome {:.2}x, decode {:.2}x", rates[1] / rates[0], rates[3] / rates[2]);
    Ok(Status::Ok)
}
