use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use ccft_core::cost::SearchOptions;
use ccft_core::rs::{encode, read_symbol_file, read_symbols, write_symbol_file, DecodeStatus, Decoder, StreamHeader};
use clap::{Args, ValueEnum};
use rayon::prelude::*;

use crate::common::{build_spec, usage, CodeArgs, FieldArgs};
use crate::Status;

#[derive(Args, Debug)]
pub struct EncodeArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[command(flatten)]
    code: CodeArgs,
    /// Message symbols (k' per block). `.hex`/`.txt` files are read as text.
    #[arg(long)]
    input: PathBuf,
    /// Codeword stream; a `.hdr` header is written next to it.
    #[arg(long)]
    output: PathBuf,
}

pub fn run_encode(a: EncodeArgs) -> Result<Status> {
    let code = a.code.code.ok_or_else(|| usage("--code is required"))?;
    let spec = build_spec(&a.field, code, a.code.n, a.code.b)?;
    let header = StreamHeader::from_spec(&spec);
    let hdr_path = StreamHeader::path_for(&a.input);
    if hdr_path.exists() {
        let (given, _) = read_symbol_file(&a.input)?;
        if given != header {
            return Err(usage(format!("{} does not match the code flags", hdr_path.display())));
        }
    }
    let msg = read_symbols(&a.input, spec.m()).with_context(|| format!("reading {}", a.input.display()))?;
    if msg.len() % spec.k_short != 0 {
        bail!("{} symbols is not a multiple of k' = {}", msg.len(), spec.k_short);
    }
    let blocks: Vec<_> = msg.par_chunks(spec.k_short).map(|m| encode(&spec, m)).collect::<Result<Vec<_>, _>>()?;
    let out: Vec<_> = blocks.concat();
    write_symbol_file(&a.output, &header, &out)?;
    println!("encoded {} blocks of {} into {}", blocks.len(), spec.label(), a.output.display());
    Ok(Status::Ok)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Backend {
    /// Pruned transform plans.
    Plan,
    /// Direct polynomial evaluation.
    Horner,
}

#[derive(Args, Debug)]
pub struct DecodeArgs {
    /// Optional; must agree with the stream header when given.
    #[command(flatten)]
    field: FieldArgs,
    #[command(flatten)]
    code: CodeArgs,
    /// Received stream with its `.hdr` header.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Erasure list: one line per block, `BLOCK POS POS ...`.
    #[arg(long)]
    erasures: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Backend::Plan)]
    backend: Backend,
    #[arg(long, default_value_t = 2)]
    max_tiers: usize,
}

fn read_erasures(path: &Path, blocks: usize, n_short: usize) -> Result<BTreeMap<usize, Vec<usize>>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let nums = line
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .with_context(|| format!("{}:{}: bad number", path.display(), lineno + 1))?;
        let (&block, pos) = nums.split_first().unwrap();
        if block >= blocks || pos.iter().any(|&p| p >= n_short) {
            bail!("{}:{}: block or position out of range", path.display(), lineno + 1);
        }
        out.entry(block).or_default().extend_from_slice(pos);
    }
    Ok(out)
}

pub fn run_decode(a: DecodeArgs) -> Result<Status> {
    let (header, received) = read_symbol_file(&a.input)?;
    let spec = header.to_spec()?;
    if a.field.m.is_some() || a.code.code.is_some() {
        let code = a.code.code.ok_or_else(|| usage("--code is required when --m is given"))?;
        let flagged = build_spec(&a.field, code, a.code.n, a.code.b)?;
        if StreamHeader::from_spec(&flagged) != header {
            return Err(usage(format!("flags disagree with {}", StreamHeader::path_for(&a.input).display())));
        }
    }
    if received.len() % spec.n_short != 0 {
        bail!("{} symbols is not a multiple of n' = {}", received.len(), spec.n_short);
    }
    let blocks = received.len() / spec.n_short;
    let erasures = match &a.erasures {
        Some(p) => read_erasures(p, blocks, spec.n_short)?,
        None => BTreeMap::new(),
    };
    let decoder = match a.backend {
        Backend::Horner => Decoder::horner(spec.clone()),
        Backend::Plan => Decoder::with_plans(spec.clone(), &SearchOptions { max_tiers: a.max_tiers.max(1), ..Default::default() })?,
    };
    let none = Vec::new();
    let results = received
        .par_chunks(spec.n_short)
        .enumerate()
        .map(|(i, r)| decoder.decode(r, erasures.get(&i).unwrap_or(&none)))
        .collect::<Result<Vec<_>, _>>()?;

    let mut failed = 0;
    let mut corrected_symbols = 0;
    for (i, res) in results.iter().enumerate() {
        let rho = erasures.get(&i).map_or(0, |e| e.len());
        match res.status {
            DecodeStatus::Corrected => {
                corrected_symbols += res.error_positions.len();
                println!(
                    "block {i}: corrected, {} errors, {rho} erasures, {} divisions, {} combine additions",
                    res.error_positions.len(),
                    res.stats.divisions,
                    res.stats.combine_adds
                );
            }
            DecodeStatus::FailureDetected => {
                failed += 1;
                println!("block {i}: failure detected, {rho} erasures");
            }
        }
    }
    let out: Vec<_> = results.iter().flat_map(|r| r.codeword.iter().copied()).collect();
    write_symbol_file(&a.output, &header, &out)?;
    println!(
        "{blocks} blocks, {} corrected, {failed} failures, {corrected_symbols} symbols changed; wrote {}",
        blocks - failed,
        a.output.display()
    );
    Ok(if failed == 0 { Status::Ok } else { Status::Failed })
}
