use std::fmt;
use std::str::FromStr;

use anyhow::Result;
use ccft_core::rs::RSCodeSpec;
use ccft_core::FieldContext;
use clap::Args;

/// Bad flags or inconsistent parameters; exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// A shortened code length pair, optionally prefixed by the field degree:
/// `255,223` or `12:2720,2550`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CodeArg {
    pub m: Option<u32>,
    pub n: usize,
    pub k: usize,
}

impl FromStr for CodeArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (m, rest) = match s.split_once(':') {
            Some((m, rest)) => (Some(m.trim().parse::<u32>().map_err(|e| format!("field degree {m:?}: {e}"))?), rest),
            None => (None, s),
        };
        let (n, k) = rest.split_once(',').ok_or_else(|| format!("expected N,K, got {s:?}"))?;
        let n = n.trim().parse().map_err(|e| format!("length {n:?}: {e}"))?;
        let k = k.trim().parse().map_err(|e| format!("dimension {k:?}: {e}"))?;
        Ok(CodeArg { m, n, k })
    }
}

pub fn parse_hex(s: &str) -> std::result::Result<u32, String> {
    u32::from_str_radix(s.trim_start_matches("0x"), 16).map_err(|e| format!("{s:?}: {e}"))
}

/// Parsed as one value rather than a repeated flag.
pub type IndexList = Vec<usize>;

/// Factor lists such as `63x65` or `3,5,17`.
pub fn parse_factors(s: &str) -> std::result::Result<Vec<usize>, String> {
    s.split(['x', 'X', ',', '*'])
        .map(|t| t.trim().parse::<usize>().map_err(|e| format!("factor {t:?}: {e}")))
        .collect()
}

/// Index lists such as `0..4,7,10..15` (ranges are half-open).
pub fn parse_indices(s: &str) -> std::result::Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once("..") {
            Some((a, b)) => {
                let a: usize = a.parse().map_err(|e| format!("{part:?}: {e}"))?;
                let b: usize = b.parse().map_err(|e| format!("{part:?}: {e}"))?;
                out.extend(a..b);
            }
            None => out.push(part.parse().map_err(|e| format!("{part:?}: {e}"))?),
        }
    }
    Ok(out)
}

#[derive(Args, Clone, Debug, Default)]
pub struct FieldArgs {
    /// Field degree m of GF(2^m).
    #[arg(long)]
    pub m: Option<u32>,
    /// Primitive polynomial in hex (default: conventional choice for m).
    #[arg(long, value_parser = parse_hex)]
    pub poly: Option<u32>,
}

impl FieldArgs {
    pub fn context(&self, m: Option<u32>) -> Result<FieldContext> {
        let m = m.or(self.m).ok_or_else(|| usage("--m is required"))?;
        let ctx = match self.poly {
            Some(p) => FieldContext::new(m, p),
            None => FieldContext::with_default_poly(m),
        };
        ctx.map_err(|e| usage(e.to_string()))
    }
}

#[derive(Args, Clone, Debug, Default)]
pub struct CodeArgs {
    /// Code as N',K' (shortened length and dimension), optionally M:N',K'.
    #[arg(long)]
    pub code: Option<CodeArg>,
    /// Parent (transform) length; default 2^m − 1.
    #[arg(long)]
    pub n: Option<usize>,
    /// Exponent of the first generator root.
    #[arg(long, default_value_t = 0)]
    pub b: usize,
}

pub fn build_spec(field: &FieldArgs, code: CodeArg, parent: Option<usize>, b: usize) -> Result<RSCodeSpec> {
    if let (Some(a), Some(c)) = (field.m, code.m) {
        if a != c {
            return Err(usage(format!("--m {a} disagrees with code prefix {c}")));
        }
    }
    let ctx = field.context(code.m)?;
    let n = parent.unwrap_or(ctx.group_order());
    if code.k > code.n || code.n > n {
        return Err(usage(format!("code ({},{}) does not fit in length {n}", code.n, code.k)));
    }
    let k = n - (code.n - code.k);
    RSCodeSpec::new(ctx, n, k, code.n, b).map_err(|e| usage(e.to_string()))
}

/// Smallest m with n | 2^m − 1.
pub fn degree_for_length(n: usize) -> Option<u32> {
    (2..=16u32).find(|&m| ((1usize << m) - 1) % n == 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parsers() {
        assert_eq!("12:2720,2550".parse::<CodeArg>().unwrap(), CodeArg { m: Some(12), n: 2720, k: 2550 });
        assert_eq!("15,11".parse::<CodeArg>().unwrap(), CodeArg { m: None, n: 15, k: 11 });
        assert!("15".parse::<CodeArg>().is_err());
        assert_eq!(parse_factors("63x65").unwrap(), vec![63, 65]);
        assert_eq!(parse_factors("3,5,17").unwrap(), vec![3, 5, 17]);
        assert_eq!(parse_indices("0..3,7").unwrap(), vec![0, 1, 2, 7]);
        assert_eq!(parse_hex("0x11d").unwrap(), 0x11d);
        assert_eq!(degree_for_length(65), Some(12));
        assert_eq!(degree_for_length(15), Some(4));
    }
}
