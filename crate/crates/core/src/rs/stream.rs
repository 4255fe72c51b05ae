//! Symbol streams: little-endian 16-bit words or whitespace-separated hex,
//! with a JSON sidecar header at `<file>.hdr`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::RSCodeSpec;
use crate::error::{Error, Result};
use crate::gf::{FieldContext, FieldElement};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamHeader {
    pub m: u32,
    pub prim_poly: String,
    pub n: usize,
    pub k: usize,
    pub n_short: usize,
    pub k_short: usize,
    pub b: usize,
}

impl StreamHeader {
    pub fn from_spec(spec: &RSCodeSpec) -> StreamHeader {
        StreamHeader {
            m: spec.field.m(),
            prim_poly: format!("0x{:x}", spec.field.prim_poly()),
            n: spec.n,
            k: spec.k,
            n_short: spec.n_short,
            k_short: spec.k_short,
            b: spec.b,
        }
    }

    pub fn to_spec(&self) -> Result<RSCodeSpec> {
        let poly = u32::from_str_radix(self.prim_poly.trim_start_matches("0x"), 16)
            .map_err(|e| Error::StreamFormat(format!("prim_poly {:?}: {e}", self.prim_poly)))?;
        let spec = RSCodeSpec::new(FieldContext::new(self.m, poly)?, self.n, self.k, self.n_short, self.b)?;
        if spec.k_short != self.k_short {
            return Err(Error::StreamFormat(format!("k_short {} disagrees with n, k, n_short", self.k_short)));
        }
        Ok(spec)
    }

    pub fn path_for(data: &Path) -> PathBuf {
        let mut s = data.as_os_str().to_owned();
        s.push(".hdr");
        PathBuf::from(s)
    }
}

pub fn symbols_to_bytes(symbols: &[FieldElement]) -> Vec<u8> {
    symbols.iter().flat_map(|s| s.0.to_le_bytes()).collect()
}

fn checked(v: u32, m: u32) -> Result<FieldElement> {
    if v >> m != 0 {
        return Err(Error::StreamFormat(format!("symbol {v:#x} exceeds {m} bits")));
    }
    Ok(FieldElement(v as u16))
}

pub fn symbols_from_bytes(bytes: &[u8], m: u32) -> Result<Vec<FieldElement>> {
    if bytes.len() % 2 != 0 {
        return Err(Error::StreamFormat("odd byte count".into()));
    }
    bytes.chunks_exact(2).map(|c| checked(u16::from_le_bytes([c[0], c[1]]) as u32, m)).collect()
}

/// One symbol per token, `per_line` tokens per line.
pub fn symbols_to_hex(symbols: &[FieldElement], per_line: usize) -> String {
    let mut out = String::new();
    for chunk in symbols.chunks(per_line.max(1)) {
        let line: Vec<String> = chunk.iter().map(|s| format!("{:x}", s.0)).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn symbols_from_hex(text: &str, m: u32) -> Result<Vec<FieldElement>> {
    text.split_whitespace()
        .map(|tok| {
            let v = u32::from_str_radix(tok.trim_start_matches("0x"), 16)
                .map_err(|_| Error::StreamFormat(format!("bad hex symbol {tok:?}")))?;
            checked(v, m)
        })
        .collect()
}

fn is_text(path: &Path) -> bool {
    matches!(path.extension().and_then(|e| e.to_str()), Some("hex" | "txt"))
}

/// Reads a stream and its header. Text is used for `.hex` and `.txt` files.
pub fn read_symbol_file(path: &Path) -> Result<(StreamHeader, Vec<FieldElement>)> {
    let hdr_path = StreamHeader::path_for(path);
    let hdr_text = std::fs::read_to_string(&hdr_path)
        .map_err(|e| Error::StreamFormat(format!("missing header {}: {e}", hdr_path.display())))?;
    let header: StreamHeader = serde_json::from_str(&hdr_text).map_err(|e| Error::StreamFormat(e.to_string()))?;
    let symbols = read_symbols(path, header.m)?;
    Ok((header, symbols))
}

/// Reads symbols without a header.
pub fn read_symbols(path: &Path, m: u32) -> Result<Vec<FieldElement>> {
    if is_text(path) {
        symbols_from_hex(&std::fs::read_to_string(path)?, m)
    } else {
        symbols_from_bytes(&std::fs::read(path)?, m)
    }
}

pub fn write_symbol_file(path: &Path, header: &StreamHeader, symbols: &[FieldElement]) -> Result<()> {
    if is_text(path) {
        std::fs::write(path, symbols_to_hex(symbols, header.n_short))?;
    } else {
        std::fs::write(path, symbols_to_bytes(symbols))?;
    }
    let hdr = serde_json::to_string_pretty(header).expect("header serializes");
    std::fs::write(StreamHeader::path_for(path), hdr + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn byte_and_hex_round_trip() {
        let s: Vec<FieldElement> = (0..300u16).map(|v| FieldElement(v * 13 % 4096)).collect();
        assert_eq!(symbols_from_bytes(&symbols_to_bytes(&s), 12).unwrap(), s);
        assert_eq!(symbols_from_hex(&symbols_to_hex(&s, 17), 12).unwrap(), s);
        assert!(symbols_from_bytes(&[0xff, 0xff], 8).is_err());
        assert!(symbols_from_bytes(&[1], 8).is_err());
        assert!(symbols_from_hex("1 zz", 8).is_err());
    }

    #[test]
    fn header_round_trip() {
        let spec = RSCodeSpec::shortened(8, 200, 168, 1).unwrap();
        let h = StreamHeader::from_spec(&spec);
        let back = h.to_spec().unwrap();
        assert_eq!((back.n, back.k, back.n_short, back.k_short, back.b), (255, 223, 200, 168, 1));
        let mut bad = h.clone();
        bad.k_short = 3;
        assert!(bad.to_spec().is_err());
    }

    #[test]
    fn files_round_trip() {
        let dir = std::env::temp_dir().join(format!("ccft-stream-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let spec = RSCodeSpec::shortened(4, 15, 11, 0).unwrap();
        let h = StreamHeader::from_spec(&spec);
        let s: Vec<FieldElement> = (0..30u16).map(|v| FieldElement(v % 16)).collect();
        for name in ["a.bin", "a.hex"] {
            let p = dir.join(name);
            write_symbol_file(&p, &h, &s).unwrap();
            assert_eq!(read_symbol_file(&p).unwrap(), (h.clone(), s.clone()));
        }
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
