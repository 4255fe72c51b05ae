//! Greedy common-subexpression elimination for binary matrices.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet};

use crate::cfft::BilinearNetwork;
use crate::error::{Error, Result};
use crate::gf::{FieldContext, FieldElement};
use crate::gf2::BitMatrix;

/// Straight-line XOR code for y = M·x. Variables 0..n_inputs are the inputs,
/// variable `n_inputs + i` is `temps[i].0 ^ temps[i].1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XorProgram {
    pub n_inputs: usize,
    pub temps: Vec<(u32, u32)>,
    /// Each output is the XOR of the listed variables (empty means zero).
    pub outputs: Vec<Vec<u32>>,
}

impl XorProgram {
    /// One sum per row, nothing shared.
    pub fn naive(mat: &BitMatrix) -> XorProgram {
        XorProgram {
            n_inputs: mat.cols(),
            temps: Vec::new(),
            outputs: (0..mat.rows()).map(|r| mat.row_ones(r).into_iter().map(|c| c as u32).collect()).collect(),
        }
    }

    /// Repeatedly replaces the most frequent pair of variables by a new one
    /// until no pair occurs in two rows. Ties go to the lowest indices.
    pub fn greedy(mat: &BitMatrix) -> XorProgram {
        let mut prog = XorProgram::naive(mat);
        let rows = &mut prog.outputs;
        let mut var_rows: Vec<HashSet<u32>> = vec![HashSet::new(); mat.cols()];
        let mut counts: HashMap<(u32, u32), u32> = HashMap::new();
        for (r, row) in rows.iter().enumerate() {
            for (i, &a) in row.iter().enumerate() {
                var_rows[a as usize].insert(r as u32);
                for &b in &row[i + 1..] {
                    *counts.entry((a, b)).or_insert(0) += 1;
                }
            }
        }
        let mut heap: BinaryHeap<(u32, Reverse<u32>, Reverse<u32>)> =
            counts.iter().filter(|(_, &c)| c >= 2).map(|(&(a, b), &c)| (c, Reverse(a), Reverse(b))).collect();

        fn bump(counts: &mut HashMap<(u32, u32), u32>, heap: &mut BinaryHeap<(u32, Reverse<u32>, Reverse<u32>)>, a: u32, b: u32, up: bool) {
            let key = if a < b { (a, b) } else { (b, a) };
            let c = counts.entry(key).or_insert(0);
            if up {
                *c += 1;
            } else {
                *c -= 1;
            }
            let c = *c;
            if c == 0 {
                counts.remove(&key);
            } else if c >= 2 {
                heap.push((c, Reverse(key.0), Reverse(key.1)));
            }
        }

        while let Some((c, Reverse(a), Reverse(b))) = heap.pop() {
            if counts.get(&(a, b)) != Some(&c) {
                continue;
            }
            let v = (prog.n_inputs + prog.temps.len()) as u32;
            prog.temps.push((a, b));
            counts.remove(&(a, b));
            let (small, large) = if var_rows[a as usize].len() <= var_rows[b as usize].len() { (a, b) } else { (b, a) };
            let mut hit: Vec<u32> = var_rows[small as usize].iter().copied().filter(|r| var_rows[large as usize].contains(r)).collect();
            hit.sort_unstable();
            var_rows.push(HashSet::new());
            for r in hit {
                let row = &mut rows[r as usize];
                row.retain(|&x| x != a && x != b);
                for &x in row.iter() {
                    bump(&mut counts, &mut heap, a, x, false);
                    bump(&mut counts, &mut heap, b, x, false);
                    bump(&mut counts, &mut heap, x, v, true);
                }
                row.push(v);
                var_rows[a as usize].remove(&r);
                var_rows[b as usize].remove(&r);
                var_rows[v as usize].insert(r);
            }
        }
        for row in rows.iter_mut() {
            row.sort_unstable();
        }
        prog
    }

    pub fn add_count(&self) -> usize {
        self.temps.len() + self.outputs.iter().map(|o| o.len().saturating_sub(1)).sum::<usize>()
    }

    pub fn eval(&self, x: &[FieldElement]) -> Vec<FieldElement> {
        let mut vars = x.to_vec();
        for &(a, b) in &self.temps {
            vars.push(vars[a as usize] + vars[b as usize]);
        }
        self.outputs.iter().map(|o| o.iter().fold(FieldElement::ZERO, |acc, &v| acc + vars[v as usize])).collect()
    }

    /// The matrix this program computes.
    pub fn to_matrix(&self) -> BitMatrix {
        let mut expanded: Vec<BitMatrix> = (0..self.n_inputs)
            .map(|i| {
                let mut m = BitMatrix::zeros(1, self.n_inputs);
                m.set(0, i, true);
                m
            })
            .collect();
        for &(a, b) in &self.temps {
            let mut m = expanded[a as usize].clone();
            m.xor_row_from(0, &expanded[b as usize], 0);
            expanded.push(m);
        }
        let mut out = BitMatrix::zeros(self.outputs.len(), self.n_inputs);
        for (r, o) in self.outputs.iter().enumerate() {
            for &v in o {
                out.xor_row_from(r, &expanded[v as usize], 0);
            }
        }
        out
    }
}

/// A network whose binary stages share intermediate sums.
#[derive(Clone, Debug)]
pub struct SharedSumNetwork {
    pub network: BilinearNetwork,
    /// Acts on the input in natural order.
    pub pre: XorProgram,
    pub post: XorProgram,
}

impl SharedSumNetwork {
    pub fn mult_count(&self) -> usize {
        self.network.mult_count()
    }

    pub fn add_count(&self) -> usize {
        self.pre.add_count() + self.post.add_count()
    }

    pub fn eval(&self, ctx: &FieldContext, f: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if f.len() != self.network.n_in {
            return Err(Error::DimensionMismatch { expected: self.network.n_in, got: f.len() });
        }
        let products: Vec<FieldElement> =
            self.pre.eval(f).into_iter().zip(&self.network.constants).map(|(s, &c)| ctx.mul(s, c)).collect();
        Ok(self.post.eval(&products))
    }
}

pub fn cse(net: &BilinearNetwork) -> SharedSumNetwork {
    SharedSumNetwork {
        network: net.clone(),
        pre: XorProgram::greedy(&net.natural_pre()),
        post: XorProgram::greedy(&net.post_matrix),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfft::{build_network, Form};
    use proptest::prelude::*;

    #[test]
    fn identity_is_unchanged() {
        let p = XorProgram::greedy(&BitMatrix::identity(6));
        assert_eq!(p, XorProgram::naive(&BitMatrix::identity(6)));
        assert_eq!(p.add_count(), 0);
    }

    #[test]
    fn duplicate_rows_share_their_sum() {
        for w in 2..9 {
            let row: Vec<u8> = (0..10).map(|c| (c < w) as u8).collect();
            let m = BitMatrix::from_rows(&[row.clone(), row]);
            assert_eq!(XorProgram::naive(&m).add_count(), 2 * (w - 1));
            let g = XorProgram::greedy(&m);
            assert_eq!(g.add_count(), w - 1);
            assert_eq!(g.to_matrix(), m);
        }
    }

    #[test]
    fn five_point_post_matrix_shrinks() {
        let ctx = FieldContext::new(4, 0x13).unwrap();
        let net = build_network(&ctx, 5, ctx.element_of_order(5).unwrap(), Form::Dcfft).unwrap();
        let before = XorProgram::naive(&net.post_matrix).add_count();
        let s = cse(&net);
        assert!(s.post.add_count() < before);
        assert_eq!(s.post.to_matrix(), net.post_matrix);
        assert!(s.add_count() <= net.add_count());
        for v in 0..16u16 {
            let f: Vec<FieldElement> = (0..5).map(|i| FieldElement((v * 7 + i * 3) % 16)).collect();
            assert_eq!(s.eval(&ctx, &f).unwrap(), net.eval(&ctx, &f).unwrap());
        }
    }

    proptest! {
        #[test]
        fn greedy_preserves_map(rows in prop::collection::vec(prop::collection::vec(0u8..2, 12), 1..20)) {
            let m = BitMatrix::from_rows(&rows);
            let g = XorProgram::greedy(&m);
            prop_assert_eq!(g.to_matrix(), m.clone());
            prop_assert!(g.add_count() <= XorProgram::naive(&m).add_count());
        }
    }
}
