use crate::error::{Error, Result};

/// Partition of {0, …, n−1} into orbits of i ↦ 2i mod n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclotomicCosets {
    pub n: usize,
    /// Each coset sorted ascending; cosets ordered by their smallest element.
    pub cosets: Vec<Vec<usize>>,
}

impl CyclotomicCosets {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n % 2 == 0 {
            return Err(Error::InvalidLength(n));
        }
        let mut seen = vec![false; n];
        let mut cosets = Vec::new();
        for leader in 0..n {
            if seen[leader] {
                continue;
            }
            let mut coset = orbit(leader, n);
            for &i in &coset {
                seen[i] = true;
            }
            coset.sort_unstable();
            cosets.push(coset);
        }
        Ok(CyclotomicCosets { n, cosets })
    }

    pub fn len(&self) -> usize {
        self.cosets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cosets.is_empty()
    }

    pub fn leaders(&self) -> impl Iterator<Item = usize> + '_ {
        self.cosets.iter().map(|c| c[0])
    }
}

/// The orbit k, 2k, 4k, … mod n in generation order.
pub fn orbit(k: usize, n: usize) -> Vec<usize> {
    let mut out = vec![k % n];
    let mut x = (2 * k) % n;
    while x != k % n {
        out.push(x);
        x = (2 * x) % n;
    }
    out
}

/// Multiplicative order of 2 modulo odd n (1 for n = 1).
pub fn order_of_two(n: usize) -> usize {
    if n == 1 {
        return 1;
    }
    orbit(1, n).len()
}
