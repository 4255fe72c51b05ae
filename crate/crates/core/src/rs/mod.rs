//! Errors-and-erasures Reed-Solomon decoding over GF(2^m).
//!
//! Positions: symbol `i` of a codeword is the coefficient of x^i. Parity
//! occupies positions 0..2t, the message the positions above. An error at
//! position j corresponds to the locator root α^{−j}.

mod stream;

use crate::cost::{self, CostReport, SearchOptions};
use crate::error::{Error, Result};
use crate::gf::{FieldContext, FieldElement};
use crate::planner::PrunedPlan;

pub use stream::{read_symbol_file, read_symbols, symbols_from_bytes, symbols_from_hex, symbols_to_bytes, symbols_to_hex, write_symbol_file, StreamHeader};

/// Parameters of a (possibly shortened) RS code.
#[derive(Clone, Debug)]
pub struct RSCodeSpec {
    pub field: FieldContext,
    /// Parent length, a divisor of 2^m − 1.
    pub n: usize,
    pub k: usize,
    pub n_short: usize,
    pub k_short: usize,
    /// Exponent of the first generator root.
    pub b: usize,
    pub t: usize,
    /// Element of order n whose powers are the generator roots.
    pub alpha: FieldElement,
    /// Monic generator, lowest degree first.
    pub generator: Vec<FieldElement>,
}

impl RSCodeSpec {
    pub fn new(field: FieldContext, n: usize, k: usize, n_short: usize, b: usize) -> Result<Self> {
        let alpha = field.element_of_order(n)?;
        if k == 0 || k > n || (n - k) % 2 != 0 {
            return Err(Error::InvalidCode(format!("need 0 < k ≤ n and n − k even, got n={n} k={k}")));
        }
        let two_t = n - k;
        if n_short > n || n_short <= two_t {
            return Err(Error::InvalidCode(format!("shortened length {n_short} must lie in ({two_t}, {n}]")));
        }
        if b >= n {
            return Err(Error::InvalidCode(format!("first root exponent {b} must be below {n}")));
        }
        let mut generator = vec![FieldElement::ONE];
        for i in b..b + two_t {
            let root = field.pow(alpha, i as u64);
            let mut next = vec![FieldElement::ZERO; generator.len() + 1];
            for (d, &c) in generator.iter().enumerate() {
                next[d + 1] += c;
                next[d] += field.mul(c, root);
            }
            generator = next;
        }
        Ok(RSCodeSpec { field, n, k, n_short, k_short: n_short - two_t, b, t: two_t / 2, alpha, generator })
    }

    /// The (n', k') code shortened from the full-length code over GF(2^m)
    /// with the default primitive polynomial.
    pub fn shortened(m: u32, n_short: usize, k_short: usize, b: usize) -> Result<Self> {
        let field = FieldContext::with_default_poly(m)?;
        let n = field.group_order();
        if k_short > n_short || n_short > n {
            return Err(Error::InvalidCode(format!("({n_short},{k_short}) does not fit in length {n}")));
        }
        let k = n - (n_short - k_short);
        RSCodeSpec::new(field, n, k, n_short, b)
    }

    pub fn two_t(&self) -> usize {
        2 * self.t
    }

    pub fn label(&self) -> String {
        format!("({},{})", self.n_short, self.k_short)
    }

    /// Weighted-cost factor 2m − 1.
    pub fn m(&self) -> u32 {
        self.field.m()
    }

    /// Transform inputs and outputs involved in each decoding step.
    pub fn transform_sets(&self, step: Poly) -> (Vec<usize>, Vec<usize>) {
        let n = self.n;
        let two_t = self.two_t();
        let points: Vec<usize> = (0..self.n_short).map(|j| (n - j) % n).collect();
        match step {
            Poly::Syndrome => ((self.n_short..n).collect(), (0..two_t).map(|j| (self.b + j) % n).collect()),
            Poly::Omega => ((two_t..n).collect(), points),
            Poly::LambdaEven => ((0..n).filter(|&i| i % 2 == 1 || i > two_t).collect(), points),
            Poly::LambdaOdd => ((0..n).filter(|&i| i % 2 == 0 || i >= two_t).collect(), points),
        }
    }
}

/// The transforms a decoder runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Poly {
    Syndrome,
    Omega,
    LambdaEven,
    LambdaOdd,
}

impl Poly {
    pub const ALL: [Poly; 4] = [Poly::Syndrome, Poly::Omega, Poly::LambdaEven, Poly::LambdaOdd];
    pub const CHIEN_FORNEY: [Poly; 3] = [Poly::Omega, Poly::LambdaEven, Poly::LambdaOdd];

    pub fn name(self) -> &'static str {
        match self {
            Poly::Syndrome => "syndrome",
            Poly::Omega => "omega",
            Poly::LambdaEven => "lambda-even",
            Poly::LambdaOdd => "lambda-odd",
        }
    }
}

impl std::str::FromStr for Poly {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Poly::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown step {s:?} (expected syndrome, omega, lambda-even or lambda-odd)"))
    }
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::LengthMismatch { expected, got });
    }
    Ok(())
}

/// p(x) at `x`, Horner's rule.
pub fn poly_eval(ctx: &FieldContext, p: &[FieldElement], x: FieldElement) -> FieldElement {
    p.iter().rev().fold(FieldElement::ZERO, |acc, &c| ctx.mul(acc, x) + c)
}

fn trim(p: &mut Vec<FieldElement>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

/// Degree of p, with the zero polynomial reported as 0.
fn degree(p: &[FieldElement]) -> usize {
    p.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
}

/// Systematic encoding: parity in positions 0..2t, message above.
pub fn encode(spec: &RSCodeSpec, message: &[FieldElement]) -> Result<Vec<FieldElement>> {
    check_len(spec.k_short, message.len())?;
    let ctx = &spec.field;
    let two_t = spec.two_t();
    let mut word = vec![FieldElement::ZERO; spec.n_short];
    word[two_t..].copy_from_slice(message);
    // remainder of x^{2t}·m(x) modulo the monic generator
    let mut rem = word.clone();
    for d in (two_t..spec.n_short).rev() {
        let q = rem[d];
        if q.is_zero() {
            continue;
        }
        for (i, &g) in spec.generator.iter().enumerate() {
            rem[d - two_t + i] += ctx.mul(q, g);
        }
    }
    word[..two_t].copy_from_slice(&rem[..two_t]);
    Ok(word)
}

/// Syndromes by Horner's rule: S_j = r(α^{j+b}).
pub fn syndromes_horner(spec: &RSCodeSpec, received: &[FieldElement]) -> Result<Vec<FieldElement>> {
    check_len(spec.n_short, received.len())?;
    Ok((0..spec.two_t())
        .map(|j| poly_eval(&spec.field, received, spec.field.pow(spec.alpha, (j + spec.b) as u64)))
        .collect())
}

pub fn is_codeword(spec: &RSCodeSpec, word: &[FieldElement]) -> bool {
    word.len() == spec.n_short && syndromes_horner(spec, word).unwrap().iter().all(|s| s.is_zero())
}

/// Errata locator Λ and evaluator Ω, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocatorPair {
    pub lambda: Vec<FieldElement>,
    pub omega: Vec<FieldElement>,
    /// Register length reached by the key-equation solver.
    pub length: usize,
}

impl LocatorPair {
    pub fn lambda_degree(&self) -> usize {
        degree(&self.lambda)
    }

    /// Even-degree terms of Λ, odd positions zeroed.
    pub fn lambda_even(&self) -> Vec<FieldElement> {
        split_parity(&self.lambda, 0)
    }

    /// Odd-degree terms of Λ; equals x·Λ'(x) in characteristic 2.
    pub fn lambda_odd(&self) -> Vec<FieldElement> {
        split_parity(&self.lambda, 1)
    }
}

fn split_parity(p: &[FieldElement], parity: usize) -> Vec<FieldElement> {
    p.iter().enumerate().map(|(i, &c)| if i % 2 == parity { c } else { FieldElement::ZERO }).collect()
}

/// Formal derivative.
pub fn derivative(p: &[FieldElement]) -> Vec<FieldElement> {
    p.iter().enumerate().skip(1).map(|(i, &c)| if i % 2 == 1 { c } else { FieldElement::ZERO }).collect()
}

/// Π (1 − α^j x) over the erased positions.
pub fn erasure_locator(spec: &RSCodeSpec, erasures: &[usize]) -> Vec<FieldElement> {
    let ctx = &spec.field;
    let mut gamma = vec![FieldElement::ONE];
    for &j in erasures {
        let x = ctx.pow(spec.alpha, j as u64);
        let mut next = gamma.clone();
        next.push(FieldElement::ZERO);
        for (d, &c) in gamma.iter().enumerate() {
            next[d + 1] += ctx.mul(c, x);
        }
        gamma = next;
    }
    gamma
}

/// Inversionless Berlekamp-Massey started from the erasure locator.
pub fn key_equation(spec: &RSCodeSpec, syndromes: &[FieldElement], erasures: &[usize]) -> LocatorPair {
    let ctx = &spec.field;
    let two_t = spec.two_t();
    let rho = erasures.len();
    let gamma0 = erasure_locator(spec, erasures);
    let mut lambda = gamma0.clone();
    let mut prev = gamma0;
    let mut len = rho;
    let mut gamma = FieldElement::ONE;
    for r in rho..two_t {
        let delta = (0..lambda.len().min(r + 1))
            .fold(FieldElement::ZERO, |acc, i| acc + ctx.mul(lambda[i], syndromes[r - i]));
        let mut next: Vec<FieldElement> = lambda.iter().map(|&c| ctx.mul(gamma, c)).collect();
        if !delta.is_zero() {
            if next.len() < prev.len() + 1 {
                next.resize(prev.len() + 1, FieldElement::ZERO);
            }
            for (i, &c) in prev.iter().enumerate() {
                next[i + 1] += ctx.mul(delta, c);
            }
        }
        if !delta.is_zero() && 2 * len <= r + rho {
            prev = std::mem::replace(&mut lambda, next);
            len = r + 1 + rho - len;
            gamma = delta;
        } else {
            lambda = next;
            prev.insert(0, FieldElement::ZERO);
        }
        trim(&mut prev);
        trim(&mut lambda);
    }
    if let Some(&c0) = lambda.first() {
        if !c0.is_zero() && c0 != FieldElement::ONE {
            let inv = ctx.inv(c0).unwrap();
            lambda.iter_mut().for_each(|c| *c = ctx.mul(*c, inv));
        }
    }
    trim(&mut lambda);
    let mut omega = vec![FieldElement::ZERO; two_t];
    for (i, &l) in lambda.iter().enumerate().take(two_t) {
        for j in 0..two_t - i {
            omega[i + j] += ctx.mul(l, syndromes[j]);
        }
    }
    trim(&mut omega);
    LocatorPair { lambda, omega, length: len }
}

/// Instrumented counters of the root search and magnitude step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ChienForneyStats {
    pub divisions: usize,
    /// Additions forming Λ(a) = Λe(a) + Λo(a).
    pub combine_adds: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErrataFound {
    pub positions: Vec<usize>,
    pub magnitudes: Vec<FieldElement>,
    pub stats: ChienForneyStats,
}

/// Root search and magnitudes from evaluations at α^{−j}, j < n'.
fn roots_and_magnitudes(
    spec: &RSCodeSpec,
    omega: &[FieldElement],
    even: &[FieldElement],
    odd: &[FieldElement],
) -> Result<ErrataFound> {
    let ctx = &spec.field;
    let mut found = ErrataFound { positions: Vec::new(), magnitudes: Vec::new(), stats: ChienForneyStats::default() };
    for j in 0..spec.n_short {
        let value = even[j] + odd[j];
        found.stats.combine_adds += 1;
        if !value.is_zero() {
            continue;
        }
        if odd[j].is_zero() {
            return Err(Error::InconsistentPair);
        }
        let mut y = ctx.div(omega[j], odd[j])?;
        found.stats.divisions += 1;
        if spec.b != 0 {
            // X^{−b} with X = α^j
            y = ctx.mul(y, ctx.pow(spec.alpha, ((spec.n - j % spec.n) * spec.b % spec.n) as u64));
        }
        found.positions.push(j);
        found.magnitudes.push(y);
    }
    Ok(found)
}

/// Root search and Forney magnitudes with direct per-point evaluation.
pub fn chien_forney(spec: &RSCodeSpec, pair: &LocatorPair) -> Result<ErrataFound> {
    let ctx = &spec.field;
    let (even, odd) = (pair.lambda_even(), pair.lambda_odd());
    let points: Vec<FieldElement> = (0..spec.n_short).map(|j| ctx.pow(spec.alpha, ((spec.n - j) % spec.n) as u64)).collect();
    let ev = |p: &[FieldElement]| points.iter().map(|&x| poly_eval(ctx, p, x)).collect::<Vec<_>>();
    roots_and_magnitudes(spec, &ev(&pair.omega), &ev(&even), &ev(&odd))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecodeStatus {
    Corrected,
    FailureDetected,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeResult {
    /// The corrected codeword, or the received word on failure.
    pub codeword: Vec<FieldElement>,
    pub error_positions: Vec<usize>,
    pub error_values: Vec<FieldElement>,
    pub status: DecodeStatus,
    pub stats: ChienForneyStats,
}

/// Transforms selected for one decoding step.
#[derive(Clone, Debug)]
pub struct StepPlan {
    pub pruned: PrunedPlan,
    pub report: CostReport,
    /// `order[j]` is the position of the j-th needed value in the plan's
    /// wanted list.
    order: Vec<usize>,
}

impl StepPlan {
    fn new(spec: &RSCodeSpec, step: Poly, pruned: PrunedPlan, report: CostReport) -> StepPlan {
        let (_, wanted) = spec.transform_sets(step);
        let order = wanted.iter().map(|w| pruned.wanted_outputs.binary_search(w).unwrap()).collect();
        StepPlan { pruned, report, order }
    }

    fn eval(&self, ctx: &FieldContext, input: &[FieldElement]) -> Result<Vec<FieldElement>> {
        let values = self.pruned.eval_values(ctx, input)?;
        Ok(self.order.iter().map(|&i| values[i]).collect())
    }
}

/// A decoder with its transform plans prepared once.
#[derive(Clone, Debug)]
pub struct Decoder {
    pub spec: RSCodeSpec,
    plans: Option<Vec<StepPlan>>,
}

impl Decoder {
    /// Plain evaluation without transforms.
    pub fn horner(spec: RSCodeSpec) -> Decoder {
        Decoder { spec, plans: None }
    }

    /// Chooses, per step, the pruned plan with the lowest weighted total.
    pub fn with_plans(spec: RSCodeSpec, opts: &SearchOptions) -> Result<Decoder> {
        let mut plans = Vec::with_capacity(4);
        for step in Poly::ALL {
            let (zero, wanted) = spec.transform_sets(step);
            let (pruned, cand) = cost::best_plan(&spec.field, spec.n, &zero, &wanted, opts)?;
            plans.push(StepPlan::new(&spec, step, pruned, cand.report));
        }
        Ok(Decoder { spec, plans: Some(plans) })
    }

    pub fn step_plan(&self, step: Poly) -> Option<&StepPlan> {
        let i = Poly::ALL.iter().position(|&p| p == step).unwrap();
        self.plans.as_ref().map(|p| &p[i])
    }

    pub fn syndromes(&self, received: &[FieldElement]) -> Result<Vec<FieldElement>> {
        check_len(self.spec.n_short, received.len())?;
        match self.step_plan(Poly::Syndrome) {
            Some(p) => p.eval(&self.spec.field, received),
            None => syndromes_horner(&self.spec, received),
        }
    }

    pub fn chien_forney(&self, pair: &LocatorPair) -> Result<ErrataFound> {
        let spec = &self.spec;
        if pair.omega.len() > spec.two_t() || pair.lambda.len() > spec.two_t() + 1 {
            return Err(Error::InconsistentPair);
        }
        match &self.plans {
            None => chien_forney(spec, pair),
            Some(_) => {
                let ctx = &spec.field;
                let ev = |step, p: &[FieldElement]| self.step_plan(step).unwrap().eval(ctx, p);
                let omega = ev(Poly::Omega, &pair.omega)?;
                let even = ev(Poly::LambdaEven, &pair.lambda_even())?;
                let odd = ev(Poly::LambdaOdd, &pair.lambda_odd())?;
                roots_and_magnitudes(spec, &omega, &even, &odd)
            }
        }
    }

    pub fn decode(&self, received: &[FieldElement], erasures: &[usize]) -> Result<DecodeResult> {
        let spec = &self.spec;
        check_len(spec.n_short, received.len())?;
        let failure = |stats| DecodeResult {
            codeword: received.to_vec(),
            error_positions: Vec::new(),
            error_values: Vec::new(),
            status: DecodeStatus::FailureDetected,
            stats,
        };
        let mut erasures = erasures.to_vec();
        erasures.sort_unstable();
        erasures.dedup();
        if let Some(&j) = erasures.last() {
            if j >= spec.n_short {
                return Err(Error::DimensionMismatch { expected: spec.n_short, got: j });
            }
        }
        if erasures.len() > spec.two_t() {
            return Ok(failure(ChienForneyStats::default()));
        }
        let synd = self.syndromes(received)?;
        if erasures.is_empty() && synd.iter().all(|s| s.is_zero()) {
            return Ok(DecodeResult {
                codeword: received.to_vec(),
                error_positions: Vec::new(),
                error_values: Vec::new(),
                status: DecodeStatus::Corrected,
                stats: ChienForneyStats::default(),
            });
        }
        let pair = key_equation(spec, &synd, &erasures);
        let rho = erasures.len();
        let deg = pair.lambda_degree();
        // more errata than the code can resolve
        if deg != pair.length || 2 * pair.length > spec.two_t() + rho {
            return Ok(failure(ChienForneyStats::default()));
        }
        let found = match self.chien_forney(&pair) {
            Ok(f) => f,
            Err(Error::InconsistentPair) => return Ok(failure(ChienForneyStats::default())),
            Err(e) => return Err(e),
        };
        if found.positions.len() != deg {
            return Ok(failure(found.stats));
        }
        let mut codeword = received.to_vec();
        for (&p, &v) in found.positions.iter().zip(&found.magnitudes) {
            codeword[p] += v;
        }
        // never hand back a non-codeword
        if encode(spec, &codeword[spec.two_t()..])? != codeword {
            return Ok(failure(found.stats));
        }
        let (error_positions, error_values) = found
            .positions
            .iter()
            .zip(&found.magnitudes)
            .filter(|(_, v)| !v.is_zero())
            .map(|(&p, &v)| (p, v))
            .unzip();
        Ok(DecodeResult { codeword, error_positions, error_values, status: DecodeStatus::Corrected, stats: found.stats })
    }
}

/// Decodes with direct evaluation.
pub fn decode(spec: &RSCodeSpec, received: &[FieldElement], erasures: &[usize]) -> Result<DecodeResult> {
    Decoder::horner(spec.clone()).decode(received, erasures)
}
