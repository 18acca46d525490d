//! Exact eigenvalue assignments and the non-genericity relations among them.
//!
//! A relation picks, for every matrix, `s` of its eigenvalues (counted with
//! multiplicity) and asks whether their total vanishes (additive) or their
//! product is 1 (multiplicative). Multiplicative eigenvalues are stored as
//! exponents `μ` with `σ = exp(2πiμ)`, which turns "product is 1" into "sum
//! of exponents is an integer".
//!
//! Since equal eigenvalues are interchangeable, a choice is a vector of
//! sub-multiplicities rather than an index subset. Relations of a fixed size
//! are found by splitting the matrices into two halves, tabulating the sums of
//! one half and probing with the negated sums of the other.

use std::collections::HashMap;
use std::ops::ControlFlow;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jordan::{pmv_gcd, Flavor};
use crate::partition::MultiplicityVector;
use crate::rational::ExactComplexRational;

/// Default cap on enumerated sub-choices and reported witnesses.
pub const DEFAULT_BUDGET: u128 = 100_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EigenvalueEntry {
    pub value: ExactComplexRational,
    pub mult: usize,
}

/// Eigenvalues with multiplicities for each matrix of a tuple.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawAssignment", into = "RawAssignment")]
pub struct EigenvalueAssignment {
    flavor: Flavor,
    n: usize,
    classes: Vec<Vec<(ExactComplexRational, usize)>>,
}

#[derive(Serialize, Deserialize)]
struct RawAssignment {
    flavor: Flavor,
    n: usize,
    classes: Vec<Vec<EigenvalueEntry>>,
}

impl TryFrom<RawAssignment> for EigenvalueAssignment {
    type Error = Error;

    fn try_from(raw: RawAssignment) -> Result<Self> {
        let classes = raw.classes.into_iter().map(|c| c.into_iter().map(|e| (e.value, e.mult)).collect()).collect();
        let a = EigenvalueAssignment::new(raw.flavor, classes)?;
        if a.n != raw.n {
            return Err(Error::InvalidAssignment(format!("declared n = {} but multiplicities sum to {}", raw.n, a.n)));
        }
        Ok(a)
    }
}

impl From<EigenvalueAssignment> for RawAssignment {
    fn from(a: EigenvalueAssignment) -> Self {
        RawAssignment {
            flavor: a.flavor,
            n: a.n,
            classes: a
                .classes
                .into_iter()
                .map(|c| c.into_iter().map(|(value, mult)| EigenvalueEntry { value, mult }).collect())
                .collect(),
        }
    }
}

impl EigenvalueAssignment {
    /// Validates equal totals per matrix, positive multiplicities and
    /// distinct values (distinct modulo ℤ for exponents).
    pub fn new(flavor: Flavor, classes: Vec<Vec<(ExactComplexRational, usize)>>) -> Result<Self> {
        if classes.is_empty() {
            return Err(Error::InvalidAssignment("no classes".into()));
        }
        let n: usize = classes[0].iter().map(|(_, m)| m).sum();
        for (j, class) in classes.iter().enumerate() {
            if class.iter().any(|(_, m)| *m == 0) {
                return Err(Error::InvalidAssignment(format!("class {j} has a zero multiplicity")));
            }
            let total: usize = class.iter().map(|(_, m)| m).sum();
            if total != n {
                return Err(Error::InvalidAssignment(format!(
                    "class {j} has total multiplicity {total}, expected {n}"
                )));
            }
            for (a, (va, _)) in class.iter().enumerate() {
                for (vb, _) in &class[a + 1..] {
                    let same = match flavor {
                        Flavor::Additive => va == vb,
                        Flavor::Multiplicative => (va - vb).is_integer(),
                    };
                    if same {
                        return Err(Error::InvalidAssignment(format!("class {j} repeats eigenvalue {va}")));
                    }
                }
            }
        }
        Ok(EigenvalueAssignment { flavor, n, classes })
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn classes(&self) -> &[Vec<(ExactComplexRational, usize)>] {
        &self.classes
    }

    /// Multiplicity vector of every class, sorted.
    pub fn pmv(&self) -> Vec<MultiplicityVector> {
        self.classes
            .iter()
            .map(|c| MultiplicityVector::new(c.iter().map(|(_, m)| *m).collect()).expect("positive"))
            .collect()
    }

    /// Weighted sum of all eigenvalues (exponents in the multiplicative case).
    pub fn total(&self) -> ExactComplexRational {
        self.classes.iter().flat_map(|c| c.iter()).map(|(v, m)| v * *m).sum()
    }

    /// Every value multiplied by `c`.
    pub fn scaled(&self, c: &num_rational::BigRational) -> Self {
        let classes =
            self.classes.iter().map(|cl| cl.iter().map(|(v, m)| (v.scale_rational(c), *m)).collect()).collect();
        EigenvalueAssignment { flavor: self.flavor, n: self.n, classes }
    }
}

/// Trace/determinant condition: the weighted eigenvalue sum is 0, or the
/// weighted exponent sum is an integer.
pub fn check_sum_condition(a: &EigenvalueAssignment) -> bool {
    let total = a.total();
    match a.flavor {
        Flavor::Additive => total.is_zero(),
        Flavor::Multiplicative => total.is_integer(),
    }
}

/// What counts as a relation holding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationTest {
    /// The chosen sum is exactly zero.
    ExactZero,
    /// The chosen sum is an integer.
    IntegerSum,
}

impl RelationTest {
    pub fn natural(flavor: Flavor) -> Self {
        match flavor {
            Flavor::Additive => RelationTest::ExactZero,
            Flavor::Multiplicative => RelationTest::IntegerSum,
        }
    }

    fn holds(self, sum: &ExactComplexRational) -> bool {
        match self {
            RelationTest::ExactZero => sum.is_zero(),
            RelationTest::IntegerSum => sum.is_integer(),
        }
    }

    fn key(self, sum: ExactComplexRational) -> ExactComplexRational {
        match self {
            RelationTest::ExactZero => sum,
            RelationTest::IntegerSum => sum.mod_one(),
        }
    }
}

/// Inclusive range of relation sizes `s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SRange {
    pub min: usize,
    pub max: usize,
}

impl SRange {
    /// `1 ≤ s ≤ n − 1`.
    pub fn full(n: usize) -> Self {
        SRange { min: 1, max: n.saturating_sub(1) }
    }

    /// The literal range `1 < s < n`. Under the sum condition a relation of
    /// size `n − 1` still forces its complement of size 1, so this only
    /// differs from [`SRange::full`] in which witnesses get reported.
    pub fn strict(n: usize) -> Self {
        SRange { min: 2, max: n.saturating_sub(1) }
    }

    fn validate(self, n: usize) -> Result<()> {
        if self.min == 0 || self.max > n.saturating_sub(1) {
            return Err(Error::InvalidAssignment(format!(
                "relation sizes must lie in 1..={}, got {}..={}",
                n.saturating_sub(1),
                self.min,
                self.max
            )));
        }
        Ok(())
    }

    pub fn sizes(self) -> std::ops::RangeInclusive<usize> {
        self.min..=self.max
    }
}

/// One relation: sub-multiplicities chosen from every class.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RelationWitness {
    pub s: usize,
    /// `choices[j][k]` eigenvalues equal to the `k`-th value of class `j`.
    pub choices: Vec<Vec<usize>>,
    pub sum: ExactComplexRational,
}

impl RelationWitness {
    /// The relation on the complementary choices.
    pub fn complement(&self, a: &EigenvalueAssignment) -> RelationWitness {
        let choices: Vec<Vec<usize>> = self
            .choices
            .iter()
            .zip(a.classes())
            .map(|(c, class)| c.iter().zip(class).map(|(k, (_, m))| m - k).collect())
            .collect();
        RelationWitness { s: a.n() - self.s, choices, sum: &a.total() - &self.sum }
    }
}

/// Sub-multiplicity vectors of `class` with total `s`, with their sums.
fn choices_of_size(class: &[(ExactComplexRational, usize)], s: usize) -> Vec<(Vec<usize>, ExactComplexRational)> {
    let mut out = Vec::new();
    let mut current = vec![0usize; class.len()];
    fn rec(
        class: &[(ExactComplexRational, usize)],
        idx: usize,
        remaining: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<(Vec<usize>, ExactComplexRational)>,
    ) {
        if idx == class.len() {
            if remaining == 0 {
                let sum = current.iter().zip(class).map(|(&k, (v, _))| v * k).sum();
                out.push((current.clone(), sum));
            }
            return;
        }
        let tail: usize = class[idx + 1..].iter().map(|(_, m)| m).sum();
        let lo = remaining.saturating_sub(tail);
        for k in lo..=class[idx].1.min(remaining) {
            current[idx] = k;
            rec(class, idx + 1, remaining - k, current, out);
        }
        current[idx] = 0;
    }
    rec(class, 0, s, &mut current, &mut out);
    out
}

fn product(counts: &[usize]) -> u128 {
    counts.iter().fold(1u128, |acc, &c| acc.saturating_mul(c as u128))
}

/// Calls `f` for each combination (one index per list) with the index vector.
fn for_each_combination<F: FnMut(&[usize]) -> ControlFlow<()>>(counts: &[usize], mut f: F) -> ControlFlow<()> {
    if counts.contains(&0) {
        return ControlFlow::Continue(());
    }
    let mut idx = vec![0usize; counts.len()];
    loop {
        f(&idx)?;
        let mut pos = counts.len();
        loop {
            if pos == 0 {
                return ControlFlow::Continue(());
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < counts[pos] {
                break;
            }
            idx[pos] = 0;
        }
    }
}

struct SizeScan {
    per_class: Vec<Vec<(Vec<usize>, ExactComplexRational)>>,
    split: usize,
}

impl SizeScan {
    fn new(a: &EigenvalueAssignment, s: usize) -> Self {
        let per_class: Vec<_> = a.classes.iter().map(|c| choices_of_size(c, s)).collect();
        let counts: Vec<usize> = per_class.iter().map(Vec::len).collect();
        // split point minimizing tabulated + probed work
        let split =
            (1..counts.len()).min_by_key(|&h| product(&counts[..h]).saturating_add(product(&counts[h..]))).unwrap_or(1);
        SizeScan { per_class, split }
    }

    fn work(&self) -> u128 {
        let counts: Vec<usize> = self.per_class.iter().map(Vec::len).collect();
        product(&counts[..self.split]).saturating_add(product(&counts[self.split..]))
    }

    fn run<F: FnMut(RelationWitness) -> ControlFlow<()>>(
        &self,
        s: usize,
        test: RelationTest,
        mut f: F,
    ) -> ControlFlow<()> {
        let (left, right) = self.per_class.split_at(self.split);
        let left_counts: Vec<usize> = left.iter().map(Vec::len).collect();
        let right_counts: Vec<usize> = right.iter().map(Vec::len).collect();

        let mut table: HashMap<ExactComplexRational, Vec<Vec<usize>>> = HashMap::new();
        let _ = for_each_combination(&left_counts, |idx| {
            let sum: ExactComplexRational = idx.iter().zip(left).map(|(&i, c)| c[i].1.clone()).sum();
            table.entry(test.key(sum)).or_default().push(idx.to_vec());
            ControlFlow::Continue(())
        });

        for_each_combination(&right_counts, |ridx| {
            let rsum: ExactComplexRational = ridx.iter().zip(right).map(|(&i, c)| c[i].1.clone()).sum();
            let Some(matches) = table.get(&test.key(-&rsum)) else {
                return ControlFlow::Continue(());
            };
            for lidx in matches {
                let mut choices = Vec::with_capacity(self.per_class.len());
                let mut sum = rsum.clone();
                for (&i, c) in lidx.iter().zip(left) {
                    choices.push(c[i].0.clone());
                    sum += &c[i].1;
                }
                for (&i, c) in ridx.iter().zip(right) {
                    choices.push(c[i].0.clone());
                }
                debug_assert!(test.holds(&sum));
                f(RelationWitness { s, choices, sum })?;
            }
            ControlFlow::Continue(())
        })
    }
}

fn plan(a: &EigenvalueAssignment, range: SRange, budget: u128) -> Result<Vec<(usize, SizeScan)>> {
    range.validate(a.n)?;
    let mut scans = Vec::new();
    let mut needed = 0u128;
    for s in range.sizes() {
        let scan = SizeScan::new(a, s);
        needed = needed.saturating_add(scan.work());
        scans.push((s, scan));
    }
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    Ok(scans)
}

/// Every relation of size in `range` that holds under `test`, sorted.
pub fn violated_relations_with(
    a: &EigenvalueAssignment,
    range: SRange,
    test: RelationTest,
    budget: u128,
) -> Result<Vec<RelationWitness>> {
    let scans = plan(a, range, budget)?;
    let mut out = Vec::new();
    let mut overflow = false;
    for (s, scan) in &scans {
        let flow = scan.run(*s, test, |w| {
            out.push(w);
            if out.len() as u128 > budget {
                overflow = true;
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        if flow.is_break() {
            break;
        }
    }
    if overflow {
        return Err(Error::BudgetExceeded { needed: out.len() as u128, budget });
    }
    out.sort_by(|a, b| (a.s, &a.choices).cmp(&(b.s, &b.choices)));
    Ok(out)
}

/// Relations violated by `a` under the test natural to its flavor. The
/// assignment is generic over `range` iff the result is empty.
pub fn violated_relations(a: &EigenvalueAssignment, range: SRange, budget: u128) -> Result<Vec<RelationWitness>> {
    violated_relations_with(a, range, RelationTest::natural(a.flavor), budget)
}

/// First relation found, or `None`; stops at the first hit.
pub fn first_violated_relation(
    a: &EigenvalueAssignment,
    range: SRange,
    test: RelationTest,
    budget: u128,
) -> Result<Option<RelationWitness>> {
    let scans = plan(a, range, budget)?;
    for (s, scan) in &scans {
        let mut found = None;
        let _ = scan.run(*s, test, |w| {
            found = Some(w);
            ControlFlow::Break(())
        });
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub generic: bool,
    /// Additive only: no relation holds even modulo ℤ.
    pub strongly_generic: Option<bool>,
    /// Additive only: no two eigenvalues of one matrix differ by a non-zero
    /// integer.
    pub non_resonant: Option<bool>,
}

pub fn is_non_resonant(a: &EigenvalueAssignment) -> bool {
    a.classes.iter().all(|class| {
        class.iter().enumerate().all(|(i, (u, _))| {
            class[i + 1..].iter().all(|(v, _)| {
                let d = u - v;
                d.is_zero() || !d.is_integer()
            })
        })
    })
}

pub fn classify(a: &EigenvalueAssignment, range: SRange, budget: u128) -> Result<Classification> {
    let generic = first_violated_relation(a, range, RelationTest::natural(a.flavor), budget)?.is_none();
    Ok(match a.flavor {
        Flavor::Additive => Classification {
            generic,
            strongly_generic: Some(first_violated_relation(a, range, RelationTest::IntegerSum, budget)?.is_none()),
            non_resonant: Some(is_non_resonant(a)),
        },
        Flavor::Multiplicative => Classification { generic, strongly_generic: None, non_resonant: None },
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerOptions {
    pub seed: u64,
    /// Relation sizes to exclude; `None` means `1..=n−1`.
    pub range: Option<SRange>,
    /// Target integer for the exponent sum in the multiplicative flavor.
    pub exponent_sum: i64,
    pub max_retries: usize,
    pub budget: u128,
}

impl Default for SamplerOptions {
    fn default() -> Self {
        SamplerOptions { seed: 0, range: None, exponent_sum: 1, max_retries: 200, budget: DEFAULT_BUDGET }
    }
}

fn sampler_primes() -> Vec<i64> {
    const LO: usize = 1009;
    const HI: usize = 9973;
    let mut sieve = vec![true; HI + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= HI {
        if sieve[i] {
            let mut k = i * i;
            while k <= HI {
                sieve[k] = false;
                k += i;
            }
        }
        i += 1;
    }
    (LO..=HI).filter(|&k| sieve[k]).map(|k| k as i64).collect()
}

/// Draws a verified-generic assignment with the given multiplicities.
///
/// Values are random rationals in `[-1, 1]` with prime denominators above
/// 1000. The last value is solved for so that the sum condition holds, then
/// the whole assignment is checked against every relation in range.
pub fn sample_generic(
    pmv: &[MultiplicityVector],
    flavor: Flavor,
    opts: &SamplerOptions,
) -> Result<EigenvalueAssignment> {
    if pmv.len() < 2 {
        return Err(Error::InvalidAssignment("need at least two classes".into()));
    }
    let n = pmv[0].length();
    if pmv.iter().any(|mv| mv.length() != n) {
        return Err(Error::InvalidAssignment("multiplicity vectors have different lengths".into()));
    }
    let g = pmv_gcd(pmv);
    if flavor == Flavor::Additive && g > 1 {
        return Err(Error::NonSimplePmv(g));
    }
    let range = opts.range.unwrap_or(SRange::full(n));
    let primes = sampler_primes();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let target = match flavor {
        Flavor::Additive => ExactComplexRational::zero(),
        Flavor::Multiplicative => ExactComplexRational::from_integer(opts.exponent_sum),
    };

    for _ in 0..opts.max_retries {
        let mut classes: Vec<Vec<(ExactComplexRational, usize)>> = pmv
            .iter()
            .map(|mv| {
                mv.components()
                    .iter()
                    .map(|&m| {
                        let q = primes[rng.random_range(0..primes.len())];
                        (ExactComplexRational::from_ratio(rng.random_range(-q..=q), q), m)
                    })
                    .collect()
            })
            .collect();
        let last_class = classes.len() - 1;
        let last_idx = classes[last_class].len() - 1;
        let last_mult = classes[last_class][last_idx].1;
        let rest: ExactComplexRational = classes
            .iter()
            .enumerate()
            .flat_map(|(j, c)| c.iter().enumerate().map(move |(k, e)| (j, k, e)))
            .filter(|&(j, k, _)| (j, k) != (last_class, last_idx))
            .map(|(_, _, (v, m))| v * *m)
            .sum();
        classes[last_class][last_idx].0 = (&target - &rest).div_int(last_mult as i64);

        let Ok(candidate) = EigenvalueAssignment::new(flavor, classes) else {
            continue;
        };
        debug_assert!(check_sum_condition(&candidate));
        if first_violated_relation(&candidate, range, RelationTest::natural(flavor), opts.budget)?.is_none() {
            return Ok(candidate);
        }
    }
    Err(Error::RetriesExhausted(opts.max_retries))
}
