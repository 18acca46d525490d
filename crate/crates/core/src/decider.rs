//! Conditions (α), (β), (ω), the reduction Ψ and the resulting verdicts.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jordan::{pmv_gcd, ClassTuple, Flavor, JordanNormalForm, Label};
use crate::partition::Partition;
use crate::rational::ExactComplexRational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionsReport {
    pub n: usize,
    pub r: Vec<usize>,
    pub d: Vec<usize>,
    /// `Σ d_j ≥ 2n² − 2`
    pub alpha_holds: bool,
    pub alpha_strict: bool,
    /// `Σ_{i≠j} r_i ≥ n` for every `j`
    pub beta_holds: bool,
    /// `Σ r_j ≥ 2n`
    pub omega_holds: bool,
    /// Index of rigidity `2n² − Σ d_j`.
    pub kappa: i64,
}

impl ConditionsReport {
    pub fn alpha_equality(&self) -> bool {
        self.alpha_holds && !self.alpha_strict
    }
}

fn common_size(forms: &[JordanNormalForm]) -> Result<usize> {
    let first = forms.first().ok_or_else(|| Error::InvalidTuple("empty tuple".into()))?;
    let n = first.n();
    if let Some(f) = forms.iter().find(|f| f.n() != n) {
        return Err(Error::InvalidTuple(format!("sizes differ: {n} vs {}", f.n())));
    }
    Ok(n)
}

pub fn evaluate_conditions(forms: &[JordanNormalForm]) -> Result<ConditionsReport> {
    let n = common_size(forms)?;
    let r: Vec<usize> = forms.iter().map(JordanNormalForm::rank_defect).collect();
    let d: Vec<usize> = forms.iter().map(JordanNormalForm::orbit_dimension).collect();
    let sum_r: usize = r.iter().sum();
    let sum_d = d.iter().sum::<usize>() as i64;
    let bound = 2 * (n * n) as i64 - 2;
    let beta_holds = r.iter().all(|rj| sum_r - rj >= n);
    Ok(ConditionsReport {
        n,
        alpha_holds: sum_d >= bound,
        alpha_strict: sum_d > bound,
        beta_holds,
        omega_holds: sum_r >= 2 * n,
        kappa: bound + 2 - sum_d,
        r,
        d,
    })
}

/// One application of Ψ with an explicit label per class.
///
/// The chosen label must have the maximal number of blocks in its form.
pub fn psi_step_with_labels(forms: &[JordanNormalForm], labels: &[Label]) -> Result<(Vec<JordanNormalForm>, usize)> {
    let c = evaluate_conditions(forms)?;
    if c.n <= 1 {
        return Err(Error::PsiUndefined("size is 1".into()));
    }
    if !c.beta_holds {
        return Err(Error::PsiUndefined("(β) fails".into()));
    }
    if c.omega_holds {
        return Err(Error::PsiUndefined("(ω) holds".into()));
    }
    if labels.len() != forms.len() {
        return Err(Error::PsiUndefined("one label per class required".into()));
    }
    let n1 = c.r.iter().sum::<usize>() - c.n;
    let k = c.n - n1;
    let image = forms
        .iter()
        .zip(labels)
        .map(|(f, &label)| {
            if f.blocks_of(label).map(Partition::len) != Some(f.max_block_count()) {
                return Err(Error::PsiUndefined(format!("{label} does not have the most blocks in {f}")));
            }
            f.shrink_smallest(label, k)
        })
        .collect::<Result<Vec<_>>>()?;
    debug_assert!(image.iter().all(|f| f.n() == n1));
    Ok((image, n1))
}

/// One application of Ψ; ties between labels go to the lowest label.
pub fn psi_step(forms: &[JordanNormalForm]) -> Result<(Vec<JordanNormalForm>, usize)> {
    let labels: Vec<Label> = forms.iter().map(|f| f.max_count_label().expect("non-empty form")).collect();
    psi_step_with_labels(forms, &labels)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    OmegaHolds,
    BetaFails,
    SizeOne,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PsiStage {
    pub n: usize,
    pub forms: Vec<JordanNormalForm>,
    pub conditions: ConditionsReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PsiTrace {
    pub stages: Vec<PsiStage>,
    pub stop_reason: StopReason,
}

impl PsiTrace {
    pub fn first(&self) -> &PsiStage {
        &self.stages[0]
    }

    pub fn last(&self) -> &PsiStage {
        self.stages.last().expect("at least one stage")
    }

    /// `n_s`.
    pub fn final_size(&self) -> usize {
        self.last().n
    }

    /// (β) at the start, and (ω) or size 1 at the end.
    pub fn criterion_holds(&self) -> bool {
        self.first().conditions.beta_holds && (self.last().conditions.omega_holds || self.last().n == 1)
    }
}

pub fn psi_chain(forms: &[JordanNormalForm]) -> Result<PsiTrace> {
    let mut current = forms.to_vec();
    let mut stages = Vec::new();
    loop {
        let conditions = evaluate_conditions(&current)?;
        let n = conditions.n;
        let stop = if n == 1 {
            Some(StopReason::SizeOne)
        } else if conditions.omega_holds {
            Some(StopReason::OmegaHolds)
        } else if !conditions.beta_holds {
            Some(StopReason::BetaFails)
        } else {
            None
        };
        let next = if stop.is_none() { Some(psi_step(&current)?.0) } else { None };
        stages.push(PsiStage { n, forms: std::mem::take(&mut current), conditions });
        match (stop, next) {
            (Some(stop_reason), _) => return Ok(PsiTrace { stages, stop_reason }),
            (None, Some(f)) => current = f,
            (None, None) => unreachable!(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Solvable,
    NotSolvable,
    WeaklySolvable,
    NotWeaklySolvable,
    OutOfTheoremScope,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Solvable => "solvable",
            Verdict::NotSolvable => "not solvable",
            Verdict::WeaklySolvable => "weakly solvable",
            Verdict::NotWeaklySolvable => "not weakly solvable",
            Verdict::OutOfTheoremScope => "out of theorem scope",
        };
        f.write_str(s)
    }
}

/// The result that justifies a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremId {
    /// Generic eigenvalues, simple multiplicities.
    Generic,
    /// Multiplicative, non-simple multiplicities, block-count gcd 1.
    GenericBis,
    /// Weak solvability for arbitrary eigenvalues.
    NonGenericEigenvalues,
    /// Nice nilpotent or unipotent tuples.
    NilpotentUnipotent,
    /// Non-simple additive multiplicities admit no generic eigenvalues.
    NoGenericEigenvalues,
    /// `n = 1`: every tuple of scalars summing to 0 is irreducible.
    SizeOne,
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecisionMode {
    Generic,
    AnyWeak,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decision {
    pub verdict: Verdict,
    pub theorem_used: TheoremId,
    pub trace: PsiTrace,
    pub notes: Vec<String>,
}

const COUNTEREXAMPLE_NOTE: &str = "(α) is an equality: the criterion does not characterize weak solvability here; \
     e.g. for three rank-1 nilpotent 2×2 matrices with zero sum the criterion holds, yet every such triple is \
     upper-triangular with centralizer spanned by I and E12";

pub fn decide(t: &ClassTuple, mode: DecisionMode) -> Decision {
    let trace = psi_chain(t.forms()).expect("class tuples have a common size");
    let mut notes = Vec::new();
    let criterion = trace.criterion_holds();
    let stage0 = trace.first().conditions.clone();

    if t.n() == 1 {
        let verdict = match mode {
            DecisionMode::Generic => Verdict::Solvable,
            DecisionMode::AnyWeak => Verdict::WeaklySolvable,
        };
        notes.push("1×1 tuples are irreducible whenever the sum condition holds".into());
        return Decision { verdict, theorem_used: TheoremId::SizeOne, trace, notes };
    }

    let (verdict, theorem_used) = match mode {
        DecisionMode::Generic => {
            let g = pmv_gcd(&t.eigenvalue_pmv());
            let d = t.block_count_gcd();
            let by_criterion = if criterion { Verdict::Solvable } else { Verdict::NotSolvable };
            if g == 1 {
                (by_criterion, TheoremId::Generic)
            } else {
                match t.flavor() {
                    Flavor::Additive => {
                        notes.push(format!(
                            "no generic eigenvalues exist: the multiplicities have gcd {g}, so the eigenvalue sum \
                             divided by {g} is itself a relation"
                        ));
                        (Verdict::NotSolvable, TheoremId::NoGenericEigenvalues)
                    }
                    Flavor::Multiplicative if d == 1 => (by_criterion, TheoremId::GenericBis),
                    Flavor::Multiplicative => {
                        notes.push(format!(
                            "multiplicities have gcd {g} and the block-count gcd is {d} > 1; this case is open"
                        ));
                        (Verdict::OutOfTheoremScope, TheoremId::None)
                    }
                }
            }
        }
        DecisionMode::AnyWeak => {
            let d = t.block_count_gcd();
            if d != 1 {
                notes.push(format!("block-count gcd is {d} > 1"));
                (Verdict::OutOfTheoremScope, TheoremId::None)
            } else if stage0.alpha_strict {
                if t.flavor() == Flavor::Multiplicative {
                    notes.push("for matrices M_j the criterion is only established for generic eigenvalues".into());
                }
                let v = if criterion { Verdict::WeaklySolvable } else { Verdict::NotWeaklySolvable };
                (v, TheoremId::NonGenericEigenvalues)
            } else if stage0.alpha_holds {
                notes.push(COUNTEREXAMPLE_NOTE.into());
                (Verdict::OutOfTheoremScope, TheoremId::None)
            } else {
                notes.push(
                    "(α) fails; it is necessary for irreducible tuples but the weak criterion needs it strict".into(),
                );
                (Verdict::OutOfTheoremScope, TheoremId::None)
            }
        }
    };
    Decision { verdict, theorem_used, trace, notes }
}

/// How shift tuples are searched in [`shifted_rank_bound`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftSearch {
    /// All but one shift are eigenvalues, the last one balances.
    EigenvalueShifts,
    /// Additionally lets two or more shifts avoid the spectrum.
    Exhaustive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftedRankBound {
    pub min_value: usize,
    /// Shift per class; `None` stands for a value outside the spectrum.
    /// In the multiplicative flavor the entries are exponents `c_j` and the
    /// shift is `b_j = exp(−2πi c_j)`.
    pub witness: Vec<Option<ExactComplexRational>>,
    pub ranks: Vec<usize>,
    /// `min_value ≥ 2n`
    pub holds: bool,
}

/// Minimizes `Σ rank(A_j − b_j I)` over shifts with `Σ b_j = 0`
/// (`Σ rank(b_j M_j − I)` over `Π b_j = 1` for the multiplicative flavor).
pub fn shifted_rank_bound(t: &ClassTuple, search: ShiftSearch) -> Result<ShiftedRankBound> {
    let a = t.eigenvalues().ok_or(Error::MissingEigenvalues)?;
    let n = t.n();
    let flavor = t.flavor();
    // (value, rank of the shifted matrix) per class
    let spectra: Vec<Vec<(ExactComplexRational, usize)>> = t
        .forms()
        .iter()
        .zip(a.classes())
        .map(|(f, class)| f.entries().iter().zip(class).map(|(e, (v, _))| (v.clone(), n - e.blocks.len())).collect())
        .collect();
    let rank_at = |j: usize, b: &ExactComplexRational| -> usize {
        spectra[j]
            .iter()
            .find(|(v, _)| match flavor {
                Flavor::Additive => v == b,
                Flavor::Multiplicative => (v - b).is_integer(),
            })
            .map_or(n, |(_, r)| *r)
    };

    let classes = spectra.len();
    let mut best: Option<ShiftedRankBound> = None;
    let mut offer = |ranks: Vec<usize>, witness: Vec<Option<ExactComplexRational>>| {
        let value = ranks.iter().sum();
        if best.as_ref().is_none_or(|b| value < b.min_value) {
            best = Some(ShiftedRankBound { min_value: value, witness, ranks, holds: value >= 2 * n });
        }
    };

    for j0 in 0..classes {
        let others: Vec<usize> = (0..classes).filter(|&j| j != j0).collect();
        let mut idx = vec![0usize; others.len()];
        loop {
            let mut witness = vec![None; classes];
            let mut ranks = vec![0; classes];
            let mut total = ExactComplexRational::zero();
            for (slot, &j) in others.iter().enumerate() {
                let (v, r) = &spectra[j][idx[slot]];
                total += v;
                ranks[j] = *r;
                witness[j] = Some(v.clone());
            }
            let balance = -total;
            ranks[j0] = rank_at(j0, &balance);
            witness[j0] = Some(balance);
            offer(ranks, witness);

            let limits: Vec<usize> = others.iter().map(|&j| spectra[j].len()).collect();
            if !advance(&mut idx, &limits) {
                break;
            }
        }
    }

    if search == ShiftSearch::Exhaustive {
        // two or more shifts off the spectrum can always be balanced
        for mask in 0u64..(1 << classes) {
            if mask.count_ones() < 2 {
                continue;
            }
            let mut ranks = vec![n; classes];
            let mut witness = vec![None; classes];
            for j in (0..classes).filter(|j| mask >> j & 1 == 0) {
                let (v, r) = spectra[j].iter().min_by_key(|(_, r)| *r).expect("non-empty");
                ranks[j] = *r;
                witness[j] = Some(v.clone());
            }
            offer(ranks, witness);
        }
    }
    Ok(best.expect("at least one candidate"))
}

/// Odometer step; false once every combination was visited.
fn advance(idx: &mut [usize], limits: &[usize]) -> bool {
    for pos in (0..idx.len()).rev() {
        idx[pos] += 1;
        if idx[pos] < limits[pos] {
            return true;
        }
        idx[pos] = 0;
    }
    false
}

/// Existence of nice nilpotent (or unipotent) tuples with the given block
/// partitions.
pub fn nice_nilpotent_exists(partitions: &[Partition], n: usize) -> Result<Decision> {
    if partitions.len() < 2 {
        return Err(Error::InvalidTuple("need at least two classes".into()));
    }
    if let Some(p) = partitions.iter().find(|p| p.size() != n) {
        return Err(Error::InvalidTuple(format!("partition {p} does not have size {n}")));
    }
    let forms: Vec<JordanNormalForm> =
        partitions.iter().map(|p| JordanNormalForm::single_eigenvalue(p.clone())).collect::<Result<_>>()?;
    let trace = psi_chain(&forms)?;
    let omega = trace.first().conditions.omega_holds;
    let mut notes = Vec::new();
    let verdict = if !omega {
        notes.push("(ω) fails".into());
        Verdict::NotSolvable
    } else if let Some(case) = exceptional_case(partitions, n) {
        notes.push(format!("exceptional case {case}: {}", EXCEPTIONS[case - 1].1));
        Verdict::OutOfTheoremScope
    } else {
        Verdict::Solvable
    };
    let theorem_used =
        if verdict == Verdict::OutOfTheoremScope { TheoremId::None } else { TheoremId::NilpotentUnipotent };
    Ok(Decision { verdict, theorem_used, trace, notes })
}

/// Equal block sizes per class, sorted decreasingly, and the size divisor.
const EXCEPTIONS: [(&[usize], &str, usize); 4] = [
    (&[2, 2, 2, 2], "n = 2k, k > 1, four classes with blocks of size 2", 2),
    (&[3, 3, 3], "n = 3k, k > 1, three classes with blocks of size 3", 3),
    (&[4, 4, 2], "n = 4k, k > 1, three classes with blocks of sizes 4, 4, 2", 4),
    (&[6, 3, 2], "n = 6k, k > 1, three classes with blocks of sizes 6, 3, 2", 6),
];

fn exceptional_case(partitions: &[Partition], n: usize) -> Option<usize> {
    let mut sizes = Vec::with_capacity(partitions.len());
    for p in partitions {
        let l = p.largest();
        if p.parts().iter().any(|&b| b != l) {
            return None;
        }
        sizes.push(l);
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    EXCEPTIONS.iter().position(|(l, _, m)| *l == sizes.as_slice() && n.is_multiple_of(*m) && n / m > 1).map(|i| i + 1)
}
