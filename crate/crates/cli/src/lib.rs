//! Command implementations behind the `dspkit` binary.
//!
//! Every command reads JSON problem files, writes one JSON document to stdout
//! and maps its outcome to an exit code. The output types live here so that
//! they can be parsed back.

use std::fmt;
use std::path::Path;

use dspkit::{
    adjacency_chain, apply_sl, check_sum_condition, classify, decide, nice_nilpotent_exists, psi_chain, sample_generic,
    violated_relations, ClassTuple, Classification, Decision, EigenvalueAssignment, PaddedPartition, Partition,
    ProblemFile, PsiTrace, RelationWitness, SLOperation, SRange, SamplerOptions, SolverOptions, Verdict,
    DEFAULT_BUDGET,
};
use dspkit_numeric::{build_tuple, verify, MatrixTuple, VerificationReport, VerifyOptions, Witness};
use serde::{Deserialize, Serialize};

pub mod exit {
    pub const OK: i32 = 0;
    pub const NEGATIVE: i32 = 1;
    pub const OUT_OF_SCOPE: i32 = 2;
    pub const INPUT: i32 = 3;
}

/// A command that ends with a diagnostic on stderr and nothing on stdout.
#[derive(Debug)]
pub struct CmdError {
    pub message: String,
    pub code: i32,
}

impl fmt::Display for CmdError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CmdError {}

macro_rules! input_err {
    ($($arg:tt)*) => { CmdError { message: format!($($arg)*), code: exit::INPUT } };
}

pub type CmdResult<T> = Result<T, CmdError>;

pub fn read_problem(path: &Path) -> CmdResult<ProblemFile> {
    let text = std::fs::read_to_string(path).map_err(|e| input_err!("{}: {e}", path.display()))?;
    let problem: ProblemFile = serde_json::from_str(&text).map_err(|e| input_err!("{}: {e}", path.display()))?;
    if let Some(s) = &problem.solver {
        s.validate().map_err(|e| input_err!("{}: {e}", path.display()))?;
    }
    Ok(problem)
}

fn tuple_of(problem: &ProblemFile) -> CmdResult<ClassTuple> {
    problem.to_tuple().map_err(|e| input_err!("{e}"))
}

/// Parses `MIN:MAX`.
pub fn parse_s_range(text: &str) -> Result<SRange, String> {
    let (lo, hi) = text.split_once(':').ok_or_else(|| format!("expected MIN:MAX, got {text:?}"))?;
    let min = lo.trim().parse().map_err(|e| format!("bad MIN in {text:?}: {e}"))?;
    let max = hi.trim().parse().map_err(|e| format!("bad MAX in {text:?}: {e}"))?;
    Ok(SRange { min, max })
}

/// Parses comma-separated block sizes; zeros are kept.
pub fn parse_padded(text: &str) -> Result<PaddedPartition, String> {
    let parts = text
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|e| format!("bad block size in {text:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PaddedPartition::new(parts))
}

pub fn parse_partition(text: &str) -> Result<Partition, String> {
    Partition::new(parse_padded(text)?.parts().to_vec()).map_err(|e| e.to_string())
}

/// Which relation sizes the genericity checks look at.
#[derive(Clone, Copy, Debug, Default)]
pub enum RangeChoice {
    #[default]
    Full,
    Literal,
    Custom(SRange),
}

impl RangeChoice {
    pub fn resolve(self, n: usize) -> SRange {
        match self {
            RangeChoice::Full => SRange::full(n),
            RangeChoice::Literal => SRange::strict(n),
            RangeChoice::Custom(r) => r,
        }
    }
}

pub fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::Solvable | Verdict::WeaklySolvable => exit::OK,
        Verdict::NotSolvable | Verdict::NotWeaklySolvable => exit::NEGATIVE,
        Verdict::OutOfTheoremScope => exit::OUT_OF_SCOPE,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EigenvalueReport {
    pub range: SRange,
    pub sum_condition: bool,
    pub classification: Classification,
    pub first_violation: Option<RelationWitness>,
}

fn eigenvalue_report(a: &EigenvalueAssignment, range: SRange) -> CmdResult<EigenvalueReport> {
    let classification = classify(a, range, DEFAULT_BUDGET).map_err(|e| input_err!("{e}"))?;
    let first_violation = if classification.generic {
        None
    } else {
        violated_relations(a, range, DEFAULT_BUDGET).map_err(|e| input_err!("{e}"))?.into_iter().next()
    };
    Ok(EigenvalueReport { range, sum_condition: check_sum_condition(a), classification, first_violation })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecideOutput {
    pub decision: Decision,
    /// Present when the file gives eigenvalues.
    pub eigenvalues: Option<EigenvalueReport>,
}

pub fn cmd_decide(problem: &ProblemFile, range: RangeChoice) -> CmdResult<(DecideOutput, i32)> {
    let t = tuple_of(problem)?;
    let decision = decide(&t, problem.mode);
    let eigenvalues = match t.eigenvalues() {
        Some(a) if t.n() > 1 => Some(eigenvalue_report(a, range.resolve(t.n()))?),
        _ => None,
    };
    let code = verdict_code(decision.verdict);
    Ok((DecideOutput { decision, eigenvalues }, code))
}

/// Human-readable Ψ stages.
pub fn render_trace(trace: &PsiTrace) -> String {
    let mut out = String::new();
    for (i, stage) in trace.stages.iter().enumerate() {
        let c = &stage.conditions;
        let shapes: Vec<String> = stage.forms.iter().map(|f| f.to_diagonal().to_string()).collect();
        out.push_str(&format!(
            "stage {i}: n = {}, classes {}, r = {:?}, d = {:?}, kappa = {}, alpha {}, beta {}, omega {}\n",
            stage.n,
            shapes.join(" "),
            c.r,
            c.d,
            c.kappa,
            if c.alpha_strict {
                "strict"
            } else if c.alpha_holds {
                "equality"
            } else {
                "fails"
            },
            c.beta_holds,
            c.omega_holds,
        ));
        if let Some(next) = trace.stages.get(i + 1) {
            out.push_str(&format!("  psi: n1 = {}\n", next.n));
        }
    }
    out.push_str(&format!("stop: {:?}\n", trace.stop_reason));
    out
}

pub fn cmd_reduce(problem: &ProblemFile) -> CmdResult<PsiTrace> {
    let t = tuple_of(problem)?;
    psi_chain(t.forms()).map_err(|e| input_err!("{e}"))
}

/// Attaches sampled values to the classes of `t`, matching them up by
/// multiplicity.
fn attach(t: &ClassTuple, sampled: &EigenvalueAssignment) -> CmdResult<ClassTuple> {
    let mut classes = Vec::with_capacity(t.len());
    for (form, pool) in t.forms().iter().zip(sampled.classes()) {
        let mut pool: Vec<Option<_>> = pool.iter().cloned().map(Some).collect();
        let mut class = Vec::new();
        for m in form.multiplicities() {
            let slot = pool
                .iter_mut()
                .find(|e| matches!(e, Some((_, k)) if *k == m))
                .expect("sampled multiplicities match the form");
            class.push(slot.take().expect("slot is filled"));
        }
        classes.push(class);
    }
    let a = EigenvalueAssignment::new(t.flavor(), classes).map_err(|e| input_err!("{e}"))?;
    t.clone().with_eigenvalues(a).map_err(|e| input_err!("{e}"))
}

pub fn cmd_sample_generic(
    problem: &ProblemFile,
    seed: u64,
    range: RangeChoice,
    exponent_sum: i64,
) -> CmdResult<ProblemFile> {
    let mut bare = problem.clone();
    for class in &mut bare.classes {
        for e in &mut class.eigenvalues {
            e.value = None;
        }
    }
    let t = tuple_of(&bare)?;
    let opts = SamplerOptions { seed, range: Some(range.resolve(t.n())), exponent_sum, ..Default::default() };
    let a = sample_generic(&t.eigenvalue_pmv(), t.flavor(), &opts).map_err(|e| input_err!("{e}"))?;
    let t = attach(&t, &a)?;
    let mut out = ProblemFile::from_tuple(&t, problem.mode);
    out.solver = problem.solver.clone();
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenericityOutput {
    pub range: SRange,
    pub sum_condition: bool,
    pub classification: Classification,
    pub violated: Vec<RelationWitness>,
}

pub fn cmd_check_generic(problem: &ProblemFile, range: RangeChoice) -> CmdResult<(GenericityOutput, i32)> {
    let t = tuple_of(problem)?;
    let a = t.eigenvalues().ok_or_else(|| input_err!("the problem file gives no eigenvalue values"))?;
    let range = range.resolve(t.n());
    let classification = classify(a, range, DEFAULT_BUDGET).map_err(|e| input_err!("{e}"))?;
    let violated = violated_relations(a, range, DEFAULT_BUDGET).map_err(|e| input_err!("{e}"))?;
    let sum_condition = check_sum_condition(a);
    let code = if sum_condition && classification.generic { exit::OK } else { exit::NEGATIVE };
    Ok((GenericityOutput { range, sum_condition, classification, violated }, code))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitChainOutput {
    pub from: PaddedPartition,
    pub to: PaddedPartition,
    pub comparable: bool,
    pub operations: Vec<SLOperation>,
    /// Partitions visited, starting at `from` with zeros dropped.
    pub path: Vec<PaddedPartition>,
}

pub fn cmd_orbit_chain(from: &PaddedPartition, to: &PaddedPartition) -> CmdResult<(OrbitChainOutput, i32)> {
    let comparable = dspkit::closure_leq(from, to).map_err(|e| input_err!("{e}"))?;
    let mut out =
        OrbitChainOutput { from: from.clone(), to: to.clone(), comparable, operations: Vec::new(), path: Vec::new() };
    if !comparable {
        return Ok((out, exit::NEGATIVE));
    }
    out.operations = adjacency_chain(from, to).map_err(|e| input_err!("{e}"))?;
    let mut current = PaddedPartition::from(from.without_zeros());
    out.path.push(current.clone());
    for op in &out.operations {
        current = apply_sl(&current, *op).map_err(|e| input_err!("{e}"))?;
        out.path.push(current.clone());
    }
    Ok((out, exit::OK))
}

pub fn cmd_nilpotent_check(partitions: &[Partition]) -> CmdResult<(Decision, i32)> {
    let n = partitions.first().map_or(0, Partition::size);
    let d = nice_nilpotent_exists(partitions, n).map_err(|e| input_err!("{e}"))?;
    let code = verdict_code(d.verdict);
    Ok((d, code))
}

/// Settings for `realize` beyond those in the problem file.
#[derive(Clone, Copy, Debug, Default)]
pub struct RealizeFlags {
    pub seed: Option<u64>,
    pub force: bool,
}

/// Solver settings from the file, overridden by flags.
pub fn solver_options(problem: &ProblemFile, flags: RealizeFlags) -> SolverOptions {
    let mut opts = problem.solver.clone().unwrap_or_default();
    if let Some(seed) = flags.seed {
        opts.seed = seed;
    }
    opts.force |= flags.force;
    opts
}

/// Exit 0 with a certified witness, 1 when the solver gives up, 2 when the
/// classes are not decided solvable.
pub fn cmd_realize(problem: &ProblemFile, flags: RealizeFlags) -> CmdResult<Witness> {
    use dspkit_numeric::Error;
    let t = tuple_of(problem)?;
    let opts = solver_options(problem, flags);
    build_tuple(&t, &opts).map_err(|e| {
        let code = match e {
            Error::SolverFailed { .. } => exit::NEGATIVE,
            Error::DecidedUnsolvable { .. } => exit::OUT_OF_SCOPE,
            _ => exit::INPUT,
        };
        CmdError { message: e.to_string(), code }
    })
}

/// Tuple files are either a bare tuple or the output of `realize`.
#[derive(Deserialize)]
#[serde(untagged)]
enum TupleFile {
    Witness(Box<Witness>),
    Bare(Box<MatrixTuple>),
}

pub fn read_tuple(path: &Path) -> CmdResult<MatrixTuple> {
    let text = std::fs::read_to_string(path).map_err(|e| input_err!("{}: {e}", path.display()))?;
    match serde_json::from_str(&text).map_err(|e| input_err!("{}: {e}", path.display()))? {
        TupleFile::Witness(w) => Ok(w.tuple),
        TupleFile::Bare(t) => Ok(*t),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyOutput {
    pub report: VerificationReport,
    pub residual_target: f64,
    pub certified: bool,
}

pub fn cmd_verify(tuple: &MatrixTuple, problem: &ProblemFile) -> CmdResult<(VerifyOutput, i32)> {
    let t = tuple_of(problem)?;
    if t.eigenvalues().is_none() {
        return Err(input_err!("the problem file gives no eigenvalue values"));
    }
    if tuple.declared_classes() != &t {
        return Err(input_err!("the tuple was built for different classes than the problem file describes"));
    }
    let solver = problem.solver.clone().unwrap_or_default();
    let opts = VerifyOptions {
        rank_tolerance: solver.rank_tolerance.unwrap_or(VerifyOptions::default().rank_tolerance),
        ..Default::default()
    };
    // an inconsistent report is a numerical failure, not bad input
    let report = verify(tuple, &opts).map_err(|e| CmdError { message: e.to_string(), code: exit::NEGATIVE })?;
    let residual_target = solver.residual_target_for(t.flavor());
    let certified = report.certifies(residual_target);
    let code = if certified { exit::OK } else { exit::NEGATIVE };
    Ok((VerifyOutput { report, residual_target, certified }, code))
}
