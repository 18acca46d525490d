//! Numerical witnesses: damped Gauss–Newton over conjugating matrices with
//! random restarts, and continuation along eigenvalue paths.

use dspkit::{
    check_sum_condition, classify, decide, ClassTuple, DecisionMode, EigenvalueAssignment, Flavor, JordanNormalForm,
    SRange, SolverOptions, Verdict, DEFAULT_BUDGET,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    c, class_eigenvalues, condition_number, jordan_matrices, jordan_matrix, smallest_right_singular_vectors, CMat,
};
use crate::objective::{apply_step, constraint, damped_step, jacobian, matrices, spectral_derivative, OrbitPoint};
use crate::tuple::MatrixTuple;
use crate::verify::{
    identify_classes_at, identify_jnf, verify, VerificationReport, VerifyOptions, DEFAULT_RANK_TOLERANCE,
};

/// Conjugators are rebalanced this often and rejected above this condition number.
const REBALANCE_EVERY: usize = 10;
const CONDITION_CAP: f64 = 1e6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub tuple: MatrixTuple,
    pub report: VerificationReport,
    /// Index of the restart that produced the tuple.
    pub restart: usize,
}

fn verify_options(opts: &SolverOptions) -> VerifyOptions {
    VerifyOptions { rank_tolerance: opts.rank_tolerance.unwrap_or(DEFAULT_RANK_TOLERANCE), ..Default::default() }
}

/// Column ranges of the eigenvalue groups of a form, and whether the group
/// is semisimple.
fn groups(form: &JordanNormalForm) -> Vec<(usize, usize, bool)> {
    let mut out = Vec::new();
    let mut pos = 0;
    for e in form.entries() {
        let m = e.blocks.size();
        out.push((pos, m, e.blocks.largest() == 1));
        pos += m;
    }
    out
}

/// Right-multiplies each `Q_j` by an element commuting with `D_j`, which
/// leaves `A_j` unchanged: semisimple groups get orthonormal columns, the
/// others a common scale. Returns the worst condition number afterwards.
fn rebalance(points: &mut [OrbitPoint], forms: &[JordanNormalForm]) -> f64 {
    let mut worst: f64 = 1.0;
    for (p, form) in points.iter_mut().zip(forms) {
        for (start, m, semisimple) in groups(form) {
            let cols = p.q.columns(start, m).into_owned();
            let replaced = if semisimple {
                cols.qr().q()
            } else {
                let norm = cols.norm();
                if norm == 0.0 {
                    continue;
                }
                cols * c((m as f64).sqrt() / norm, 0.0)
            };
            p.q.columns_mut(start, m).copy_from(&replaced);
        }
        worst = worst.max(condition_number(&p.q));
    }
    worst
}

struct SolveOutcome {
    points: Vec<OrbitPoint>,
    residual: f64,
}

/// Levenberg–Marquardt on the conjugators until the residual reaches `target`.
fn solve(
    flavor: Flavor,
    mut points: Vec<OrbitPoint>,
    forms: &[JordanNormalForm],
    max_iters: usize,
    target: f64,
) -> Option<SolveOutcome> {
    let mut mu = 1e-2;
    for it in 0..max_iters {
        let mats = matrices(&points)?;
        let f = constraint(flavor, &mats);
        let r = f.norm();
        if r <= target {
            return Some(SolveOutcome { points, residual: r });
        }
        if it % REBALANCE_EVERY == REBALANCE_EVERY - 1 {
            if rebalance(&mut points, forms) > CONDITION_CAP {
                return None;
            }
            continue;
        }
        let jac = jacobian(flavor, &points, &mats)?;
        let mut accepted = false;
        for _ in 0..12 {
            let Some(step) = damped_step(&jac, &f, mu) else {
                mu *= 10.0;
                continue;
            };
            let trial = apply_step(&points, &step);
            let trial_r = matrices(&trial).map(|m| constraint(flavor, &m).norm());
            if trial_r.is_some_and(|tr| tr.is_finite() && tr < r) {
                points = trial;
                mu = (mu / 5.0).max(1e-15);
                accepted = true;
                break;
            }
            mu *= 10.0;
        }
        if !accepted {
            return None;
        }
    }
    let mats = matrices(&points)?;
    let r = constraint(flavor, &mats).norm();
    (r <= target).then_some(SolveOutcome { points, residual: r })
}

fn random_conjugator(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    CMat::from_fn(n, n, |_, _| c(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)))
}

fn attempt(t: &ClassTuple, ds: &[CMat], opts: &SolverOptions, restart: usize) -> Option<Witness> {
    let flavor = t.flavor();
    let n = t.n();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(restart as u64);
    let points: Vec<OrbitPoint> =
        ds.iter().map(|d| OrbitPoint { q: random_conjugator(&mut rng, n), d: d.clone() }).collect();
    let target = opts.residual_target_for(flavor);
    let outcome = solve(flavor, points, t.forms(), opts.max_newton_iters, target)?;
    debug_assert!(outcome.residual <= target);
    let tuple = MatrixTuple::new(flavor, matrices(&outcome.points)?, t.clone()).ok()?;
    let report = verify(&tuple, &verify_options(opts)).ok()?;
    report.certifies(target).then_some(Witness { tuple, report, restart })
}

/// Builds a verified witness tuple for classes with attached eigenvalues.
///
/// Unless `opts.force` is set, the classes must be decided solvable for
/// generic eigenvalues and the attached eigenvalues must be generic.
/// Failure after all restarts is reported as [`Error::SolverFailed`], which
/// says nothing about existence.
pub fn build_tuple(t: &ClassTuple, opts: &SolverOptions) -> Result<Witness> {
    opts.validate()?;
    let a = t.eigenvalues().ok_or(dspkit::Error::MissingEigenvalues)?;
    let n = t.n();
    if n > opts.max_n {
        return Err(Error::TooLarge { n, cap: opts.max_n });
    }
    if !check_sum_condition(a) {
        return Err(Error::NonGenericEigenvalues("the eigenvalues violate the sum condition".into()));
    }
    if !opts.force {
        let verdict = decide(t, DecisionMode::Generic).verdict;
        if verdict != Verdict::Solvable {
            return Err(Error::DecidedUnsolvable { verdict });
        }
        if n > 1 && !classify(a, SRange::full(n), DEFAULT_BUDGET)?.generic {
            return Err(Error::NonGenericEigenvalues("a relation among the eigenvalues holds".into()));
        }
    }
    let ds = jordan_matrices(t).expect("eigenvalues attached");
    let batch = rayon::current_num_threads().max(1);
    let mut start = 0;
    while start < opts.max_restarts {
        let end = (start + batch).min(opts.max_restarts);
        let results: Vec<Option<Witness>> = (start..end).into_par_iter().map(|r| attempt(t, &ds, opts, r)).collect();
        if let Some(w) = results.into_iter().flatten().next() {
            return Ok(w);
        }
        start = end;
    }
    Err(Error::SolverFailed { restarts: opts.max_restarts })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Deformation {
    pub tuple: MatrixTuple,
    /// Residual after every accepted continuation step.
    pub step_residuals: Vec<f64>,
    /// Whether the identified Jordan forms matched after every step.
    pub shapes_preserved: bool,
    pub halvings: usize,
}

fn check_path(start: &EigenvalueAssignment, end: &EigenvalueAssignment) -> Result<()> {
    if start.flavor() != end.flavor() {
        return Err(Error::InvalidPath("flavors differ".into()));
    }
    let same_mults = start.classes().len() == end.classes().len()
        && start
            .classes()
            .iter()
            .zip(end.classes())
            .all(|(a, b)| a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.1 == y.1));
    if !same_mults {
        return Err(Error::InvalidPath("multiplicities must be kept along the path".into()));
    }
    match end.flavor() {
        Flavor::Additive if !check_sum_condition(end) => {
            Err(Error::InvalidPath("endpoint violates the sum condition".into()))
        }
        Flavor::Multiplicative if start.total() != end.total() => {
            Err(Error::InvalidPath("the exponent sum must stay constant along the path".into()))
        }
        _ => Ok(()),
    }
}

/// Conjugator and block-diagonal part of `a` adapted to its generalized
/// eigenspaces at the given eigenvalues.
fn spectral_frame(a: &CMat, form: &JordanNormalForm, values: &[Complex64]) -> Option<OrbitPoint> {
    let n = a.nrows();
    let mut t = CMat::zeros(n, n);
    let mut pos = 0;
    let mut ranges = Vec::new();
    for (e, &lambda) in form.entries().iter().zip(values) {
        let m = e.blocks.size();
        let shifted = a - CMat::identity(n, n) * lambda;
        let mut power = CMat::identity(n, n);
        for _ in 0..e.blocks.largest() {
            power = &power * &shifted;
        }
        let basis = smallest_right_singular_vectors(&power, m);
        t.columns_mut(pos, m).copy_from(&basis);
        ranges.push((pos, m));
        pos += m;
    }
    let t_inv = t.clone().try_inverse()?;
    let mut b = &t_inv * a * &t;
    for &(ri, mi) in &ranges {
        for &(rj, mj) in &ranges {
            if ri != rj {
                b.view_mut((ri, rj), (mi, mj)).fill(c(0.0, 0.0));
            }
        }
    }
    Some(OrbitPoint { q: t, d: b })
}

/// Block shift taking the eigenvalues from `from` to `to`.
fn spectral_shift(form: &JordanNormalForm, from: &[Complex64], to: &[Complex64]) -> CMat {
    let n = form.n();
    let mut s = CMat::zeros(n, n);
    let mut pos = 0;
    for ((e, &a), &b) in form.entries().iter().zip(from).zip(to) {
        for i in 0..e.blocks.size() {
            s[(pos + i, pos + i)] = b - a;
        }
        pos += e.blocks.size();
    }
    s
}

/// Newton corrector with a tiny damping floor.
fn correct(flavor: Flavor, mut points: Vec<OrbitPoint>, iters: usize, target: f64) -> Option<(Vec<OrbitPoint>, f64)> {
    for _ in 0..iters {
        let mats = matrices(&points)?;
        let f = constraint(flavor, &mats);
        let r = f.norm();
        if r <= target {
            return Some((points, r));
        }
        let jac = jacobian(flavor, &points, &mats)?;
        points = apply_step(&points, &damped_step(&jac, &f, 1e-14)?);
    }
    let r = constraint(flavor, &matrices(&points)?).norm();
    (r <= target).then_some((points, r))
}

/// Moves a tuple with trivial centralizer along the straight eigenvalue
/// path to `target`, keeping every Jordan structure.
///
/// Each step predicts with the linearized constraint and corrects with
/// Newton; failed steps are halved down to `2⁻²⁰` of the nominal step.
pub fn deform(start: &MatrixTuple, target: &EigenvalueAssignment, opts: &SolverOptions) -> Result<Deformation> {
    let classes = start.declared_classes();
    let a0 = classes.eigenvalues().ok_or(dspkit::Error::MissingEigenvalues)?;
    check_path(a0, target)?;
    if a0 == target {
        return Ok(Deformation {
            tuple: start.clone(),
            step_residuals: vec![start.residual()],
            shapes_preserved: true,
            halvings: 0,
        });
    }
    let vopts = verify_options(opts);
    let dim = crate::verify::centralizer_dimension(start.matrices(), vopts.rank_tolerance);
    if dim != 1 {
        return Err(Error::CentralizerNotTrivial(dim));
    }
    let flavor = start.flavor();
    let goal = opts.residual_target_for(flavor);
    let v0 = class_eigenvalues(a0);
    let v1 = class_eigenvalues(target);
    let at = |s: f64| -> Vec<Vec<Complex64>> {
        // exponents interpolate linearly, eigenvalues follow
        let lerp = |x: Complex64, y: Complex64| x + (y - x) * s;
        match flavor {
            Flavor::Additive => {
                v0.iter().zip(&v1).map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| lerp(x, y)).collect()).collect()
            }
            Flavor::Multiplicative => a0
                .classes()
                .iter()
                .zip(target.classes())
                .map(|(ca, cb)| {
                    ca.iter()
                        .zip(cb)
                        .map(|((x, _), (y, _))| {
                            let (xr, xi) = x.to_f64_pair();
                            let (yr, yi) = y.to_f64_pair();
                            let mu = lerp(c(xr, xi), c(yr, yi));
                            (mu * c(0.0, 2.0 * std::f64::consts::PI)).exp()
                        })
                        .collect()
                })
                .collect(),
        }
    };

    let mut points: Vec<OrbitPoint> = start
        .matrices()
        .iter()
        .zip(classes.forms())
        .zip(&v0)
        .map(|((m, f), v)| spectral_frame(m, f, v))
        .collect::<Option<_>>()
        .ok_or_else(|| Error::Inconsistent("generalized eigenspaces are degenerate".into()))?;

    let steps = opts.continuation_steps.max(1);
    let nominal = 1.0 / steps as f64;
    let min_step = nominal * 2f64.powi(-20);
    let mut s = 0.0;
    let mut step = nominal;
    let mut step_residuals = Vec::new();
    let mut shapes_preserved = true;
    let mut halvings = 0;
    let mut current_values = v0.clone();

    while s < 1.0 {
        let next = (s + step).min(1.0);
        let next_values = if next >= 1.0 { v1.clone() } else { at(next) };
        let trial = (|| {
            let mats = matrices(&points)?;
            let f = constraint(flavor, &mats);
            let deltas: Vec<CMat> = classes
                .forms()
                .iter()
                .zip(&current_values)
                .zip(&next_values)
                .map(|((form, a), b)| spectral_shift(form, a, b))
                .collect();
            let drift = spectral_derivative(flavor, &points, &mats, &deltas)?;
            let jac = jacobian(flavor, &points, &mats)?;
            let step_vec = damped_step(&jac, &(f + drift), 1e-14)?;
            let predicted: Vec<OrbitPoint> = apply_step(&points, &step_vec)
                .into_iter()
                .zip(&deltas)
                .map(|(p, dd)| OrbitPoint { q: p.q, d: p.d + dd })
                .collect();
            correct(flavor, predicted, opts.max_newton_iters.min(30), goal)
        })();
        match trial {
            Some((mut pts, r)) => {
                if rebalance(&mut pts, classes.forms()) > CONDITION_CAP {
                    return Err(Error::ContinuationDiverged { t: next });
                }
                let mats = matrices(&pts).ok_or(Error::ContinuationDiverged { t: next })?;
                if let Ok((forms, _)) = identify_classes_at(&mats, classes.forms(), &next_values, vopts.rank_tolerance)
                {
                    shapes_preserved &= forms.as_slice() == classes.forms();
                } else {
                    shapes_preserved = false;
                }
                points = pts;
                current_values = next_values;
                step_residuals.push(r);
                s = next;
                step = (step * 2.0).min(nominal);
            }
            None => {
                step /= 2.0;
                halvings += 1;
                if step < min_step {
                    return Err(Error::ContinuationDiverged { t: s });
                }
            }
        }
    }

    let end_classes = classes.clone().with_eigenvalues(target.clone())?;
    let mats = matrices(&points).ok_or(Error::ContinuationDiverged { t: 1.0 })?;
    let tuple = MatrixTuple::new(flavor, mats, end_classes)?;
    Ok(Deformation { tuple, step_residuals, shapes_preserved, halvings })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitEntry {
    pub epsilon: f64,
    /// `None` when the candidates did not account for the whole spectrum.
    pub identified: Option<JordanNormalForm>,
    pub expected: JordanNormalForm,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagonalLimitReport {
    pub entries: Vec<LimitEntry>,
    pub all_ok: bool,
}

/// Checks numerically that `G⁰ + εG¹` is diagonalizable with the diagonal
/// correspondent of `g0` as its form for `ε ≠ 0`, and equals `g0` at `ε = 0`.
///
/// `G⁰` is the Jordan matrix with eigenvalue `k` for the `k`-th entry; `G¹`
/// is diagonal and puts `0, 1, …, b−1` on each block of size `b`, counting
/// from the block's last position backwards.
pub fn diagonal_limit_check(g0: &JordanNormalForm, epsilons: &[f64], tol: f64) -> DiagonalLimitReport {
    let n = g0.n();
    let values: Vec<Complex64> = (0..g0.entries().len()).map(|k| c(k as f64, 0.0)).collect();
    let base = jordan_matrix(g0, &values);
    let mut g1 = CMat::zeros(n, n);
    let mut pos = 0;
    for e in g0.entries() {
        for &b in e.blocks.parts() {
            for q in 0..b {
                g1[(pos + b - 1 - q, pos + b - 1 - q)] = c(q as f64, 0.0);
            }
            pos += b;
        }
    }
    let max_block = g0.entries().iter().map(|e| e.blocks.largest()).max().unwrap_or(1);
    let expected_diag = JordanNormalForm::diagonal(&g0.to_diagonal());
    let entries: Vec<LimitEntry> = epsilons
        .iter()
        .map(|&eps| {
            let m = &base + &g1 * c(eps, 0.0);
            let (candidates, expected) = if eps == 0.0 {
                (values.clone(), g0.clone())
            } else {
                let cands =
                    values.iter().flat_map(|&l| (0..max_block).map(move |q| l + c(eps * q as f64, 0.0))).collect();
                (cands, expected_diag.clone())
            };
            let identified = identify_jnf(&m, &candidates, tol).ok();
            let ok = identified.as_ref().is_some_and(|f| {
                if eps == 0.0 {
                    *f == expected
                } else {
                    f.is_diagonal() && f.to_diagonal() == expected.to_diagonal()
                }
            });
            LimitEntry { epsilon: eps, identified, expected, ok }
        })
        .collect();
    let all_ok = entries.iter().all(|e| e.ok);
    DiagonalLimitReport { entries, all_ok }
}
