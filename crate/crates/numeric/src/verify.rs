//! Numerical oracles: ranks, Jordan structure, irreducibility and the
//! centralizer of a tuple.

use dspkit::{ClassTuple, Flavor, JordanNormalForm, Label, Partition};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    class_eigenvalues, rank_from_singular_values, singular_values, smallest_right_singular_vectors, vec_of, CMat, CVec,
};
use crate::tuple::MatrixTuple;

pub const DEFAULT_RANK_TOLERANCE: f64 = 1e-8;

/// Number of singular values above `tol` times the largest one.
pub fn numeric_rank(m: &CMat, tol: f64) -> usize {
    rank_from_singular_values(&singular_values(m), tol).0
}

struct Identified {
    form: JordanNormalForm,
    /// Smallest kept/dropped singular value ratio over all rank decisions.
    gap: f64,
}

fn blocks_at(m: &CMat, lambda: Complex64, tol: f64, gap: &mut f64) -> Option<Partition> {
    let n = m.nrows();
    let b = m - CMat::identity(n, n) * lambda;
    // measured against the matrix itself so that B ≈ 0 counts as zero
    let norm = |x: &CMat| singular_values(x).first().copied().unwrap_or(0.0);
    let scale = norm(&b).max(norm(m)).max(lambda.norm());
    if scale == 0.0 {
        return Some(Partition::ones(n));
    }
    // ker B^{k+1} = ker((I − Π_k) B) with Π_k the projector onto ker B^k;
    // this avoids forming powers
    let mut projector = CMat::zeros(n, n);
    let mut increments = Vec::new();
    let mut prev = 0;
    loop {
        let restricted = (CMat::identity(n, n) - &projector) * &b;
        let s = singular_values(&restricted);
        let rank = s.iter().take_while(|&&x| x > tol * scale).count();
        if let (Some(&kept), Some(&dropped)) = (rank.checked_sub(1).and_then(|i| s.get(i)), s.get(rank)) {
            if dropped > 0.0 {
                *gap = gap.min(kept / dropped);
            }
        }
        let nullity = n - rank;
        if nullity <= prev {
            break;
        }
        increments.push(nullity - prev);
        prev = nullity;
        let basis = smallest_right_singular_vectors(&restricted, nullity);
        projector = &basis * basis.adjoint();
        if nullity == n {
            break;
        }
    }
    if increments.is_empty() {
        return None;
    }
    // the increments are non-increasing in exact arithmetic
    if increments.windows(2).any(|w| w[1] > w[0]) {
        return None;
    }
    Some(Partition::new(increments).expect("positive").dual())
}

fn identify(m: &CMat, candidates: &[Complex64], tol: f64) -> Result<Identified> {
    let n = m.nrows();
    let mut gap = f64::INFINITY;
    let mut entries = Vec::new();
    for (k, &lambda) in candidates.iter().enumerate() {
        if let Some(p) = blocks_at(m, lambda, tol, &mut gap) {
            entries.push((Label(k as u32), p));
        }
    }
    let total: usize = entries.iter().map(|(_, p)| p.size()).sum();
    if total != n {
        return Err(Error::SpectrumMismatch(format!("candidate eigenvalues account for {total} of {n} dimensions")));
    }
    Ok(Identified { form: JordanNormalForm::new(entries)?, gap })
}

/// Jordan structure of `m` at the candidate eigenvalues; labels are the
/// candidate indices.
pub fn identify_jnf(m: &CMat, candidates: &[Complex64], tol: f64) -> Result<JordanNormalForm> {
    identify(m, candidates, tol).map(|i| i.form)
}

fn relabel(form: &JordanNormalForm, declared: &JordanNormalForm) -> Result<JordanNormalForm> {
    let entries =
        form.entries().iter().map(|e| (declared.entries()[e.label.0 as usize].label, e.blocks.clone())).collect();
    Ok(JordanNormalForm::new(entries)?)
}

/// Dimension of the algebra generated by the matrices and the identity,
/// spanned breadth-first by words of length at most `word_length_cap`.
pub fn algebra_dimension(matrices: &[CMat], tol: f64, word_length_cap: usize) -> usize {
    let Some(first) = matrices.first() else { return 0 };
    let n = first.nrows();
    let full = n * n;
    let mut basis: Vec<CVec> = Vec::with_capacity(full);
    let mut frontier = vec![CMat::identity(n, n)];
    add_if_new(&mut basis, &frontier[0], tol);
    for _ in 0..word_length_cap {
        let mut next = Vec::new();
        for w in &frontier {
            for g in matrices {
                let cand = g * w;
                if let Some(unit) = add_if_new(&mut basis, &cand, tol) {
                    next.push(unit);
                    if basis.len() == full {
                        return full;
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    basis.len()
}

/// Gram–Schmidt with one reorthogonalization pass; returns the normalized
/// new direction as a matrix when `m` is independent of `basis`.
fn add_if_new(basis: &mut Vec<CVec>, m: &CMat, tol: f64) -> Option<CMat> {
    let mut v = vec_of(m);
    let norm0 = v.norm();
    if norm0 == 0.0 {
        return None;
    }
    for _ in 0..2 {
        for b in basis.iter() {
            let coef = b.dotc(&v);
            v -= b * coef;
        }
    }
    let norm = v.norm();
    if norm <= tol * norm0 {
        return None;
    }
    v /= Complex64::new(norm, 0.0);
    let n = m.nrows();
    let unit = CMat::from_column_slice(n, n, v.as_slice());
    basis.push(v);
    Some(unit)
}

/// The stacked commutator operator `X ↦ ([A_1, X], …)` on column-major
/// vectorized `X`.
pub fn commutator_operator(matrices: &[CMat]) -> CMat {
    let n = matrices.first().map_or(0, |m| m.nrows());
    let nn = n * n;
    let eye = CMat::identity(n, n);
    let mut op = CMat::zeros(nn * matrices.len(), nn);
    for (j, a) in matrices.iter().enumerate() {
        let block = eye.kronecker(a) - a.transpose().kronecker(&eye);
        op.view_mut((j * nn, 0), (nn, nn)).copy_from(&block);
    }
    op
}

fn centralizer_with_gap(matrices: &[CMat], tol: f64) -> (usize, f64) {
    let op = commutator_operator(matrices);
    let s = singular_values(&op);
    let (rank, gap) = rank_from_singular_values(&s, tol);
    (op.ncols() - rank, gap)
}

/// Dimension of the space of matrices commuting with every member.
pub fn centralizer_dimension(matrices: &[CMat], tol: f64) -> usize {
    centralizer_with_gap(matrices, tol).0
}

pub fn residual(t: &MatrixTuple) -> f64 {
    crate::tuple::residual_of(t.flavor(), t.matrices())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub rank_tolerance: f64,
    pub algebra_tolerance: f64,
    /// `None` means `2n²`.
    pub word_length_cap: Option<usize>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { rank_tolerance: DEFAULT_RANK_TOLERANCE, algebra_tolerance: 1e-8, word_length_cap: None }
    }
}

/// Kept/dropped singular value ratios at the rank cutoffs; `None` when no
/// value was dropped.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralGaps {
    pub identification: Option<f64>,
    pub centralizer: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub residual: f64,
    pub identified_forms: Vec<JordanNormalForm>,
    pub forms_match: bool,
    pub algebra_dimension: usize,
    pub centralizer_dimension: usize,
    pub irreducible: bool,
    pub trivial_centralizer: bool,
    pub gaps: SpectralGaps,
}

impl VerificationReport {
    /// Residual within target, matching classes and an irreducible tuple.
    pub fn certifies(&self, residual_target: f64) -> bool {
        self.residual <= residual_target && self.forms_match && self.irreducible && self.trivial_centralizer
    }
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

/// Jordan forms of the matrices, identified at their declared eigenvalues.
pub fn identify_classes(matrices: &[CMat], classes: &ClassTuple, tol: f64) -> Result<(Vec<JordanNormalForm>, f64)> {
    let a = classes.eigenvalues().ok_or(dspkit::Error::MissingEigenvalues)?;
    identify_classes_at(matrices, classes.forms(), &class_eigenvalues(a), tol)
}

/// As [`identify_classes`] with numeric eigenvalues given per class.
pub fn identify_classes_at(
    matrices: &[CMat],
    declared: &[JordanNormalForm],
    values: &[Vec<Complex64>],
    tol: f64,
) -> Result<(Vec<JordanNormalForm>, f64)> {
    let mut gap = f64::INFINITY;
    let mut forms = Vec::with_capacity(matrices.len());
    for ((m, declared), cand) in matrices.iter().zip(declared).zip(values) {
        let id = identify(m, cand, tol)?;
        gap = gap.min(id.gap);
        forms.push(relabel(&id.form, declared)?);
    }
    Ok((forms, gap))
}

pub fn verify(t: &MatrixTuple, opts: &VerifyOptions) -> Result<VerificationReport> {
    let n = t.n();
    let (identified_forms, id_gap) = identify_classes(t.matrices(), t.declared_classes(), opts.rank_tolerance)?;
    let forms_match = identified_forms.as_slice() == t.declared_classes().forms();
    let cap = opts.word_length_cap.unwrap_or(2 * n * n);
    let algebra_dimension = algebra_dimension(t.matrices(), opts.algebra_tolerance, cap);
    let (centralizer_dimension, c_gap) = centralizer_with_gap(t.matrices(), opts.rank_tolerance);
    let irreducible = algebra_dimension == n * n;
    let trivial_centralizer = centralizer_dimension == 1;
    if irreducible && !trivial_centralizer {
        return Err(Error::Inconsistent(format!(
            "algebra has full dimension but the centralizer has dimension {centralizer_dimension}"
        )));
    }
    Ok(VerificationReport {
        residual: residual(t),
        identified_forms,
        forms_match,
        algebra_dimension,
        centralizer_dimension,
        irreducible,
        trivial_centralizer,
        gaps: SpectralGaps { identification: finite(id_gap), centralizer: finite(c_gap) },
    })
}

/// Eigenvalue flavor helper for callers that build candidate lists.
pub fn candidates_for(flavor: Flavor, values: &[dspkit::ExactComplexRational]) -> Vec<Complex64> {
    values.iter().map(|v| crate::linalg::eigenvalue(flavor, v)).collect()
}
