//! Complex dense helpers on top of nalgebra.

use dspkit::{ClassTuple, EigenvalueAssignment, ExactComplexRational, Flavor, JordanNormalForm};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Numeric eigenvalue: the value itself, or `exp(2πiμ)` for an exponent.
pub fn eigenvalue(flavor: Flavor, v: &ExactComplexRational) -> Complex64 {
    let (re, im) = v.to_f64_pair();
    match flavor {
        Flavor::Additive => c(re, im),
        Flavor::Multiplicative => (c(re, im) * c(0.0, 2.0 * std::f64::consts::PI)).exp(),
    }
}

/// Numeric eigenvalues of every class, in label order.
pub fn class_eigenvalues(a: &EigenvalueAssignment) -> Vec<Vec<Complex64>> {
    a.classes().iter().map(|cl| cl.iter().map(|(v, _)| eigenvalue(a.flavor(), v)).collect()).collect()
}

/// Block-diagonal Jordan matrix; the `k`-th entry of `form` gets `values[k]`.
pub fn jordan_matrix(form: &JordanNormalForm, values: &[Complex64]) -> CMat {
    let n = form.n();
    let mut m = CMat::zeros(n, n);
    let mut pos = 0;
    for (e, &lambda) in form.entries().iter().zip(values) {
        for &b in e.blocks.parts() {
            for i in 0..b {
                m[(pos + i, pos + i)] = lambda;
                if i + 1 < b {
                    m[(pos + i, pos + i + 1)] = c(1.0, 0.0);
                }
            }
            pos += b;
        }
    }
    m
}

/// Jordan matrices of every class of a tuple with eigenvalues.
pub fn jordan_matrices(t: &ClassTuple) -> Option<Vec<CMat>> {
    let values = class_eigenvalues(t.eigenvalues()?);
    Some(t.forms().iter().zip(&values).map(|(f, v)| jordan_matrix(f, v)).collect())
}

/// Singular values in decreasing order.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Rank decided from sorted singular values with a relative cutoff, and the
/// ratio between the last kept and the first dropped value (∞ if none).
pub fn rank_from_singular_values(s: &[f64], rel_tol: f64) -> (usize, f64) {
    let max = s.first().copied().unwrap_or(0.0);
    if max == 0.0 {
        return (0, f64::INFINITY);
    }
    let rank = s.iter().take_while(|&&x| x > rel_tol * max).count();
    let gap = match (rank.checked_sub(1).map(|i| s[i]), s.get(rank)) {
        (Some(kept), Some(&dropped)) if dropped > 0.0 => kept / dropped,
        _ => f64::INFINITY,
    };
    (rank, gap)
}

/// Orthonormal basis (as columns) of the `dim` smallest right singular
/// directions, i.e. the numerical kernel when `dim` is its dimension.
pub fn smallest_right_singular_vectors(m: &CMat, dim: usize) -> CMat {
    let n = m.ncols();
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    let mut out = CMat::zeros(n, dim);
    for (col, &i) in order.iter().take(dim).enumerate() {
        for r in 0..n {
            out[(r, col)] = v_t[(i, r)].conj();
        }
    }
    out
}

pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// 2-norm condition number.
pub fn condition_number(m: &CMat) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn product(ms: &[CMat]) -> CMat {
    let n = ms.first().map_or(0, |m| m.nrows());
    ms.iter().fold(identity(n), |acc, m| acc * m)
}

/// Column-major vectorization.
pub fn vec_of(m: &CMat) -> CVec {
    CVec::from_column_slice(m.as_slice())
}

pub fn mat_of(v: &CVec, n: usize) -> CMat {
    CMat::from_column_slice(n, n, v.as_slice())
}
