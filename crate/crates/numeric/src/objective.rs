//! The constraint `ΣA_j = 0` (or `ΠM_j = I`) as a function of conjugating
//! matrices, `A_j = Q_j D_j Q_j⁻¹`, and its complex Jacobian.
//!
//! Perturbations are relative: `Q_j ↦ Q_j (I + E_j)`, so the derivative of
//! `A_j` in direction `E_j` is `Q_j [E_j, D_j] Q_j⁻¹`.

use dspkit::Flavor;

use crate::linalg::{c, identity, mat_of, product, vec_of, CMat, CVec};

#[derive(Clone, Debug, PartialEq)]
pub struct OrbitPoint {
    pub q: CMat,
    pub d: CMat,
}

impl OrbitPoint {
    pub fn matrix(&self) -> Option<CMat> {
        let q_inv = self.q.clone().try_inverse()?;
        Some(&self.q * &self.d * q_inv)
    }
}

pub fn matrices(points: &[OrbitPoint]) -> Option<Vec<CMat>> {
    points.iter().map(OrbitPoint::matrix).collect()
}

/// Vectorized constraint value.
pub fn constraint(flavor: Flavor, mats: &[CMat]) -> CVec {
    let n = mats[0].nrows();
    let f = match flavor {
        Flavor::Additive => mats.iter().fold(CMat::zeros(n, n), |acc, m| acc + m),
        Flavor::Multiplicative => product(mats) - identity(n),
    };
    vec_of(&f)
}

/// Left and right cofactors `L_j = M_1⋯M_{j−1}`, `R_j = M_{j+1}⋯M_m`; both
/// identities in the additive case.
fn cofactors(flavor: Flavor, mats: &[CMat]) -> Vec<(CMat, CMat)> {
    let n = mats[0].nrows();
    match flavor {
        Flavor::Additive => vec![(identity(n), identity(n)); mats.len()],
        Flavor::Multiplicative => {
            let m = mats.len();
            let mut left = vec![identity(n); m];
            for j in 1..m {
                left[j] = &left[j - 1] * &mats[j - 1];
            }
            let mut right = vec![identity(n); m];
            for j in (0..m - 1).rev() {
                right[j] = &mats[j + 1] * &right[j + 1];
            }
            left.into_iter().zip(right).collect()
        }
    }
}

/// `n² × m n²` Jacobian; column `j n² + a + b n` is the direction `E_ab` of
/// class `j`.
pub fn jacobian(flavor: Flavor, points: &[OrbitPoint], mats: &[CMat]) -> Option<CMat> {
    let n = mats[0].nrows();
    let nn = n * n;
    let mut jac = CMat::zeros(nn, nn * points.len());
    for (j, (p, (l, r))) in points.iter().zip(cofactors(flavor, mats)).enumerate() {
        let q_inv = p.q.clone().try_inverse()?;
        let u1 = &l * &p.q;
        let v1 = &p.d * &q_inv * &r;
        let u2 = &l * &p.q * &p.d;
        let v2 = &q_inv * &r;
        for b in 0..n {
            for a in 0..n {
                let col = j * nn + a + b * n;
                for cc in 0..n {
                    let (x1, x2) = (v1[(b, cc)], v2[(b, cc)]);
                    for rr in 0..n {
                        jac[(rr + cc * n, col)] = u1[(rr, a)] * x1 - u2[(rr, a)] * x2;
                    }
                }
            }
        }
    }
    Some(jac)
}

/// First-order change of the constraint when every `D_j` moves by `delta[j]`.
pub fn spectral_derivative(flavor: Flavor, points: &[OrbitPoint], mats: &[CMat], delta: &[CMat]) -> Option<CVec> {
    let n = mats[0].nrows();
    let mut total = CMat::zeros(n, n);
    for ((p, (l, r)), dd) in points.iter().zip(cofactors(flavor, mats)).zip(delta) {
        let q_inv = p.q.clone().try_inverse()?;
        total += l * &p.q * dd * q_inv * r;
    }
    Some(vec_of(&total))
}

/// `Q_j ← Q_j (I + E_j)` with `E_j` read from the step vector.
pub fn apply_step(points: &[OrbitPoint], step: &CVec) -> Vec<OrbitPoint> {
    let n = points[0].q.nrows();
    let nn = n * n;
    points
        .iter()
        .enumerate()
        .map(|(j, p)| {
            let e = mat_of(&step.rows(j * nn, nn).into_owned(), n);
            OrbitPoint { q: &p.q * (identity(n) + e), d: p.d.clone() }
        })
        .collect()
}

/// Minimum-norm damped Gauss–Newton step solving `J δ ≈ −rhs`.
pub fn damped_step(jac: &CMat, rhs: &CVec, mu: f64) -> Option<CVec> {
    let rows = jac.nrows();
    let mut g = jac * jac.adjoint();
    let scale = (0..rows).map(|i| g[(i, i)].re).sum::<f64>() / rows as f64;
    for i in 0..rows {
        g[(i, i)] += c(mu * scale.max(f64::MIN_POSITIVE), 0.0);
    }
    let y = g.cholesky()?.solve(&(-rhs));
    Some(jac.adjoint() * y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn damped_step_tends_to_the_minimum_norm_solution() {
        // underdetermined: x₀ + x₁ = 2 has minimum-norm solution (1, 1)
        let jac = CMat::from_row_slice(1, 2, &[c(1.0, 0.0), c(1.0, 0.0)]);
        let rhs = CVec::from_element(1, c(-2.0, 0.0));
        let step = damped_step(&jac, &rhs, 1e-12).unwrap();
        assert!((step - CVec::from_element(2, c(1.0, 0.0))).norm() < 1e-9);
    }

    #[test]
    fn damping_shortens_the_step() {
        let jac = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1e-3, 0.0)]);
        let rhs = CVec::from_element(2, c(1.0, 0.0));
        let short = damped_step(&jac, &rhs, 1e-2).unwrap().norm();
        let long = damped_step(&jac, &rhs, 1e-10).unwrap().norm();
        assert!(short < long);
    }

    #[test]
    fn zero_step_keeps_the_point() {
        let p = OrbitPoint { q: CMat::from_fn(2, 2, |i, j| c((i + 2 * j) as f64, 1.0)), d: identity(2) };
        let moved = apply_step(std::slice::from_ref(&p), &CVec::zeros(4));
        assert_eq!(moved[0].q, p.q);
    }

    #[test]
    fn constraint_of_a_balanced_tuple_vanishes() {
        let a = CMat::from_fn(2, 2, |i, j| c(i as f64 - j as f64, 0.5));
        assert!(constraint(Flavor::Additive, &[a.clone(), -a.clone()]).norm() < 1e-15);
        let inv = a.clone().try_inverse().unwrap();
        assert!(constraint(Flavor::Multiplicative, &[a, inv]).norm() < 1e-14);
    }
}
