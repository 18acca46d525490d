//! Random Jordan data for property tests and experiments.

use rand::Rng;

use crate::jordan::{ClassTuple, Flavor, JordanNormalForm, Label};
use crate::partition::{MultiplicityVector, Partition};

/// Random partition of `n` built from uniformly drawn parts.
pub fn random_partition<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Partition {
    let mut parts = Vec::new();
    let mut left = n;
    while left > 0 {
        let b = rng.random_range(1..=left);
        parts.push(b);
        left -= b;
    }
    Partition::new(parts).expect("positive parts")
}

/// Random multiplicity vector of length `n` with at most `max_parts` parts.
pub fn random_mv<R: Rng + ?Sized>(rng: &mut R, n: usize, max_parts: usize) -> MultiplicityVector {
    loop {
        let p = random_partition(rng, n);
        if p.len() <= max_parts.max(1) {
            return MultiplicityVector::from(p);
        }
    }
}

/// Random Jordan normal form of size `n` with up to `max_labels` eigenvalues.
pub fn random_jnf<R: Rng + ?Sized>(rng: &mut R, n: usize, max_labels: usize) -> JordanNormalForm {
    let mults = random_mv(rng, n, max_labels);
    let entries = mults
        .components()
        .iter()
        .enumerate()
        .map(|(k, &m)| {
            let blocks = if rng.random_bool(0.5) { Partition::ones(m) } else { random_partition(rng, m) };
            (Label(k as u32), blocks)
        })
        .collect();
    JordanNormalForm::new(entries).expect("valid entries")
}

pub fn random_tuple<R: Rng + ?Sized>(rng: &mut R, flavor: Flavor, n: usize, classes: usize) -> ClassTuple {
    let forms = (0..classes).map(|_| random_jnf(rng, n, n)).collect();
    ClassTuple::new(flavor, forms).expect("equal sizes")
}

/// Random diagonal tuple with a simple multiplicity vector.
pub fn random_simple_pmv<R: Rng + ?Sized>(rng: &mut R, n: usize, classes: usize) -> Vec<MultiplicityVector> {
    loop {
        let pmv: Vec<MultiplicityVector> = (0..classes).map(|_| random_mv(rng, n, n)).collect();
        if crate::jordan::pmv_gcd(&pmv) == 1 {
            return pmv;
        }
    }
}

/// Random tuple on which Ψ is defined, drawn by rejection.
pub fn random_reducible_tuple<R: Rng + ?Sized>(
    rng: &mut R,
    flavor: Flavor,
    n: usize,
    classes: usize,
    attempts: usize,
) -> Option<ClassTuple> {
    (0..attempts).map(|_| random_tuple(rng, flavor, n, classes)).find(|t| {
        let c = crate::decider::evaluate_conditions(t.forms()).expect("equal sizes");
        c.n > 1 && c.beta_holds && !c.omega_holds
    })
}
