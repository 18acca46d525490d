use dspkit::random::random_simple_pmv;
use dspkit::{
    check_sum_condition, classify, sample_generic, violated_relations, EigenvalueAssignment, ExactComplexRational,
    Flavor, SRange, SamplerOptions, DEFAULT_BUDGET,
};
use num_rational::BigRational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Assignment with small integer values, so that relations are frequent.
/// The last value is adjusted so that the eigenvalues sum to zero.
fn dense_assignment(seed: u64, n: usize, classes: usize) -> EigenvalueAssignment {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        if let Some(a) = try_dense(&mut rng, n, classes) {
            return a;
        }
    }
}

fn try_dense(rng: &mut ChaCha8Rng, n: usize, classes: usize) -> Option<EigenvalueAssignment> {
    let pmv = random_simple_pmv(rng, n, classes);
    let mut cls: Vec<Vec<(ExactComplexRational, usize)>> = pmv
        .iter()
        .map(|mv| {
            let mut used = Vec::new();
            mv.components()
                .iter()
                .map(|&m| {
                    let v = loop {
                        let v: i64 = rng.random_range(-4..=4);
                        if !used.contains(&v) {
                            used.push(v);
                            break v;
                        }
                    };
                    (ExactComplexRational::from_integer(v), m)
                })
                .collect()
        })
        .collect();
    let last = cls.last_mut().unwrap().last_mut().unwrap();
    last.0 = ExactComplexRational::zero();
    let m = last.1 as i64;
    let rest: ExactComplexRational = cls.iter().flatten().map(|(v, k)| v * *k).sum();
    cls.last_mut().unwrap().last_mut().unwrap().0 = (-rest).div_int(m);
    EigenvalueAssignment::new(Flavor::Additive, cls).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sampled_assignments_are_generic(seed in any::<u64>(), n in 2usize..=6, classes in 2usize..=4) {
        let pmv = random_simple_pmv(&mut ChaCha8Rng::seed_from_u64(seed), n, classes);
        for flavor in [Flavor::Additive, Flavor::Multiplicative] {
            let a = sample_generic(&pmv, flavor, &SamplerOptions { seed, ..Default::default() }).unwrap();
            prop_assert!(check_sum_condition(&a));
            prop_assert_eq!(a.pmv(), pmv.clone());
            prop_assert!(violated_relations(&a, SRange::full(n), DEFAULT_BUDGET).unwrap().is_empty());
        }
    }

    #[test]
    fn complements_of_witnesses_are_witnesses(seed in any::<u64>(), n in 2usize..=6, classes in 2usize..=4) {
        let a = dense_assignment(seed, n, classes);
        prop_assert!(check_sum_condition(&a));
        let found = violated_relations(&a, SRange::full(n), DEFAULT_BUDGET).unwrap();
        for w in &found {
            prop_assert!(found.contains(&w.complement(&a)));
        }
    }

    #[test]
    fn scaling_keeps_the_generic_flag(seed in any::<u64>(), num in 1i64..50, den in 1i64..50) {
        let a = dense_assignment(seed, 4, 3);
        let c = BigRational::new(num.into(), den.into());
        let before = classify(&a, SRange::full(4), DEFAULT_BUDGET).unwrap().generic;
        let after = classify(&a.scaled(&c), SRange::full(4), DEFAULT_BUDGET).unwrap().generic;
        prop_assert_eq!(before, after);
    }
}

#[test]
fn strict_range_skips_singletons() {
    let zeros = EigenvalueAssignment::new(Flavor::Additive, vec![vec![(ExactComplexRational::zero(), 2)]; 3]).unwrap();
    assert!(violated_relations(&zeros, SRange::strict(2), DEFAULT_BUDGET).unwrap().is_empty());
    assert!(!violated_relations(&zeros, SRange::full(2), DEFAULT_BUDGET).unwrap().is_empty());
}

#[test]
fn assignment_json_round_trip() {
    let pmv = random_simple_pmv(&mut ChaCha8Rng::seed_from_u64(3), 5, 3);
    let a = sample_generic(&pmv, Flavor::Multiplicative, &SamplerOptions::default()).unwrap();
    let json = serde_json::to_string(&a).unwrap();
    assert_eq!(serde_json::from_str::<EigenvalueAssignment>(&json).unwrap(), a);
}
