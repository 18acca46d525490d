use dspkit::{
    sample_generic, ClassTuple, EigenvalueAssignment, ExactComplexRational, Flavor, JordanNormalForm,
    MultiplicityVector, SamplerOptions, SolverOptions,
};
use dspkit_numeric::linalg::{c, jordan_matrices, CMat};
use dspkit_numeric::objective::{apply_step, constraint, jacobian, matrices, OrbitPoint};
use dspkit_numeric::verify::commutator_operator;
use dspkit_numeric::{build_tuple, deform, diagonal_limit_check, numeric_rank, Error, MatrixTuple};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn mv(c: &[usize]) -> MultiplicityVector {
    MultiplicityVector::new(c.to_vec()).unwrap()
}

fn instance(flavor: Flavor, pmv: &[MultiplicityVector], seed: u64) -> ClassTuple {
    let a = sample_generic(pmv, flavor, &SamplerOptions { seed, ..Default::default() }).unwrap();
    ClassTuple::from_pmv(flavor, pmv).unwrap().with_eigenvalues(a).unwrap()
}

fn hypergeometric() -> ClassTuple {
    let values = [["1", "-1/3"], ["1/5", "-1/7"], ["-1/2", "-47/210"]];
    let a = EigenvalueAssignment::new(
        Flavor::Additive,
        values.iter().map(|c| c.iter().map(|v| (v.parse().unwrap(), 1)).collect()).collect(),
    )
    .unwrap();
    ClassTuple::from_pmv(Flavor::Additive, &vec![mv(&[1, 1]); 3]).unwrap().with_eigenvalues(a).unwrap()
}

#[test]
fn builds_rank_one_witness() {
    let w = build_tuple(&instance(Flavor::Additive, &vec![mv(&[1, 1]); 3], 1), &SolverOptions::default()).unwrap();
    assert!(w.report.residual <= 1e-10);
    assert_eq!((w.report.algebra_dimension, w.report.centralizer_dimension), (4, 1));
    assert!(w.report.forms_match);
}

#[test]
fn builds_size_three_witness() {
    let w = build_tuple(&instance(Flavor::Additive, &vec![mv(&[1, 1, 1]); 3], 2), &SolverOptions::default()).unwrap();
    assert!(w.report.residual <= 1e-10);
    assert_eq!(w.report.algebra_dimension, 9);
    assert!(w.report.trivial_centralizer);
}

#[test]
fn builds_multiplicative_witness() {
    let w =
        build_tuple(&instance(Flavor::Multiplicative, &vec![mv(&[1, 1]); 3], 3), &SolverOptions::default()).unwrap();
    assert!(w.report.residual <= 1e-9);
    assert!(w.report.irreducible && w.report.forms_match);
}

#[test]
fn scalar_classes_are_refused() {
    let values = ["1", "2", "-3"];
    let a = EigenvalueAssignment::new(
        Flavor::Additive,
        values.iter().map(|v| vec![(v.parse::<ExactComplexRational>().unwrap(), 2)]).collect(),
    )
    .unwrap();
    let t = ClassTuple::from_pmv(Flavor::Additive, &vec![mv(&[2]); 3]).unwrap().with_eigenvalues(a).unwrap();
    assert!(matches!(build_tuple(&t, &SolverOptions::default()), Err(Error::DecidedUnsolvable { .. })));
}

#[test]
fn forced_attempt_on_scalars_fails_cleanly() {
    let a = EigenvalueAssignment::new(
        Flavor::Additive,
        ["1", "2", "-3"].iter().map(|v| vec![(v.parse::<ExactComplexRational>().unwrap(), 2)]).collect(),
    )
    .unwrap();
    let t = ClassTuple::from_pmv(Flavor::Additive, &vec![mv(&[2]); 3]).unwrap().with_eigenvalues(a).unwrap();
    let opts = SolverOptions { force: true, max_restarts: 2, ..Default::default() };
    assert_eq!(build_tuple(&t, &opts), Err(Error::SolverFailed { restarts: 2 }));
}

#[test]
fn jacobian_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for flavor in [Flavor::Additive, Flavor::Multiplicative] {
        let t = instance(flavor, &[mv(&[2, 1]), mv(&[1, 1, 1]), mv(&[1, 1, 1])], 4);
        let ds = jordan_matrices(&t).unwrap();
        let n = t.n();
        let points: Vec<OrbitPoint> = ds
            .iter()
            .map(|d| OrbitPoint {
                q: CMat::identity(n, n)
                    + CMat::from_fn(n, n, |_, _| c(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5))),
                d: d.clone(),
            })
            .collect();
        let mats = matrices(&points).unwrap();
        let jac = jacobian(flavor, &points, &mats).unwrap();
        let h = 1e-5;
        for col in 0..jac.ncols() {
            let mut e = dspkit_numeric::linalg::CVec::zeros(jac.ncols());
            e[col] = c(h, 0.0);
            let plus = constraint(flavor, &matrices(&apply_step(&points, &e)).unwrap());
            let minus = constraint(flavor, &matrices(&apply_step(&points, &(-e))).unwrap());
            let fd = (plus - minus) / c(2.0 * h, 0.0);
            let exact = jac.column(col);
            let err = (&fd - exact).norm();
            assert!(err <= 1e-6 * exact.norm().max(1.0), "column {col}: {err}");
        }
    }
}

#[test]
fn replay_is_deterministic() {
    let t = instance(Flavor::Additive, &vec![mv(&[1, 1, 1]); 3], 5);
    let opts = SolverOptions { seed: 99, ..Default::default() };
    let a = build_tuple(&t, &opts).unwrap();
    let b = build_tuple(&t, &opts).unwrap();
    assert_eq!(a.restart, b.restart);
    assert_eq!(a.tuple.matrices(), b.tuple.matrices());
}

#[test]
fn linearization_has_full_rank_on_trace_zero_matrices() {
    let t = instance(Flavor::Additive, &vec![mv(&[1, 1, 1]); 3], 6);
    let w = build_tuple(&t, &SolverOptions::default()).unwrap();
    let n = t.n();
    // (X_1, …, X_m) ↦ Σ[A_j, X_j] is the horizontal concatenation of the
    // single-matrix commutator operators
    let blocks: Vec<CMat> = w.tuple.matrices().iter().map(|a| commutator_operator(std::slice::from_ref(a))).collect();
    let mut op = CMat::zeros(n * n, n * n * blocks.len());
    for (j, b) in blocks.iter().enumerate() {
        op.view_mut((0, j * n * n), (n * n, n * n)).copy_from(b);
    }
    assert_eq!(numeric_rank(&op, 1e-8), n * n - 1);
}

#[test]
fn tuple_json_round_trip() {
    let w = build_tuple(&hypergeometric(), &SolverOptions::default()).unwrap();
    let text = serde_json::to_string(&w.tuple).unwrap();
    let back: MatrixTuple = serde_json::from_str(&text).unwrap();
    assert_eq!(back, w.tuple);
}

fn displaced(a: &EigenvalueAssignment, rel: f64) -> EigenvalueAssignment {
    // scaling keeps the sum condition and multiplicities
    let k = num_rational::BigRational::new((((1.0 + rel) * 1000.0).round() as i64).into(), 1000.into());
    a.scaled(&k)
}

#[test]
fn zero_length_deformation_is_identity() {
    let w = build_tuple(&hypergeometric(), &SolverOptions::default()).unwrap();
    let a = w.tuple.declared_classes().eigenvalues().unwrap().clone();
    let d = deform(&w.tuple, &a, &SolverOptions::default()).unwrap();
    assert_eq!(d.tuple, w.tuple);
}

#[test]
fn deformation_to_nearby_eigenvalues() {
    let w = build_tuple(&hypergeometric(), &SolverOptions::default()).unwrap();
    let a = w.tuple.declared_classes().eigenvalues().unwrap().clone();
    let d = deform(&w.tuple, &displaced(&a, 0.01), &SolverOptions::default()).unwrap();
    assert!(d.tuple.residual() <= 1e-10);
    assert!(d.step_residuals.iter().all(|&r| r <= 1e-10));
    assert!(d.shapes_preserved);
}

#[test]
fn reducible_start_is_rejected() {
    let forms = vec![JordanNormalForm::diagonal(&mv(&[1, 1])); 2];
    let a = EigenvalueAssignment::new(
        Flavor::Additive,
        vec![
            vec![("1".parse().unwrap(), 1), ("2".parse().unwrap(), 1)],
            vec![("-1".parse().unwrap(), 1), ("-2".parse().unwrap(), 1)],
        ],
    )
    .unwrap();
    let t = ClassTuple::new(Flavor::Additive, forms).unwrap().with_eigenvalues(a).unwrap();
    // direct sum of two 1×1 solutions
    let mut d1 = CMat::zeros(2, 2);
    d1[(0, 0)] = c(1.0, 0.0);
    d1[(1, 1)] = c(2.0, 0.0);
    let tuple = MatrixTuple::new(Flavor::Additive, vec![d1.clone(), -d1], t).unwrap();
    let target = EigenvalueAssignment::new(
        Flavor::Additive,
        vec![
            vec![("1".parse().unwrap(), 1), ("3".parse().unwrap(), 1)],
            vec![("-1".parse().unwrap(), 1), ("-3".parse().unwrap(), 1)],
        ],
    )
    .unwrap();
    assert_eq!(deform(&tuple, &target, &SolverOptions::default()), Err(Error::CentralizerNotTrivial(2)));
}

#[test]
fn diagonal_limits() {
    let nil = JordanNormalForm::single_eigenvalue(dspkit::Partition::new(vec![4]).unwrap()).unwrap();
    let r = diagonal_limit_check(&nil, &[1e-2, 0.0], 1e-8);
    assert!(r.all_ok, "{r:?}");
    assert_eq!(r.entries[0].identified.as_ref().unwrap().to_diagonal(), mv(&[1, 1, 1, 1]));
    assert_eq!(r.entries[1].identified.as_ref().unwrap(), &nil);

    let two = JordanNormalForm::new(vec![
        (dspkit::Label(0), dspkit::Partition::new(vec![2]).unwrap()),
        (dspkit::Label(1), dspkit::Partition::new(vec![1]).unwrap()),
    ])
    .unwrap();
    let r = diagonal_limit_check(&two, &[1e-2, -1e-3], 1e-8);
    assert!(r.all_ok, "{r:?}");
    assert_eq!(r.entries[0].identified.as_ref().unwrap().to_diagonal(), two.to_diagonal());
}
