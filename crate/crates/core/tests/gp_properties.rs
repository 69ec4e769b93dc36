use nalgebra::{DMatrix, DVector, SymmetricEigen};
use proptest::prelude::*;
use rand::Rng;
use uamcts::gp::{
    fit_hyperparams, kernel_eval, log_marginal_likelihood, Bounds, Dataset, Feature, FeatureScaler, GpModel,
    KernelParams, Sample, SearchSpace,
};
use uamcts::pouring::{gen_dataset, subsample, ActionGrid, GroundTruth};
use uamcts::rng::{stream, StreamRng};

fn feature(rng: &mut StreamRng) -> Feature {
    Feature {
        level: rng.random_range(0.0..100.0),
        alpha: rng.random_range(0.25..2.0),
        duration: rng.random_range(0.1..1.0),
    }
}

fn dataset(rng: &mut StreamRng, n: usize) -> Dataset {
    let samples = (0..n).map(|_| Sample { feature: feature(rng), next_level: rng.random_range(0.0..100.0) }).collect();
    Dataset::new(samples).unwrap()
}

/// Log marginal likelihood from a dense LU-based evaluation.
fn oracle_lml(data: &Dataset, p: &KernelParams) -> f64 {
    let scaler = FeatureScaler::fit(data);
    let xs: Vec<[f64; 3]> = data.samples().iter().map(|s| scaler.apply(&s.feature.to_array())).collect();
    let n = xs.len();
    let k = DMatrix::from_fn(n, n, |i, j| p.eval(&xs[i], &xs[j]) + if i == j { p.noise_var } else { 0.0 });
    let y = DVector::from_iterator(n, data.samples().iter().map(|s| s.next_level));
    let lu = k.clone().lu();
    let alpha = lu.solve(&y).unwrap();
    -0.5 * y.dot(&alpha) - 0.5 * lu.determinant().ln() - 0.5 * n as f64 * (2.0 * std::f64::consts::PI).ln()
}

#[test]
fn gram_matrices_are_positive_semidefinite() {
    let mut rng = stream(21, "psd", &[]);
    for _ in 0..50 {
        let params = KernelParams {
            dot_sigma0_sq: rng.random_range(0.0..3.0),
            rq_scale: rng.random_range(0.1..5.0),
            rq_alpha: rng.random_range(0.1..5.0),
            noise_var: 0.0,
        };
        let fs: Vec<Feature> = (0..10).map(|_| feature(&mut rng)).collect();
        let gram = DMatrix::from_fn(10, 10, |i, j| kernel_eval(&params, &fs[i], &fs[j]).unwrap());
        assert_eq!(gram, gram.transpose());
        let min = SymmetricEigen::new(gram.clone()).eigenvalues.min();
        let scale = gram.diagonal().max();
        assert!(min >= -1e-8 * scale.max(1.0), "min eigenvalue {min}");
    }
}

#[test]
fn variance_never_exceeds_prior() {
    let mut rng = stream(22, "prior", &[]);
    for _ in 0..30 {
        let n = rng.random_range(1..12);
        let data = dataset(&mut rng, n);
        let params = KernelParams::default();
        let model = GpModel::fit(&data, &params).unwrap();
        for _ in 0..20 {
            let q = feature(&mut rng);
            let z = model.scaler().apply(&q.to_array());
            let prior = params.eval(&z, &z);
            let v = model.predict(&q).unwrap().variance;
            assert!(v >= 0.0 && v <= prior + params.noise_var + 1e-9, "{v} > {prior}");
        }
    }
}

#[test]
fn adding_a_point_never_increases_variance() {
    let mut rng = stream(23, "monotone", &[]);
    for _ in 0..30 {
        let n = rng.random_range(2..10);
        let full = dataset(&mut rng, n + 1);
        let fewer = Dataset::new(full.samples()[..n].to_vec()).unwrap();
        let params = KernelParams { noise_var: rng.random_range(0.05..2.0), ..Default::default() };
        // One scaler for both models so only the data differ.
        let scaler = FeatureScaler::fit(&full);
        let small = GpModel::with_scaler(&fewer, &params, scaler).unwrap();
        let big = GpModel::with_scaler(&full, &params, scaler).unwrap();
        for _ in 0..20 {
            let q = feature(&mut rng);
            let (vs, vb) = (small.predict(&q).unwrap().variance, big.predict(&q).unwrap().variance);
            assert!(vb <= vs + 1e-9, "variance rose from {vs} to {vb}");
        }
    }
}

#[test]
fn model_lml_matches_oracle() {
    let mut rng = stream(24, "lml", &[]);
    for _ in 0..10 {
        let n = rng.random_range(2..10);
        let data = dataset(&mut rng, n);
        let params = KernelParams { noise_var: 0.5, ..Default::default() };
        let model = GpModel::fit(&data, &params).unwrap();
        let (a, b) = (model.log_marginal_likelihood(), oracle_lml(&data, &params));
        assert!((a - b).abs() <= 1e-8 * b.abs().max(1.0), "{a} vs {b}");
    }
}

#[test]
fn small_models_have_larger_test_error() {
    let gt = GroundTruth::default();
    let grid = ActionGrid::default();
    let mut larger = 0;
    for draw in 0..50u64 {
        let d40 = gen_dataset(&gt, &grid, 40, &mut stream(draw, "mse-data", &[])).unwrap();
        let d5 = subsample(&d40, 5, &mut stream(draw, "mse-sub", &[])).unwrap();
        let test = gen_dataset(&gt, &grid, 200, &mut stream(draw, "mse-test", &[])).unwrap();
        let params = KernelParams::default();
        let m40 = GpModel::fit(&d40, &params).unwrap().mse(&test).unwrap();
        let m5 = GpModel::fit(&d5, &params).unwrap().mse(&test).unwrap();
        larger += usize::from(m5 > m40);
    }
    assert!(larger >= 45, "5-point MSE exceeded 40-point MSE in only {larger}/50 draws");
}

#[test]
fn noise_free_dot_data_selects_the_lowest_noise() {
    let mut rng = stream(25, "dot", &[]);
    // A draw from the dot-product prior: unit-variance weights on the
    // standardized features plus a bias within the σ₀² range.
    let base = dataset(&mut rng, 12);
    let scaler = FeatureScaler::fit(&base);
    let w: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.5..1.5));
    let samples: Vec<Sample> = base
        .samples()
        .iter()
        .map(|s| {
            let z = scaler.apply(&s.feature.to_array());
            Sample { feature: s.feature, next_level: 10.0 + w[0] * z[0] + w[1] * z[1] + w[2] * z[2] }
        })
        .collect();
    let data = Dataset::new(samples).unwrap();
    let space = SearchSpace::default();
    let fit = fit_hyperparams(&data, &space).unwrap();
    assert_eq!(fit.params.noise_var, space.noise_var.lo);

    // The selected point is at least as likely as every coarse grid point.
    let best = oracle_lml(&data, &fit.params);
    let grid = |b: Bounds| [b.lo, (b.lo * b.hi).sqrt(), b.hi];
    for s0 in grid(space.dot_sigma0_sq) {
        for l in grid(space.rq_scale) {
            for a in grid(space.rq_alpha) {
                for nv in grid(space.noise_var) {
                    let p = KernelParams { dot_sigma0_sq: s0, rq_scale: l, rq_alpha: a, noise_var: nv };
                    assert!(oracle_lml(&data, &p) <= best + 1e-6);
                }
            }
        }
    }
}

/// Duplicating every point is equivalent to halving the noise on the
/// original data, up to a term in σ² alone:
/// `L_dup(K, σ²) = L(K, σ²/2) − (n/2)·ln(4πσ²)`.
#[test]
fn duplicated_data_likelihood_identity() {
    let mut rng = stream(27, "dup", &[]);
    for _ in 0..10 {
        let n = rng.random_range(2..10);
        let data = dataset(&mut rng, n);
        let mut twice = data.samples().to_vec();
        twice.extend_from_slice(data.samples());
        let dup = Dataset::new(twice).unwrap();
        let p = KernelParams { noise_var: rng.random_range(0.05..5.0), ..Default::default() };
        let half = KernelParams { noise_var: p.noise_var / 2.0, ..p };
        let lhs = log_marginal_likelihood(&dup, &p).unwrap();
        let rhs = log_marginal_likelihood(&data, &half).unwrap()
            - 0.5 * n as f64 * (4.0 * std::f64::consts::PI * p.noise_var).ln();
        assert!((lhs - rhs).abs() <= 1e-8 * lhs.abs().max(1.0), "{lhs} vs {rhs}");
        assert!((lhs - oracle_lml(&dup, &p)).abs() <= 1e-8 * lhs.abs().max(1.0));
    }
}

#[test]
fn fitting_is_deterministic() {
    let gt = GroundTruth::default();
    let data = gen_dataset(&gt, &ActionGrid::default(), 20, &mut stream(26, "det", &[])).unwrap();
    let a = fit_hyperparams(&data, &SearchSpace::default()).unwrap();
    let b = fit_hyperparams(&data, &SearchSpace::default()).unwrap();
    assert_eq!(a.params, b.params);
    let q = Feature { level: 30.0, alpha: 1.25, duration: 0.5 };
    let (ma, mb) = (GpModel::fit(&data, &a.params).unwrap(), GpModel::fit(&data, &b.params).unwrap());
    let (pa, pb) = (ma.predict(&q).unwrap(), mb.predict(&q).unwrap());
    assert_eq!(pa.raw_mean.to_bits(), pb.raw_mean.to_bits());
    assert_eq!(pa.variance.to_bits(), pb.variance.to_bits());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn predictions_are_finite_and_bounded(seed in any::<u64>(), n in 1usize..15) {
        let mut rng = stream(seed, "finite", &[]);
        let data = dataset(&mut rng, n);
        let model = GpModel::fit(&data, &KernelParams::default()).unwrap();
        let p = model.predict(&feature(&mut rng)).unwrap();
        prop_assert!(p.raw_mean.is_finite() && p.variance.is_finite() && p.variance >= 0.0);
        prop_assert!((0.0..=100.0).contains(&p.mean));
    }
}
