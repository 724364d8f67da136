use binid::estimator::{Estimator, EstimatorConfig};
use binid::geometry::{project, weighted_norm, ConvexBox, SymEigen, WeightedMetric};
use binid::linalg::{sub, Matrix};
use binid::noise::NoiseModel;
use binid::sim::ExcitationDiagnostics;
use proptest::prelude::*;

fn spd(p: usize) -> impl Strategy<Value = Matrix<f64>> {
    (
        prop::collection::vec(-1.0..1.0f64, p * p),
        prop::collection::vec(0.05..2.0f64, p),
    )
        .prop_map(move |(b, d)| {
            // BᵀB + diag(d)
            let b = Matrix::from_fn(p, p, |i, j| b[i * p + j]);
            let mut q = b.transpose().matmul(&b);
            for (i, di) in d.iter().enumerate() {
                q[(i, i)] += di;
            }
            q.symmetrize();
            q
        })
}

fn unit_box(p: usize) -> impl Strategy<Value = ConvexBox<f64>> {
    prop::collection::vec((-2.0..1.0f64, 0.05..2.0f64), p).prop_map(|iv| {
        let lo: Vec<f64> = iv.iter().map(|&(l, _)| l).collect();
        let hi: Vec<f64> = iv.iter().map(|&(l, w)| l + w).collect();
        ConvexBox::new(lo, hi).unwrap()
    })
}

fn instance(p: usize) -> impl Strategy<Value = (Matrix<f64>, ConvexBox<f64>, Vec<f64>, Vec<f64>)> {
    (
        spd(p),
        unit_box(p),
        prop::collection::vec(-5.0..5.0f64, p),
        prop::collection::vec(-5.0..5.0f64, p),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn projection_lands_in_box_and_is_idempotent((q, d, x, _) in (1usize..=5).prop_flat_map(instance)) {
        let q = WeightedMetric::new(q).unwrap();
        let px = project(&q, &d, &x).unwrap();
        prop_assert!(d.contains(&px));
        let ppx = project(&q, &d, &px).unwrap();
        for (a, b) in px.iter().zip(&ppx) {
            prop_assert!((a - b).abs() <= 1e-9);
        }
    }

    #[test]
    fn projection_is_nonexpansive((q, d, x, y) in (1usize..=5).prop_flat_map(instance)) {
        let q = WeightedMetric::new(q).unwrap();
        let px = project(&q, &d, &x).unwrap();
        let py = project(&q, &d, &y).unwrap();
        let lhs = weighted_norm(&q, &sub(&px, &py)).unwrap();
        let rhs = weighted_norm(&q, &sub(&x, &y)).unwrap();
        prop_assert!(lhs <= rhs + 1e-9 * (1.0 + rhs), "{lhs} > {rhs}");
    }

    #[test]
    fn projection_beats_box_points((q, d, x, y) in (1usize..=4).prop_flat_map(instance)) {
        // Any point of the box is at least as far from x as the projection.
        let q = WeightedMetric::new(q).unwrap();
        let px = project(&q, &d, &x).unwrap();
        let other = d.clamp(&y);
        let best = weighted_norm(&q, &sub(&x, &px)).unwrap();
        let alt = weighted_norm(&q, &sub(&x, &other)).unwrap();
        prop_assert!(best <= alt + 1e-9 * (1.0 + alt));
    }

    #[test]
    fn interior_points_are_fixed((q, d, _, _) in (1usize..=5).prop_flat_map(instance), t in prop::collection::vec(0.01..0.99f64, 5)) {
        let q = WeightedMetric::new(q).unwrap();
        let x: Vec<f64> = (0..d.dim()).map(|i| d.lo()[i] + t[i] * (d.hi()[i] - d.lo()[i])).collect();
        prop_assert_eq!(project(&q, &d, &x).unwrap(), x);
    }

    #[test]
    fn inf_density_bounds_pdf(sigma in 0.5..3.0f64, r1 in 0.0..4.0f64, dr in 0.0..2.0f64, t in -1.0..1.0f64, k in 1u64..1000) {
        for noise in [NoiseModel::gaussian(sigma), NoiseModel::gaussian_log_decay(sigma)] {
            let lo = noise.inf_density(k, r1).unwrap();
            let hi = noise.inf_density(k, r1 + dr).unwrap();
            prop_assert!(hi <= lo);
            prop_assert!(lo <= noise.pdf(k, t * r1) + 1e-15);
        }
    }

    #[test]
    fn cdf_derivative_is_pdf(sigma in 0.2..3.0f64, x in -6.0..6.0f64) {
        let n = NoiseModel::gaussian(sigma);
        let h = 1e-5;
        let fd = (n.cdf(1, x + h) - n.cdf(1, x - h)) / (2.0 * h);
        prop_assert!((fd - n.pdf(1, x)).abs() < 1e-7);
    }

    #[test]
    fn estimator_invariants(
        seed_phis in prop::collection::vec((prop::collection::vec(-1.5..1.5f64, 3), -0.5..0.5f64, any::<bool>()), 1..200),
    ) {
        let cfg = EstimatorConfig {
            domain: ConvexBox::symmetric(2.0, 3).unwrap(),
            regressor_bound: 0.5,
            threshold_bound: 0.5,
            noise: NoiseModel::gaussian(1.0),
            beta0: 0.03,
            p0: Matrix::from_diag(&[1.0, 2.0, 0.5]),
            theta0: vec![0.5, -1.0, 1.5],
        };
        let mut est = Estimator::new(cfg).unwrap();
        let mut beta = est.beta();
        for (phi, c, s) in &seed_phis {
            let out = est.step(phi, *c, *s).unwrap();
            let bit = if *s { 1.0 } else { 0.0 };
            prop_assert!(out.e >= bit - 1.0 && out.e <= bit);
            prop_assert!(out.a > 0.0 && out.a <= 1.0);
            prop_assert!(est.beta() <= beta);
            beta = est.beta();
            prop_assert!(est.domain().contains(est.estimate()));
            let r = est.covariance().matmul(est.covariance_inverse()).identity_residual();
            prop_assert!(r < 1e-9, "residual {r}");
        }
    }

    #[test]
    fn excitation_lambda_min_is_monotone(phis in prop::collection::vec(prop::collection::vec(-2.0..2.0f64, 3), 1..50)) {
        let mut diag = ExcitationDiagnostics::new(Matrix::identity(3));
        let mut prev = SymEigen::new(diag.accumulated()).unwrap().min();
        for phi in &phis {
            diag.push(phi);
            let now = SymEigen::new(diag.accumulated()).unwrap().min();
            prop_assert!(now >= prev - 1e-10);
            prev = now;
        }
    }
}

#[test]
fn samples_follow_the_cdf() {
    use rand::SeedableRng;
    let n = NoiseModel::gaussian(1.5);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let mut xs: Vec<f64> = (0..100_000).map(|_| n.sample(1, &mut rng)).collect();
    xs.sort_by(f64::total_cmp);
    let m = xs.len() as f64;
    let ks = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = n.cdf(1, x);
            (f - i as f64 / m).abs().max(((i + 1) as f64 / m - f).abs())
        })
        .fold(0.0, f64::max);
    assert!(ks < 0.01, "KS distance {ks}");
}
