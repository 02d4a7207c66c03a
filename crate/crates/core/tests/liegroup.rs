//! Properties of the SE(3) algebra against independent matrix oracles.

use cosserat_shell::liegroup::{
    ad, ad_tilde, dexp_se3, exp_se3, hat_se3, log_se3, log_so3, skew, vee_se3, Mat6, Pose, Twist,
    Vec3, Vec6, Wrench,
};
use nalgebra::Matrix4;
use proptest::prelude::*;

/// Matrix exponential by scaling and squaring of a truncated Taylor series.
fn expm(a: &Matrix4<f64>) -> Matrix4<f64> {
    let norm = a.abs().max();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a / 2f64.powi(squarings as i32);
    let mut term = Matrix4::identity();
    let mut sum = Matrix4::identity();
    for k in 1..30 {
        term = term * scaled / k as f64;
        sum += term;
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}

fn twist(v: [f64; 3], w: [f64; 3]) -> Twist {
    Twist::new(Vec3::from(v), Vec3::from(w))
}

fn arb_vec(scale: f64) -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(-scale..scale)
}

fn arb_twist(rot: f64) -> impl Strategy<Value = Twist> {
    (arb_vec(2.0), arb_vec(rot)).prop_map(|(v, w)| twist(v, w))
}

/// Rotation angle strictly below the log domain.
fn arb_loggable() -> impl Strategy<Value = Twist> {
    (arb_vec(2.0), arb_vec(1.0), 0.0..3.0f64).prop_map(|(v, w, angle)| {
        let w = Vec3::from(w);
        let axis = if w.norm() > 1e-9 {
            w.normalize()
        } else {
            Vec3::z()
        };
        Twist::new(Vec3::from(v), axis * angle)
    })
}

fn max_abs(m: &Matrix4<f64>) -> f64 {
    m.abs().max()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn exp_matches_matrix_exponential(t in arb_twist(3.0)) {
        let g = exp_se3(&t).to_homogeneous();
        prop_assert!(max_abs(&(g - expm(&hat_se3(&t)))) < 1e-12);
    }

    #[test]
    fn tiny_angles_match_matrix_exponential(v in arb_vec(1.0), w in arb_vec(1e-3)) {
        let t = twist(v, w);
        let g = exp_se3(&t).to_homogeneous();
        prop_assert!(max_abs(&(g - expm(&hat_se3(&t)))) < 1e-14);
    }

    #[test]
    fn log_inverts_exp(t in arb_loggable()) {
        let back = log_se3(&exp_se3(&t)).unwrap();
        prop_assert!((back - t).norm() < 1e-10 * (1.0 + t.norm()));
    }

    #[test]
    fn exp_inverts_log(t in arb_loggable()) {
        let g = exp_se3(&t);
        let again = exp_se3(&log_se3(&g).unwrap());
        prop_assert!(g.distance_max(&again) < 1e-12);
    }

    #[test]
    fn vee_inverts_hat(t in arb_twist(5.0)) {
        prop_assert_eq!(vee_se3(&hat_se3(&t)).unwrap(), t);
    }

    #[test]
    fn exp_of_commuting_twists_is_homomorphic(t in arb_twist(1.5), a in -2.0..2.0f64, b in -2.0..2.0f64) {
        let lhs = exp_se3(&(t * (a + b)));
        let rhs = exp_se3(&(t * a)).compose(&exp_se3(&(t * b)));
        prop_assert!(lhs.distance_max(&rhs) < 1e-12);
    }

    #[test]
    fn exp_of_negated_twist_is_inverse(t in arb_twist(3.0)) {
        let prod = exp_se3(&t).compose(&exp_se3(&-t));
        prop_assert!(prod.distance_max(&Pose::identity()) < 1e-12);
    }

    #[test]
    fn rotations_stay_orthonormal(t in arb_twist(10.0)) {
        let r = *exp_se3(&t).rotation.matrix();
        prop_assert!((r.transpose() * r - nalgebra::Matrix3::identity()).abs().max() < 1e-14);
        prop_assert!((r.determinant() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn adjoint_conjugates_hat(t in arb_twist(3.0), u in arb_twist(3.0)) {
        let g = exp_se3(&t);
        let h = g.to_homogeneous();
        let lhs = h * hat_se3(&u) * g.inverse().to_homogeneous();
        let rhs = hat_se3(&Twist::from_vector(&(g.adjoint() * u.to_vector())));
        prop_assert!(max_abs(&(lhs - rhs)) < 1e-12 * (1.0 + u.norm()) * (1.0 + t.norm()).powi(2));
    }

    #[test]
    fn adjoint_is_a_homomorphism(a in arb_twist(3.0), b in arb_twist(3.0)) {
        let (g, h) = (exp_se3(&a), exp_se3(&b));
        let diff = g.compose(&h).adjoint() - g.adjoint() * h.adjoint();
        prop_assert!(diff.abs().max() < 1e-11);
    }

    #[test]
    fn small_ad_is_the_bracket(a in arb_twist(3.0), b in arb_twist(3.0)) {
        let (x, y) = (hat_se3(&a), hat_se3(&b));
        let bracket = vee_se3(&(x * y - y * x)).unwrap();
        prop_assert!((Twist::from_vector(&(ad(&a) * b.to_vector())) - bracket).norm() < 1e-12);
    }

    #[test]
    fn ad_is_antisymmetric_in_its_arguments(a in arb_twist(3.0), b in arb_twist(3.0)) {
        let sum = ad(&a) * b.to_vector() + ad(&b) * a.to_vector();
        prop_assert!(sum.norm() < 1e-12);
    }

    #[test]
    fn ad_tilde_swaps_the_coadjoint_action(n in arb_vec(3.0), m in arb_vec(3.0), u in arb_twist(3.0)) {
        let s = Wrench::new(Vec3::from(n), Vec3::from(m));
        let lhs = ad(&u).transpose() * s.to_vector();
        let rhs = ad_tilde(&s) * u.to_vector();
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn dexp_matches_finite_differences(t in arb_twist(3.0), u in arb_twist(1.0)) {
        // (exp(-t) d/ds exp(t + s u))^v at s = 0, central differences.
        let step = 1e-5;
        let inv = exp_se3(&-t).to_homogeneous();
        let plus = exp_se3(&(t + u * step)).to_homogeneous();
        let minus = exp_se3(&(t - u * step)).to_homogeneous();
        let m = inv * (plus - minus) / (2.0 * step);
        let fd = Vec6::new(m[(0, 3)], m[(1, 3)], m[(2, 3)], m[(2, 1)], m[(0, 2)], m[(1, 0)]);
        let exact = dexp_se3(&t) * u.to_vector();
        prop_assert!((fd - exact).norm() < 1e-8 * (1.0 + t.norm()));
    }

    #[test]
    fn dexp_is_the_ad_series(t in arb_twist(1.0)) {
        // sum_k (-ad_t)^k / (k+1)!
        let a = -ad(&t);
        let mut term = Mat6::identity();
        let mut sum = Mat6::identity();
        for k in 1..40 {
            term = term * a / (k + 1) as f64;
            sum += term;
        }
        prop_assert!((dexp_se3(&t) - sum).abs().max() < 1e-12);
    }

    #[test]
    fn so3_log_recovers_axis_angle(w in arb_vec(1.0), angle in 0.0..3.1f64) {
        let w = Vec3::from(w);
        prop_assume!(w.norm() > 1e-6);
        let phi = w.normalize() * angle;
        let r = exp_se3(&Twist::new(Vec3::zeros(), phi)).rotation;
        prop_assert!((log_so3(&r).unwrap() - phi).norm() < 1e-10);
    }

    #[test]
    fn skew_is_the_cross_product(a in arb_vec(3.0), b in arb_vec(3.0)) {
        let (a, b) = (Vec3::from(a), Vec3::from(b));
        prop_assert!((skew(&a) * b - a.cross(&b)).norm() < 1e-14);
    }
}

#[test]
fn series_and_closed_form_agree_at_the_switch() {
    for angle in [9.9e-3, 1.0e-2, 1.01e-2, 9.9e-2, 0.1, 0.101] {
        let t = Twist::new(
            Vec3::new(0.3, -0.2, 0.5),
            Vec3::new(1.0, 2.0, -1.0).normalize() * angle,
        );
        let g = exp_se3(&t).to_homogeneous();
        assert!(max_abs(&(g - expm(&hat_se3(&t)))) < 1e-15);
        let a = -ad(&t);
        let mut term = Mat6::identity();
        let mut sum = Mat6::identity();
        for k in 1..30 {
            term = term * a / (k + 1) as f64;
            sum += term;
        }
        // The closed form keeps about two digits less just above the switch.
        assert!((dexp_se3(&t) - sum).abs().max() < 1e-13);
    }
}

#[test]
fn suite_of_ten_thousand_round_trips_is_fast() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let start = std::time::Instant::now();
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let v = Vec3::from_fn(|_, _| rng.gen_range(-1.0..1.0));
        let w = Vec3::from_fn(|_, _| rng.gen_range(-1.0..1.0));
        let t = Twist::new(v, w.normalize() * rng.gen_range(0.0..3.0));
        worst = worst.max((log_se3(&exp_se3(&t)).unwrap() - t).norm());
    }
    assert!(worst < 1e-10, "worst round-trip error {worst:e}");
    assert!(start.elapsed().as_secs_f64() < 1.0);
}
