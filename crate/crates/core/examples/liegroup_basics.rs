//! Exponential and logarithm of SE(3), adjoints and the differential of exp.
//!
//!     cargo run --example liegroup_basics

use cosserat_shell::liegroup::{ad, dexp_se3, exp_se3, log_se3, Twist, Vec3};

fn main() -> cosserat_shell::Result<()> {
    // A screw motion: unit translation along x while turning 90 degrees about z.
    let t = Twist::new(Vec3::x(), Vec3::z() * std::f64::consts::FRAC_PI_2);
    let g = exp_se3(&t);
    println!("exp(t): translation {:?}", g.translation.as_slice());
    for row in g.rotation.matrix().row_iter() {
        println!("        {:+.6} {:+.6} {:+.6}", row[0], row[1], row[2]);
    }
    println!("log(exp(t)) = {:?}", log_se3(&g)?.to_vector().as_slice());

    // Ad maps body twists to spatial ones: g exp(u) g^-1 = exp(Ad_g u).
    let u = Twist::new(Vec3::new(0.0, 0.0, 1.0), Vec3::y() * 0.3);
    let spatial = Twist::from_vector(&(g.adjoint() * u.to_vector()));
    let lhs = g.compose(&exp_se3(&u)).compose(&g.inverse());
    println!(
        "|g exp(u) g^-1 - exp(Ad u)| = {:.1e}",
        lhs.distance_max(&exp_se3(&spatial))
    );

    // ad is the bracket; it annihilates its own argument.
    println!("|ad_t t| = {:.1e}", (ad(&t) * t.to_vector()).norm());

    // dexp: exp(t + s u) = exp(t) exp(s dexp(t) u + O(s^2)).
    let s = 1e-6;
    let exact = exp_se3(&t).compose(&exp_se3(&Twist::from_vector(
        &(dexp_se3(&t) * u.to_vector() * s),
    )));
    println!(
        "first-order dexp error at s = 1e-6: {:.1e}",
        exact.distance_max(&exp_se3(&(t + u * s)))
    );
    Ok(())
}
