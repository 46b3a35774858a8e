//! Quadratic-potential exactness: the splitting integrator and its
//! congruence image stay on the same covariance trajectory to roundoff, the
//! global error against the exact linear flow converges at second order, and
//! the Cayley-propagated frame reproduces the covariance to second order.

use gwpd_core::dynamics::{d2_h_classical, PhasePoint, SimParams};
use gwpd_core::geometry::{moebius, sigma, SiegelPoint, SymplecticMatrix};
use gwpd_core::integrators::{cayley_step, moment_splitting_step, splitting_step};
use gwpd_core::linalg::{expm, max_abs, standard_j};
use gwpd_core::potentials::Quadratic;
use gwpd_core::rng::CounterRng;
use gwpd_core::sampling::{random_siegel, random_spd, random_vec};
use nalgebra::DVector;

const SEED: u64 = 0x5EED_0003;

fn random_setup(
    rng: &mut CounterRng,
    d: usize,
) -> (Quadratic, SimParams, PhasePoint, SiegelPoint) {
    let k = random_spd(rng, d, 0.5);
    let pot = Quadratic::new(k, DVector::zeros(d)).unwrap();
    let params = SimParams::new(0.1, 1.0).unwrap();
    let z0 = PhasePoint::from_vector(&random_vec(rng, 2 * d, 1.0)).unwrap();
    let c0 = random_siegel(rng, d);
    (pot, params, z0, c0)
}

#[test]
fn covariance_trajectory_matches_width_trajectory_over_many_steps() {
    let mut rng = CounterRng::from_seed(SEED);
    for d in [1usize, 2] {
        let (pot, params, z0, c0) = random_setup(&mut rng, d);
        let (mut z, mut c) = (z0.clone(), c0.clone());
        let (mut zm, mut sig) = (z0, sigma(&c0).unwrap());
        let dt = 0.01;
        let mut worst = 0.0_f64;
        for _ in 0..10_000 {
            let (zn, cn) = splitting_step(&z, &c, dt, &params, &pot).unwrap();
            let (zmn, sn) = moment_splitting_step(&zm, &sig, dt, &params, &pot).unwrap();
            z = zn;
            c = cn;
            zm = zmn;
            sig = sn;
            worst = worst.max(max_abs(&(sigma(&c).unwrap().matrix() - sig.matrix())));
        }
        assert!(worst < 1e-11, "d = {d}: intertwining drift {worst}");
    }
}

#[test]
fn splitting_error_halves_squares_under_dt_halving() {
    let mut rng = CounterRng::from_seed(SEED + 1);
    for d in [1usize, 2] {
        let (pot, params, z0, c0) = random_setup(&mut rng, d);
        let t_final = 1.0;
        let d2h = d2_h_classical(&z0.q, &params, &pot);
        let flow = expm(&(standard_j(d) * &d2h * t_final));
        let z_exact = &flow * z0.to_vector();
        let c_exact = moebius(&SymplecticMatrix::new(flow).unwrap(), &c0).unwrap();

        let global_error = |dt: f64| {
            let n = (t_final / dt).round() as usize;
            let (mut z, mut c) = (z0.clone(), c0.clone());
            for _ in 0..n {
                let (zn, cn) = splitting_step(&z, &c, dt, &params, &pot).unwrap();
                z = zn;
                c = cn;
            }
            let ez = (z.to_vector() - &z_exact).norm();
            let ec = max_abs(&(c.a() - c_exact.a())).max(max_abs(&(c.b() - c_exact.b())));
            ez.max(ec)
        };
        let ratio = global_error(0.02) / global_error(0.01);
        assert!(
            (3.5..=4.5).contains(&ratio),
            "d = {d}: convergence ratio {ratio}"
        );
    }
}

#[test]
fn cayley_frame_matches_covariance_to_second_order() {
    let mut rng = CounterRng::from_seed(SEED + 2);
    for d in [1usize, 2] {
        let (pot, params, z0, c0) = random_setup(&mut rng, d);
        let t_final = 1.0;

        let frame_gap = |dt: f64| {
            let n = (t_final / dt).round() as usize;
            let (mut z, mut sig) = (z0.clone(), sigma(&c0).unwrap());
            let mut frame = gwpd_core::geometry::xi_factor(&c0).unwrap();
            for _ in 0..n {
                let (zn, sn) = moment_splitting_step(&z, &sig, dt, &params, &pot).unwrap();
                let z_mid =
                    PhasePoint::from_vector(&((z.to_vector() + zn.to_vector()) * 0.5)).unwrap();
                frame = cayley_step(&frame, &z_mid, dt, &params, &pot).unwrap();
                z = zn;
                sig = sn;
            }
            max_abs(&(frame.matrix() * frame.matrix().transpose() - sig.matrix()))
        };
        let (g1, g2) = (frame_gap(0.02), frame_gap(0.01));
        let ratio = g1 / g2;
        assert!(
            (3.0..=5.0).contains(&ratio),
            "d = {d}: frame/covariance gap ratio {ratio} (g1={g1:.3e}, g2={g2:.3e})"
        );
    }
}
