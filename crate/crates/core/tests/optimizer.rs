use std::sync::Mutex;

use num_complex::Complex64;
use werner_holevo::entropy::{entropy_output, ExponentRange};
use werner_holevo::expansion::{additivity_rhs, purity_closed_form};
use werner_holevo::optimize::{
    certify_additivity, descend, maximize_pnorm, minimize_entropy_output, minimize_entropy_output_observed,
    OptimizerConfig,
};
use werner_holevo::random::{random_pure_state, rng_from_seed};
use werner_holevo::{ProductChannel, PureState, SiteDims};

const LN2: f64 = std::f64::consts::LN_2;

fn dims(d: &[usize]) -> SiteDims {
    SiteDims::new(d.to_vec()).unwrap()
}

fn cfg(restarts: usize, seed: u64) -> OptimizerConfig {
    OptimizerConfig {
        restarts,
        seed,
        ..OptimizerConfig::default()
    }
}

#[test]
fn single_channel_minimum() {
    let pc = ProductChannel::from_dims(&dims(&[3]));
    let r = minimize_entropy_output(&pc, 2.0, &cfg(4, 1)).unwrap();
    assert!((r.best_value - LN2).abs() < 1e-8);
    assert_eq!(r.per_restart_values.len(), 4);
    let qubit = ProductChannel::from_dims(&dims(&[2]));
    for p in [1.0, 1.5, 2.0] {
        assert!(minimize_entropy_output(&qubit, p, &cfg(2, 1)).unwrap().best_value.abs() < 1e-10);
    }
}

#[test]
fn two_copy_minimum() {
    let pc = ProductChannel::from_dims(&dims(&[3, 3]));
    let r = minimize_entropy_output(&pc, 2.0, &cfg(8, 2)).unwrap();
    assert!((r.best_value - 2.0 * LN2).abs() < 1e-6, "{}", r.best_value);
}

#[test]
fn maximal_pnorm_values() {
    let c = cfg(4, 3);
    let one = maximize_pnorm(&ProductChannel::from_dims(&dims(&[3])), 2.0, &c).unwrap();
    assert!((one - 0.5f64.sqrt()).abs() < 1e-8);
    let qubit = maximize_pnorm(&ProductChannel::from_dims(&dims(&[2])), 1.5, &c).unwrap();
    assert!((qubit - 1.0).abs() < 1e-6);
    let pair = maximize_pnorm(&ProductChannel::from_dims(&dims(&[3, 4])), 2.0, &cfg(8, 3)).unwrap();
    assert!((pair - (1.0f64 / 6.0).sqrt()).abs() < 1e-6, "{pair}");
}

#[test]
fn pnorm_and_entropy_optima_are_dual() {
    for (ds, p) in [(vec![3], 1.5), (vec![4], 2.0), (vec![2, 3], 1.25)] {
        let pc = ProductChannel::from_dims(&dims(&ds));
        let c = cfg(6, 4);
        let meo = minimize_entropy_output(&pc, p, &c).unwrap().best_value;
        let nu = maximize_pnorm(&pc, p, &c).unwrap();
        assert!((meo + p / (p - 1.0) * nu.ln()).abs() < 1e-8, "{ds:?} p={p}");
    }
}

#[test]
fn reported_value_is_attained_by_reported_state() {
    let pc = ProductChannel::from_dims(&dims(&[2, 4]));
    for p in [1.0, 1.5, 2.0] {
        let r = minimize_entropy_output(&pc, p, &cfg(3, 5)).unwrap();
        let again = entropy_output(&pc, &r.best_state, p).unwrap();
        assert!((r.best_value - again).abs() <= 1e-12);
        assert!(r.per_restart_values.iter().all(|&v| v >= r.best_value));
    }
}

#[test]
fn visited_points_respect_the_purity_lower_bound() {
    let sd = dims(&[3, 3]);
    let pc = ProductChannel::from_dims(&sd);
    let floor = additivity_rhs(&sd);
    // largest violation of S_p(φ) ≥ −log tr X² ≥ floor over all visited points
    let worst = Mutex::new(f64::NEG_INFINITY);
    let visits = Mutex::new(0usize);
    for p in [1.0, 1.5, 2.0] {
        let observer = |_k: usize, x: &[Complex64], f: f64| {
            let phi = PureState::normalized(x.to_vec(), sd.clone()).unwrap();
            let bound = -purity_closed_form(&sd, &phi).unwrap().ln();
            let mut w = worst.lock().unwrap();
            *w = w.max(bound - f).max(floor - bound);
            *visits.lock().unwrap() += 1;
        };
        minimize_entropy_output_observed(&pc, p, &cfg(3, 6), &observer).unwrap();
    }
    assert!(*visits.lock().unwrap() > 9);
    assert!(*worst.lock().unwrap() <= 1e-9);
}

#[test]
fn results_depend_only_on_seed() {
    let pc = ProductChannel::from_dims(&dims(&[2, 3]));
    let a = minimize_entropy_output(&pc, 1.5, &cfg(4, 77)).unwrap();
    let b = minimize_entropy_output(&pc, 1.5, &cfg(4, 77)).unwrap();
    assert_eq!(a, b);
    let threaded = OptimizerConfig {
        threads: 3,
        ..cfg(4, 77)
    };
    let c = minimize_entropy_output(&pc, 1.5, &threaded).unwrap();
    assert_eq!(a.best_value.to_bits(), c.best_value.to_bits());
    assert_eq!(a.per_restart_values, c.per_restart_values);
    let other = minimize_entropy_output(&pc, 1.5, &cfg(4, 78)).unwrap();
    // different starting points
    assert_ne!(a.traces[0][0], other.traces[0][0]);
}

#[test]
fn single_channel_objective_is_flat() {
    let mut rng = rng_from_seed(8);
    for d in [3, 5] {
        let sd = SiteDims::single(d).unwrap();
        let pc = ProductChannel::from_dims(&sd);
        let vals: Vec<f64> = (0..1000)
            .map(|_| entropy_output(&pc, &random_pure_state(&mut rng, &sd), 1.5).unwrap())
            .collect();
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / vals.len() as f64;
        assert!(var.sqrt() <= 1e-10);
        assert!((mean - ((d - 1) as f64).ln()).abs() < 1e-12);
    }
}

#[test]
fn traces_decrease_strictly() {
    let pc = ProductChannel::from_dims(&dims(&[3, 2]));
    let r = minimize_entropy_output(&pc, 2.0, &cfg(3, 9)).unwrap();
    for t in &r.traces {
        assert!(!t.is_empty());
        assert!(t.windows(2).all(|w| w[1] < w[0]));
    }
}

#[test]
fn descend_on_a_quadratic_form() {
    // minimizing <x|H|x> over the sphere finds the smallest eigenvalue
    let h = [1.0, 3.0, -2.0, 0.5];
    let objective =
        |v: &[Complex64]| -> werner_holevo::Result<f64> { Ok(v.iter().zip(&h).map(|(z, w)| z.norm_sqr() * w).sum()) };
    let start = vec![Complex64::new(0.5, 0.1); 4];
    let c = OptimizerConfig::default();
    let mut seen = 0;
    let run = descend(&objective, start, &c, |_, _| seen += 1).unwrap();
    assert!((run.value + 2.0).abs() < 1e-8, "{}", run.value);
    assert_eq!(seen, run.trace.len());
    assert!(run.iterations <= c.max_iters);
}

#[test]
fn iteration_cap_is_respected() {
    let pc = ProductChannel::from_dims(&dims(&[3, 3]));
    let c = OptimizerConfig {
        max_iters: 3,
        ..cfg(2, 10)
    };
    let r = minimize_entropy_output(&pc, 1.0, &c).unwrap();
    assert!(r.iterations_used.iter().all(|&n| n <= 3));
    assert!(r.traces.iter().all(|t| t.len() <= 4));
}

#[test]
fn unrestricted_range_reaches_high_exponents() {
    let pc = ProductChannel::from_dims(&dims(&[4]));
    let c = OptimizerConfig {
        exponent_range: ExponentRange::Unrestricted,
        ..cfg(2, 11)
    };
    let r = minimize_entropy_output(&pc, 3.0, &c).unwrap();
    assert!((r.best_value - 3f64.ln()).abs() < 1e-8);
}

#[test]
fn certificate_examples() {
    for (ds, p) in [(vec![3, 3], 1.0), (vec![2, 5], 2.0), (vec![3, 3, 3], 1.5)] {
        let sd = dims(&ds);
        let cert = certify_additivity(&sd, p, &cfg(32, 12)).unwrap();
        assert!(cert.passes(), "{ds:?} p={p} gap={}", cert.gap);
        assert!((cert.meo_sum_of_singles - additivity_rhs(&sd)).abs() < 1e-15);
        // the optimum is reached at (close to) a product state
        assert!(cert.argmin_product_distance < 1e-3, "{}", cert.argmin_product_distance);
    }
    let cert = certify_additivity(&dims(&[3, 3]), 1.0, &cfg(32, 12)).unwrap();
    assert!((cert.meo_product_estimate - 2.0 * LN2).abs() < 1e-4);
}

#[test]
fn certificate_preconditions() {
    assert!(certify_additivity(&dims(&[3]), 1.0, &cfg(1, 0)).is_err());
    assert!(certify_additivity(&dims(&[3, 3]), 2.5, &cfg(1, 0)).is_err());
    let bad = PureState::basis(dims(&[3]), 0).unwrap();
    assert!(entropy_output(&ProductChannel::from_dims(&dims(&[2])), &bad, 1.0).is_err());
}
