use std::f64::consts::PI;

use proptest::prelude::*;

use prft::applications::{protocol_simulate, purity_prediction, ProtocolParams};
use prft::counting::invariants::{conjugation_defect, normalisation_defect};
use prft::counting::{convolve, dynamical_mgf, quasiprobabilities, redistribute, Quasiprobabilities};
use prft::floquet::{fold, quasienergies};
use prft::linalg::{unitarity_defect, CMat};
use prft::semiclassical::{matrix_power, propagate, propagate_generalized, ChiSampling, IntegratorSpec};
use prft::*;

fn matter(theta: f64, phi: f64) -> MatterState {
    MatterState::from_slice(&[Complex64::new((theta / 2.0).cos(), 0.0), Complex64::from_polar((theta / 2.0).sin(), phi)])
        .unwrap()
}

fn max_diff(a: &CMat, b: &CMat) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn rabi_params() -> impl Strategy<Value = (f64, f64, f64, f64)> {
    (0.3..2.0f64, 0.5..3.0f64, 0.0..1.0f64, 0.0..2.0 * PI)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn propagators_stay_unitary((h_z, omega, g, phase) in rabi_params(), t in 0.0..20.0f64) {
        let sys = DrivenSystem::rabi(h_z, omega, g, phase).unwrap();
        let u = propagate(&sys, &sys.phases(), &[t], &IntegratorSpec::default()).unwrap();
        prop_assert!(unitarity_defect(&u[0]) < 1e-12);
    }

    #[test]
    fn generating_function_normalised_and_conjugate_symmetric(
        (h_z, omega, g, phase) in rabi_params(),
        t in 0.1..8.0f64,
        theta in 0.0..PI,
        phi in 0.0..2.0 * PI,
    ) {
        let sys = DrivenSystem::rabi(h_z, omega, g, phase).unwrap();
        let grid = ChiSampling::Grid(CountingGrid::new(128).unwrap());
        let set = propagate_generalized(&sys, 0, grid, &[t], &IntegratorSpec::default()).unwrap();
        let m = dynamical_mgf(&set, 0, matter(theta, phi).vector()).unwrap();
        prop_assert!(normalisation_defect(&m) < 1e-12);
        prop_assert!(conjugation_defect(&m) < 1e-12);
        let q = quasiprobabilities(&m).unwrap();
        prop_assert!((q.total() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn quasienergies_lie_in_first_zone((h_z, omega, g, phase) in rabi_params()) {
        let sys = DrivenSystem::rabi(h_z, omega, g, phase).unwrap();
        let tau = sys.period().unwrap();
        let u = propagate(&sys, &sys.phases(), &[tau], &IntegratorSpec::default()).unwrap();
        let half = PI / tau;
        let (e, _) = quasienergies(&u[0], tau).unwrap();
        for x in e {
            prop_assert!(x > -half && x <= half + 1e-12);
            prop_assert!((fold(x + 2.0 * half, 2.0 * half) - x).abs() < 1e-9);
        }
    }

    #[test]
    fn stroboscopic_powers((h_z, omega, g, phase) in rabi_params(), n in 1u64..6) {
        let sys = DrivenSystem::rabi(h_z, omega, g, phase).unwrap();
        let tau = sys.period().unwrap();
        let spec = IntegratorSpec { use_periodicity: false, ..IntegratorSpec::default() };
        let u = propagate(&sys, &sys.phases(), &[tau, n as f64 * tau], &spec).unwrap();
        prop_assert!(max_diff(&u[1], &matrix_power(&u[0], n)) < 1e-9);
    }

    #[test]
    fn predicted_purity_is_bounded(
        c in 0.0..1.0f64,
        d1 in -1.0..1.0f64,
        d2 in -1.0..1.0f64,
        variance in 1.0..1e4f64,
        t in 0.0..1e3f64,
    ) {
        let p = purity_prediction(c.sqrt(), (1.0 - c).sqrt(), d1, d2, variance, t).unwrap();
        prop_assert!((0.5 - 1e-12..=1.0 + 1e-12).contains(&p));
    }

    #[test]
    fn convolution_with_probabilities_is_a_mixture(
        q in prop::collection::vec(0.0..1.0f64, 1..8),
        p0 in prop::collection::vec(0.0..1.0f64, 1..12),
        first in -5i64..5,
    ) {
        let sq: f64 = q.iter().sum::<f64>().max(1e-12);
        let sp: f64 = p0.iter().sum::<f64>().max(1e-12);
        let q = Quasiprobabilities { mode: 0, t: 0.0, first, q: q.iter().map(|x| x / sq).collect() };
        let p0: Vec<f64> = p0.iter().map(|x| x / sp).collect();
        let (start, p) = redistribute(&q, 100, &p0).unwrap();
        prop_assert_eq!(start, 100 + first);
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(p.iter().all(|&x| x >= 0.0));
        prop_assert_eq!(convolve(&q, 100, &p0), (start, p));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 6, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn protocol_is_seed_deterministic(seed in any::<u64>(), pulse in 1e-4..1e-2f64) {
        let params = ProtocolParams {
            n_atoms: 12,
            rabi: 40e6,
            omega: 2.0 * PI * 400e12,
            power: 10e-6,
            attenuation: 5.1e-5,
            distance: 5e5,
            pulse,
            shot_noise: true,
        };
        let a = protocol_simulate(&params, 40_000, seed).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| protocol_simulate(&params, 40_000, seed).unwrap());
        prop_assert_eq!(a, b);
    }
}

#[test]
fn negative_redistribution_is_reported() {
    let q = Quasiprobabilities { mode: 0, t: 0.0, first: -1, q: vec![-0.1, 1.2, -0.1] };
    assert!(redistribute(&q, 0, &[1.0]).is_err());
    let (start, p) = convolve(&q, 0, &[1.0]);
    assert_eq!(start, -1);
    assert_eq!(p, vec![-0.1, 1.2, -0.1]);
}
