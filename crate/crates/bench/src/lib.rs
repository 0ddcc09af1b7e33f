//! Fixtures shared by the benchmarks.

use std::f64::consts::PI;

use prft::fock::{BlockState, TwoModeJcParams};
use prft::{CVec, Complex64, DrivenSystem, PhotonMode};

/// Two-mode Jaynes-Cummings drive with a quarter-period phase offset.
pub fn two_mode_system() -> DrivenSystem {
    DrivenSystem::two_mode_jc(1.0, 1.0, [0.2, 0.2], [0.0, PI / 2.0]).expect("valid parameters")
}

pub fn rabi_system() -> DrivenSystem {
    DrivenSystem::rabi(1.0, 10.0, 10.0, 0.0).expect("valid parameters")
}

pub fn spin_up() -> CVec {
    CVec::from_column_slice(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)])
}

/// Gaussian two-mode state with `nbar` photons and variance `variance` in each mode.
pub fn two_mode_state(nbar: f64, variance: f64) -> (TwoModeJcParams, BlockState) {
    let modes = [
        PhotonMode { mean: nbar, variance, phase: 0.0 },
        PhotonMode { mean: nbar, variance, phase: PI / 2.0 },
    ];
    let state = BlockState::gaussian(&spin_up(), modes, 60, 1.0).expect("window fits");
    (TwoModeJcParams::semiclassical(1.0, 1.0, [0.2, 0.2]), state)
}
