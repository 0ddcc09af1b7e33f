use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Bernoulli, Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::erf::erf;

use crate::applications::{loss_broadening, peak_separation, HBAR};
use crate::error::{PrftError, Result};

const CHUNK: u64 = 1 << 14;

/// SI parameters of one heralding round: both parties couple `n_atoms` to the shared
/// two-mode field for `pulse` seconds, then the mode-1 photon change is measured.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolParams {
    pub n_atoms: usize,
    pub rabi: f64,
    pub omega: f64,
    pub power: f64,
    /// attenuation per metre
    pub attenuation: f64,
    /// metres
    pub distance: f64,
    pub pulse: f64,
    /// include the coherent-state shot noise `sqrt(P t_p / (hbar w))` in the peak width
    pub shot_noise: bool,
}

impl ProtocolParams {
    /// Distance between the photon-number peaks of neighbouring branches.
    pub fn separation(&self) -> f64 {
        peak_separation(self.n_atoms, self.rabi, self.pulse)
    }

    /// Standard deviation of each peak.
    pub fn width(&self) -> f64 {
        let loss = loss_broadening(self.attenuation, self.distance, self.power, self.pulse, self.omega);
        let shot = if self.shot_noise { self.power * self.pulse / (HBAR * self.omega) } else { 0.0 };
        (loss * loss + shot).sqrt()
    }

    fn validate(&self) -> Result<()> {
        let vals = [self.rabi, self.omega, self.power, self.pulse];
        if self.n_atoms == 0 || vals.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(PrftError::InvalidInput("protocol parameters must be finite and non-negative".into()));
        }
        if !(self.attenuation >= 0.0) || !(self.distance >= 0.0) {
            return Err(PrftError::InvalidInput("attenuation and distance must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProtocolReport {
    pub trials: u64,
    pub success_rate: f64,
    /// probability that a heralded outcome came from a product branch
    pub misclassification: f64,
    pub fidelity_proxy: f64,
    pub separation: f64,
    pub width: f64,
}

fn phi(x: f64) -> f64 {
    0.5 * (1.0 + erf(x / std::f64::consts::SQRT_2))
}

/// Closed-form success and misclassification probabilities for Gaussian peaks at
/// `-s, 0, 0, +s` with acceptance window `+- s/2`.
pub fn protocol_analytic(params: &ProtocolParams) -> (f64, f64) {
    let s = params.separation();
    let w = params.width();
    if s == 0.0 {
        return (0.0, 0.5);
    }
    if w == 0.0 {
        return (0.5, 0.0);
    }
    let a = s / (2.0 * w);
    let centre = 2.0 * phi(a) - 1.0;
    let side = phi(3.0 * a) - phi(a);
    let success = 0.5 * centre + 0.5 * side;
    (success, 0.5 * side / success)
}

/// Monte Carlo over the four equally likely branches. Each chunk of trials draws from
/// its own ChaCha stream, so results do not depend on the thread count.
pub fn protocol_simulate(params: &ProtocolParams, trials: u64, seed: u64) -> Result<ProtocolReport> {
    params.validate()?;
    if trials == 0 {
        return Err(PrftError::InvalidInput("at least one trial is required".into()));
    }
    let s = params.separation();
    let w = params.width();
    let chunks = trials.div_ceil(CHUNK);
    let coin = Bernoulli::new(0.5).expect("valid probability");
    let (heralded, wrong, product): (u64, u64, u64) = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let n = CHUNK.min(trials - c * CHUNK);
            let (mut h, mut x, mut p) = (0, 0, 0);
            for _ in 0..n {
                let alice = coin.sample(&mut rng);
                let bob = coin.sample(&mut rng);
                let noise: f64 = StandardNormal.sample(&mut rng);
                let shift = match (alice, bob) {
                    (true, true) => s,
                    (false, false) => -s,
                    _ => 0.0,
                };
                let same = alice == bob;
                p += same as u64;
                if (shift + w * noise).abs() < s / 2.0 {
                    h += 1;
                    x += same as u64;
                }
            }
            (h, x, p)
        })
        .reduce(|| (0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    let success_rate = heralded as f64 / trials as f64;
    let misclassification = if heralded > 0 {
        wrong as f64 / heralded as f64
    } else {
        // nothing heralded: the branches are indistinguishable
        product as f64 / trials as f64
    };
    Ok(ProtocolReport {
        trials,
        success_rate,
        misclassification,
        fidelity_proxy: 1.0 - misclassification,
        separation: s,
        width: w,
    })
}
