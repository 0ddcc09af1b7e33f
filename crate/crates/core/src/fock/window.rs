use num_complex::Complex64 as C64;
use statrs::function::erf::erfc;

use crate::error::{PrftError, Result};
use crate::system::PhotonMode;

pub const MIN_WIDTH_SIGMAS: f64 = 8.0;
pub const CLIP_TOL: f64 = 1e-12;

/// Inclusive range of retained photon numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockWindow {
    pub lo: i64,
    pub hi: i64,
}

impl FockWindow {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo < 0 {
            return Err(PrftError::WindowTooSmall(format!("lower edge {lo} is negative")));
        }
        if hi < lo {
            return Err(PrftError::InvalidInput(format!("empty window [{lo}, {hi}]")));
        }
        Ok(FockWindow { lo, hi })
    }

    /// `mean +- width_sigmas * sigma`, at least eight standard deviations.
    pub fn gaussian(mode: &PhotonMode, width_sigmas: f64) -> Result<Self> {
        mode.validate()?;
        if width_sigmas < MIN_WIDTH_SIGMAS {
            return Err(PrftError::WindowTooSmall(format!(
                "window of {width_sigmas} sigma is below the minimum of {MIN_WIDTH_SIGMAS}"
            )));
        }
        let s = mode.sigma();
        let lo = (mode.mean - width_sigmas * s).floor() as i64;
        if lo < 0 {
            return Err(PrftError::WindowTooSmall(format!(
                "mean {} is within {width_sigmas} sigma of the vacuum",
                mode.mean
            )));
        }
        Self::new(lo, (mode.mean + width_sigmas * s).ceil() as i64)
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, n: i64) -> bool {
        n >= self.lo && n <= self.hi
    }

    pub fn padded(&self, below: i64, above: i64) -> Result<Self> {
        Self::new(self.lo - below, self.hi + above)
    }
}

/// Amplitudes `a_n ~ exp(-(n - mean)^2 / (4 sigma^2)) e^{-i phase n}` on the window, normalised.
pub fn gaussian_amplitudes(mode: &PhotonMode, window: FockWindow) -> Result<Vec<C64>> {
    mode.validate()?;
    let s = mode.sigma();
    let outside = 0.5 * erfc((mode.mean - window.lo as f64 + 0.5) / (s * 2f64.sqrt()))
        + 0.5 * erfc((window.hi as f64 + 0.5 - mode.mean) / (s * 2f64.sqrt()));
    if outside > CLIP_TOL {
        return Err(PrftError::WindowTooSmall(format!(
            "window [{}, {}] clips {outside:e} of the photon distribution",
            window.lo, window.hi
        )));
    }
    let mut a: Vec<C64> = (window.lo..=window.hi)
        .map(|n| {
            let x = n as f64 - mode.mean;
            C64::from_polar((-x * x / (4.0 * mode.variance)).exp(), -mode.phase * n as f64)
        })
        .collect();
    let norm = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    a.iter_mut().for_each(|z| *z /= norm);
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn amplitudes_normalised_with_phase() {
        let m = PhotonMode { mean: 200.0, variance: 50.0, phase: 0.3 };
        let w = FockWindow::gaussian(&m, 8.0).unwrap();
        let a = gaussian_amplitudes(&m, w).unwrap();
        assert!((a.iter().map(|z| z.norm_sqr()).sum::<f64>() - 1.0).abs() < 1e-14);
        let ratio = a[11] / a[10];
        assert!((ratio.arg() + 0.3).abs() < 1e-12);
    }

    #[test]
    fn narrow_window_rejected() {
        let m = PhotonMode { mean: 200.0, variance: 50.0, phase: 0.0 };
        assert!(FockWindow::gaussian(&m, 5.0).is_err());
        let w = FockWindow::new(190, 210).unwrap();
        assert!(matches!(gaussian_amplitudes(&m, w), Err(PrftError::WindowTooSmall(_))));
        let low = PhotonMode { mean: 20.0, variance: 20.0, phase: 0.0 };
        assert!(FockWindow::gaussian(&low, 8.0).is_err());
    }
}
