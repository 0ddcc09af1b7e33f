use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

use crate::counting::mgf::GeneratingFunctionSamples;
use crate::error::{PrftError, Result};
use crate::semiclassical::ChiSampling;

pub const NORMALISATION_TOL: f64 = 1e-8;
pub const NEGATIVITY_TOL: f64 = 1e-8;

/// `q_dn`, the inverse Fourier transform of `M(chi)` over the counting circle.
#[derive(Debug, Clone)]
pub struct Quasiprobabilities {
    pub mode: usize,
    pub t: f64,
    /// photon change of `q[0]`
    pub first: i64,
    pub q: Vec<f64>,
}

impl Quasiprobabilities {
    pub fn transfers(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.q.iter().enumerate().map(move |(i, &x)| (self.first + i as i64, x))
    }

    pub fn get(&self, dn: i64) -> f64 {
        let i = dn - self.first;
        if i < 0 || i as usize >= self.q.len() { 0.0 } else { self.q[i as usize] }
    }

    pub fn min(&self) -> f64 {
        self.q.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn total(&self) -> f64 {
        self.q.iter().sum()
    }
}

pub(crate) fn complex_quasiprobabilities(samples: &GeneratingFunctionSamples) -> Result<(i64, Vec<C64>)> {
    let n = match samples.sampling {
        ChiSampling::Grid(g) => g.len(),
        ChiSampling::Stencil { .. } => {
            return Err(PrftError::InvalidInput("quasiprobabilities need a full counting grid".into()))
        }
    };
    let mut buf = samples.values.clone();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    // q_m = (1/n) sum_j M_j e^{-i m chi_j}, reordered to m = -n/2 .. n/2 - 1
    let h = n / 2;
    let q: Vec<C64> = (0..n).map(|i| buf[(i + h) % n] / n as f64).collect();
    let tail: f64 = q
        .iter()
        .enumerate()
        .filter(|(i, _)| (*i as i64 - h as i64).unsigned_abs() as usize >= h - h / 4)
        .map(|(_, z)| z.norm())
        .sum();
    if tail > 1e-8 {
        return Err(PrftError::Aliasing(format!(
            "quasiprobability weight {tail:e} near the edge of a {n}-point grid; increase the grid size"
        )));
    }
    Ok((-(h as i64), q))
}

pub fn quasiprobabilities(samples: &GeneratingFunctionSamples) -> Result<Quasiprobabilities> {
    let (first, q) = complex_quasiprobabilities(samples)?;
    let imag = q.iter().fold(0.0f64, |a, z| a.max(z.im.abs()));
    if imag > NORMALISATION_TOL {
        return Err(PrftError::Invariant(format!("quasiprobabilities have imaginary part {imag:e}")));
    }
    let q: Vec<f64> = q.into_iter().map(|z| z.re).collect();
    let total: f64 = q.iter().sum();
    if (total - 1.0).abs() > NORMALISATION_TOL {
        return Err(PrftError::Invariant(format!("quasiprobabilities sum to {total}")));
    }
    Ok(Quasiprobabilities { mode: samples.mode, t: samples.t, first, q })
}

/// `p_n(t) = sum_m q_{n-m} p_m(t0)` without any positivity check; returns `(first n, p)`.
/// Narrow initial distributions can leave small negative tails.
pub fn convolve(q: &Quasiprobabilities, first_n: i64, p0: &[f64]) -> (i64, Vec<f64>) {
    let len = p0.len() + q.q.len() - 1;
    let mut p = vec![0.0; len];
    for (i, &pm) in p0.iter().enumerate() {
        if pm == 0.0 {
            continue;
        }
        for (k, &qk) in q.q.iter().enumerate() {
            p[i + k] += qk * pm;
        }
    }
    (first_n + q.first, p)
}

/// As [`convolve`], failing if any probability is below `-NEGATIVITY_TOL`.
pub fn redistribute(q: &Quasiprobabilities, first_n: i64, p0: &[f64]) -> Result<(i64, Vec<f64>)> {
    let (start, p) = convolve(q, first_n, p0);
    if let Some((i, &v)) = p.iter().enumerate().find(|(_, &v)| v < -NEGATIVITY_TOL) {
        return Err(PrftError::Invariant(format!(
            "redistributed probability p_{} = {v:e} is negative; the initial distribution is too narrow for the quasiprobabilities",
            start + i as i64
        )));
    }
    Ok((start, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::CountingGrid;

    #[test]
    fn binomial_round_trip() {
        let grid = CountingGrid::new(32).unwrap();
        let p = 0.25;
        let values = grid.points().iter().map(|&x| (C64::new(1.0 - p, 0.0) + C64::from_polar(p, -x)).powi(3)).collect();
        let s = GeneratingFunctionSamples { sampling: ChiSampling::Grid(grid), mode: 0, t: 0.0, values };
        let q = quasiprobabilities(&s).unwrap();
        assert!((q.get(-3) - p.powi(3)).abs() < 1e-15);
        assert!((q.get(0) - (1.0 - p).powi(3)).abs() < 1e-15);
        assert!((q.total() - 1.0).abs() < 1e-14);
        let (start, out) = redistribute(&q, 10, &[0.5, 0.5]).unwrap();
        assert_eq!(start, 10 - 16);
        assert!((out.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn aliasing_detected() {
        let grid = CountingGrid::new(8).unwrap();
        let values = grid.points().iter().map(|&x| C64::from_polar(1.0, 3.0 * x)).collect();
        let s = GeneratingFunctionSamples { sampling: ChiSampling::Grid(grid), mode: 0, t: 0.0, values };
        assert!(matches!(quasiprobabilities(&s), Err(PrftError::Aliasing(_))));
    }
}
