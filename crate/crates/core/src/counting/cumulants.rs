use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::counting::mgf::GeneratingFunctionSamples;
use crate::counting::quasi::complex_quasiprobabilities;
use crate::error::{PrftError, Result};
use crate::semiclassical::ChiSampling;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CumulantMethod {
    /// Central moments of the quasiprobabilities: exact derivatives of the band-limited
    /// interpolant of `M` on a full grid.
    #[default]
    Spectral,
    /// Nine-point central differences of the unwrapped `log M` at spacing `h` and `2h`,
    /// combined by one Richardson step.
    FiniteDifference,
}

/// `kappa_n = d^n log M / d(i chi)^n` at 0 for `n = 1..=max_order` (at most 4).
pub fn cumulants(samples: &GeneratingFunctionSamples, max_order: usize, method: CumulantMethod) -> Result<Vec<f64>> {
    Ok(complex_cumulants(samples, max_order, method)?.into_iter().map(|z| z.re).collect())
}

/// As [`cumulants`], keeping the imaginary parts, which vanish for unitary dynamics.
pub fn complex_cumulants(samples: &GeneratingFunctionSamples, max_order: usize, method: CumulantMethod) -> Result<Vec<C64>> {
    if !(1..=4).contains(&max_order) {
        return Err(PrftError::InvalidInput(format!("cumulant order {max_order} not in 1..=4")));
    }
    match method {
        CumulantMethod::Spectral => spectral(samples, max_order),
        CumulantMethod::FiniteDifference => finite_difference(samples, max_order),
    }
}

fn spectral(samples: &GeneratingFunctionSamples, max_order: usize) -> Result<Vec<C64>> {
    if !matches!(samples.sampling, ChiSampling::Grid(_)) {
        return Err(PrftError::InvalidInput("spectral cumulants need a full counting grid".into()));
    }
    let (first, q) = complex_quasiprobabilities(samples)?;
    let norm: C64 = q.iter().sum();
    let mean: C64 = q.iter().enumerate().map(|(i, &x)| x * (first + i as i64) as f64).sum::<C64>() / norm;
    let mut central = [C64::new(0.0, 0.0); 5];
    for (i, &x) in q.iter().enumerate() {
        let dn = C64::new((first + i as i64) as f64, 0.0) - mean;
        let mut p = C64::new(1.0, 0.0);
        for c in central.iter_mut().skip(1) {
            p *= dn;
            *c += x * p;
        }
    }
    for c in central.iter_mut() {
        *c /= norm;
    }
    let k = [mean, central[2], central[3], central[4] - 3.0 * central[2] * central[2]];
    Ok(k[..max_order].to_vec())
}

/// Raw moments `m_1..m_4` to cumulants.
pub fn moments_to_cumulants(m: &[f64]) -> Vec<f64> {
    let mut out = vec![m[0]];
    if m.len() > 1 {
        out.push(m[1] - m[0] * m[0]);
    }
    if m.len() > 2 {
        out.push(m[2] - 3.0 * m[1] * m[0] + 2.0 * m[0].powi(3));
    }
    if m.len() > 3 {
        out.push(m[3] - 4.0 * m[2] * m[0] - 3.0 * m[1] * m[1] + 12.0 * m[1] * m[0] * m[0] - 6.0 * m[0].powi(4));
    }
    out
}

/// Finite-difference weights (Fornberg) for derivatives `0..=max_deriv` at 0 on nodes `x`.
pub fn fornberg_weights(x: &[f64], max_deriv: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; n]; max_deriv + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = x[0];
    for i in 1..n {
        let mn = i.min(max_deriv);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i];
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

fn finite_difference(samples: &GeneratingFunctionSamples, max_order: usize) -> Result<Vec<C64>> {
    let s = samples.sampling;
    let h = s.step();
    let mut k = [C64::new(0.0, 0.0); 17];
    k[8] = samples.at_zero().ln();
    for dir in [1i64, -1] {
        let mut prev_arg = k[8].im;
        for j in 1..=8i64 {
            let m = samples.step(dir * j).ok_or_else(|| {
                PrftError::InvalidInput("finite-difference cumulants need 8 points on each side of 0".into())
            })?;
            if m.norm() < 1e-280 {
                return Err(PrftError::BranchCut(format!("M vanishes at chi = {}", dir as f64 * j as f64 * h)));
            }
            let mut da = m.arg() - prev_arg;
            da -= 2.0 * PI * (da / (2.0 * PI)).round();
            if da.abs() > PI / 2.0 {
                return Err(PrftError::BranchCut(format!(
                    "phase of M jumps by {da:.3} between neighbouring points near chi = {}; use a finer stencil",
                    dir as f64 * j as f64 * h
                )));
            }
            prev_arg += da;
            k[(8 + dir * j) as usize] = C64::new(m.norm().ln(), prev_arg);
        }
    }
    let nodes: Vec<f64> = (-4..=4).map(|j| j as f64).collect();
    let w = fornberg_weights(&nodes, 4);
    let mut out = Vec::with_capacity(max_order);
    let neg_i = C64::new(0.0, -1.0);
    for order in 1..=max_order {
        let fine: C64 = (0..9).map(|i| k[4 + i] * w[order][i]).sum::<C64>() / h.powi(order as i32);
        let coarse: C64 = (0..9).map(|i| k[2 * i] * w[order][i]).sum::<C64>() / (2.0 * h).powi(order as i32);
        let p = if order <= 2 { 8 } else { 6 };
        let f = 2f64.powi(p);
        let d = (f * fine - coarse) / (f - 1.0);
        out.push(neg_i.powi(order as i32) * d);
    }
    Ok(out)
}
