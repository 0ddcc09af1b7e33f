//! Chebyshev expansion of `exp(-i H dt)` for real symmetric tridiagonal `H`.

use num_complex::Complex64 as C64;

/// Tridiagonal chain: `off[i]` couples sites `i` and `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl Chain {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Gershgorin bounds of the spectrum.
    pub fn bounds(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.off[i - 1].abs();
            }
            if i + 1 < n {
                r += self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// `y = (H - c) / r x`
    #[inline]
    fn apply_scaled(&self, x: &[C64], y: &mut [C64], c: f64, inv_r: f64) {
        let n = self.len();
        for i in 0..n {
            let mut acc = x[i] * (self.diag[i] - c);
            if i > 0 {
                acc += x[i - 1] * self.off[i - 1];
            }
            if i + 1 < n {
                acc += x[i + 1] * self.off[i];
            }
            y[i] = acc * inv_r;
        }
    }
}

/// Bessel functions `J_0(x) .. J_kmax(x)` by Miller's backward recurrence.
pub fn bessel_j(x: f64, kmax: usize) -> Vec<f64> {
    let mut out = vec![0.0; kmax + 1];
    if x.abs() < 1e-14 {
        out[0] = 1.0;
        if kmax >= 1 {
            out[1] = x / 2.0;
        }
        return out;
    }
    let start = (kmax.max(x.abs().ceil() as usize) + 40 + (x.abs().sqrt() * 6.0) as usize) | 1;
    let mut f_next = 0.0;
    let mut f = 1e-30;
    let mut norm = 0.0;
    let mut vals = vec![0.0; start + 1];
    vals[start] = f;
    for k in (1..=start).rev() {
        let f_prev = 2.0 * k as f64 / x * f - f_next;
        f_next = f;
        f = f_prev;
        vals[k - 1] = f;
        if f.abs() > 1e250 {
            for v in vals[k - 1..].iter_mut() {
                *v *= 1e-250;
            }
            f *= 1e-250;
            f_next *= 1e-250;
        }
    }
    for (k, &v) in vals.iter().enumerate() {
        if k == 0 {
            norm += v;
        } else if k % 2 == 0 {
            norm += 2.0 * v;
        }
    }
    for k in 0..=kmax {
        out[k] = vals[k] / norm;
    }
    out
}

/// Precomputed expansion coefficients for one chain and one step size.
#[derive(Debug, Clone)]
pub struct ChebyshevStep {
    center: f64,
    inv_radius: f64,
    phase: C64,
    coeffs: Vec<C64>,
}

/// Largest `radius * dt` per step.
pub const MAX_STEP_ARGUMENT: f64 = 20.0;

impl ChebyshevStep {
    pub fn new(chain: &Chain, dt: f64) -> Self {
        let (lo, hi) = chain.bounds();
        let center = 0.5 * (lo + hi);
        let radius = (0.5 * (hi - lo)).max(1e-12);
        let x = radius * dt;
        let kmax = (1.3 * x + 40.0).ceil() as usize;
        let j = bessel_j(x, kmax);
        let mut coeffs = Vec::with_capacity(kmax + 1);
        let mut mi = C64::new(1.0, 0.0);
        for (k, &jk) in j.iter().enumerate() {
            let w = if k == 0 { 1.0 } else { 2.0 };
            coeffs.push(mi * (w * jk));
            mi *= C64::new(0.0, -1.0);
            if k as f64 > x && jk.abs() < 1e-18 {
                break;
            }
        }
        ChebyshevStep { center, inv_radius: 1.0 / radius, phase: C64::from_polar(1.0, -center * dt), coeffs }
    }

    /// Suggested step so that `radius * dt <= MAX_STEP_ARGUMENT`.
    pub fn max_dt(chain: &Chain) -> f64 {
        let (lo, hi) = chain.bounds();
        MAX_STEP_ARGUMENT / (0.5 * (hi - lo)).max(1e-12)
    }

    pub fn apply(&self, chain: &Chain, psi: &mut [C64], scratch: &mut [Vec<C64>; 3]) {
        let n = chain.len();
        let [v0, v1, v2] = scratch;
        v0.clear();
        v0.extend_from_slice(psi);
        v1.resize(n, C64::new(0.0, 0.0));
        v2.resize(n, C64::new(0.0, 0.0));
        let mut acc: Vec<C64> = v0.iter().map(|&z| z * self.coeffs[0]).collect();
        if self.coeffs.len() > 1 {
            chain.apply_scaled(v0, v1, self.center, self.inv_radius);
            for (a, &z) in acc.iter_mut().zip(v1.iter()) {
                *a += z * self.coeffs[1];
            }
        }
        for &ck in &self.coeffs[2.min(self.coeffs.len())..] {
            chain.apply_scaled(v1, v2, self.center, self.inv_radius);
            for i in 0..n {
                v2[i] = 2.0 * v2[i] - v0[i];
                acc[i] += v2[i] * ck;
            }
            std::mem::swap(v0, v1);
            std::mem::swap(v1, v2);
        }
        for (p, a) in psi.iter_mut().zip(acc) {
            *p = a * self.phase;
        }
    }
}

/// Evolves `psi` by `dt` under `chain`, splitting into steps no longer than the bound.
pub fn evolve(chain: &Chain, psi: &mut [C64], dt: f64) {
    if dt <= 0.0 {
        return;
    }
    let n = (dt / ChebyshevStep::max_dt(chain)).ceil().max(1.0) as usize;
    let step = ChebyshevStep::new(chain, dt / n as f64);
    let mut scratch = [Vec::new(), Vec::new(), Vec::new()];
    for _ in 0..n {
        step.apply(chain, psi, &mut scratch);
    }
}
