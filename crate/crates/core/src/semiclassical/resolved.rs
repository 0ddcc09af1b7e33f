use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

use crate::error::{PrftError, Result};
use crate::linalg::{CMat, CVec};
use crate::semiclassical::propagators::{ChiSampling, GeneralizedPropagatorSet};

/// Fourier components of `U_{phi + chi}` in `chi`: `U_{phi+chi} = sum_m V^(m) e^{i m chi}`.
/// `V^(m)` moves the counted mode by `+m` photons.
#[derive(Debug, Clone)]
pub struct PhotonResolved {
    pub base_phase: f64,
    n: usize,
    /// index `m + n/2`
    ops: Vec<CMat>,
}

impl PhotonResolved {
    pub fn grid_len(&self) -> usize {
        self.n
    }

    /// Transfers `m` with `|m| < n/2`.
    pub fn transfers(&self) -> std::ops::RangeInclusive<i64> {
        let h = self.n as i64 / 2;
        (-h + 1)..=(h - 1)
    }

    /// `V^(m)`, relative to the base phase.
    pub fn relative(&self, m: i64) -> Result<&CMat> {
        let h = self.n as i64 / 2;
        if m.abs() >= h {
            return Err(PrftError::Aliasing(format!("transfer {m} needs a counting grid larger than {}", self.n)));
        }
        Ok(&self.ops[(m + h) as usize])
    }

    /// `U^(m) = V^(m) e^{-i m phi}`, referenced to photonic phase zero.
    pub fn absolute(&self, m: i64) -> Result<CMat> {
        Ok(self.relative(m)? * C64::from_polar(1.0, -(m as f64) * self.base_phase))
    }

    /// `max |sum_m V^(m)dag V^(m) - 1|`, zero for unitary propagators.
    pub fn parseval_defect(&self) -> f64 {
        let d = self.ops[0].nrows();
        let mut acc = -CMat::identity(d, d);
        for v in &self.ops {
            acc += v.adjoint() * v;
        }
        crate::linalg::max_abs(&acc)
    }

    /// Largest operator norm among the outermost eighth of resolvable transfers.
    pub fn tail_norm(&self) -> f64 {
        let h = self.n as i64 / 2;
        let edge = (h - h / 4).max(1);
        self.transfers()
            .filter(|m| m.abs() >= edge)
            .map(|m| self.ops[(m + h) as usize].norm())
            .fold(0.0, f64::max)
    }
}

pub fn photon_resolved_operators(set: &GeneralizedPropagatorSet, time_index: usize) -> Result<PhotonResolved> {
    let n = match set.sampling {
        ChiSampling::Grid(g) => g.len(),
        ChiSampling::Stencil { .. } => {
            return Err(PrftError::InvalidInput("photon-resolved operators need a full counting grid".into()))
        }
    };
    let us = set.at_time(time_index);
    let d = set.dim();
    let fft = FftPlanner::new().plan_fft_forward(n);
    let mut ops = vec![CMat::zeros(d, d); n];
    let mut buf = vec![C64::new(0.0, 0.0); n];
    let h = n / 2;
    for r in 0..d {
        for c in 0..d {
            for (j, u) in us.iter().enumerate() {
                buf[j] = u[(r, c)];
            }
            fft.process(&mut buf);
            for (k, &x) in buf.iter().enumerate() {
                // frequency k corresponds to m = k, or k - n above n/2
                let m = if k < h { k as i64 } else { k as i64 - n as i64 };
                ops[(m + h as i64) as usize][(r, c)] = x / n as f64;
            }
        }
    }
    Ok(PhotonResolved { base_phase: set.base_phase(), n, ops })
}

/// Photon-number distribution of the counted mode after the evolution, for a
/// product initial state `|matter> (x) sum_n a_n |n>`.
/// `psi_n = sum_m U^(m) |matter> a_{n-m}`; returns `(first n, <P_n>)`.
pub fn fock_projector_expectation(
    res: &PhotonResolved,
    matter: &CVec,
    first_n: i64,
    amplitudes: &[C64],
) -> Result<(i64, Vec<f64>)> {
    let transfers: Vec<(i64, CVec)> = res
        .transfers()
        .map(|m| Ok((m, res.absolute(m)? * matter)))
        .filter(|r: &Result<(i64, CVec)>| r.as_ref().map_or(true, |(_, w)| w.norm() > 1e-15))
        .collect::<Result<_>>()?;
    let (m_lo, m_hi) = (
        transfers.first().map_or(0, |t| t.0),
        transfers.last().map_or(0, |t| t.0),
    );
    let n_lo = first_n + m_lo;
    let n_hi = first_n + amplitudes.len() as i64 - 1 + m_hi;
    let d = matter.len();
    let mut out = Vec::with_capacity((n_hi - n_lo + 1).max(0) as usize);
    for n in n_lo..=n_hi {
        let mut psi = CVec::zeros(d);
        for (m, w) in &transfers {
            let idx = n - m - first_n;
            if idx >= 0 && (idx as usize) < amplitudes.len() {
                psi.axpy(amplitudes[idx as usize], w, C64::new(1.0, 0.0));
            }
        }
        out.push(psi.norm_squared());
    }
    Ok((n_lo, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;
    use crate::semiclassical::jc;
    use crate::system::CountingGrid;

    #[test]
    fn single_mode_jc_has_three_components() {
        let (hz, w, g) = (1.0, 0.8, 0.25);
        let sampling = ChiSampling::Grid(CountingGrid::new(16).unwrap());
        let set = GeneralizedPropagatorSet::from_fn(0, &[0.3], sampling, &[2.0], |p, t| {
            jc::jc_propagator(hz, w, g, p[0], t)
        });
        let res = photon_resolved_operators(&set, 0).unwrap();
        for m in res.transfers() {
            let norm = res.relative(m).unwrap().norm();
            if m.abs() > 1 {
                assert!(norm < 1e-13, "m = {m}");
            }
        }
        // U^(+1) ~ sigma_-, U^(-1) ~ sigma_+
        let up = res.absolute(1).unwrap();
        assert!(up[(0, 1)].norm() < 1e-14 && up[(1, 0)].norm() > 0.1);
        let down = res.absolute(-1).unwrap();
        assert!(down[(1, 0)].norm() < 1e-14 && down[(0, 1)].norm() > 0.1);
        assert!(res.relative(8).is_err());
    }

    #[test]
    fn fourier_sum_reconstructs() {
        let sampling = ChiSampling::Grid(CountingGrid::new(32).unwrap());
        let set = GeneralizedPropagatorSet::from_fn(0, &[0.7, 0.0], sampling, &[5.0], |p, t| {
            jc::two_mode_jc_propagator(1.0, 1.0, [0.1, 0.1], [p[0], p[1]], t)
        });
        let res = photon_resolved_operators(&set, 0).unwrap();
        let chi = 0.37;
        let mut sum = CMat::zeros(2, 2);
        for m in res.transfers() {
            sum += res.absolute(m).unwrap() * C64::from_polar(1.0, m as f64 * (0.7 + chi));
        }
        let direct = jc::two_mode_jc_propagator(1.0, 1.0, [0.1, 0.1], [0.7 + chi, 0.0], 5.0);
        assert!(linalg::max_abs(&(sum - direct)) < 1e-12);
    }
}
