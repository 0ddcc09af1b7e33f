use rayon::prelude::*;

use crate::error::{PrftError, Result};
use crate::linalg::CMat;
use crate::semiclassical::integrator::{propagate, IntegratorSpec};
use crate::system::{CountingGrid, DrivenSystem};

/// Counting-field offsets relative to the photonic phase of the counted mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChiSampling {
    /// The full circle, `chi_j = 2 pi j / n`.
    Grid(CountingGrid),
    /// `chi_j = j h` for `j = -half_width ..= half_width`, for finite differences at 0.
    Stencil { h: f64, half_width: usize },
}

impl ChiSampling {
    pub fn len(&self) -> usize {
        match *self {
            ChiSampling::Grid(g) => g.len(),
            ChiSampling::Stencil { half_width, .. } => 2 * half_width + 1,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn offsets(&self) -> Vec<f64> {
        match *self {
            ChiSampling::Grid(g) => g.points(),
            ChiSampling::Stencil { h, half_width } => {
                let w = half_width as i64;
                (-w..=w).map(|j| j as f64 * h).collect()
            }
        }
    }

    /// Index of the point `chi = 0`.
    pub fn center(&self) -> usize {
        match *self {
            ChiSampling::Grid(_) => 0,
            ChiSampling::Stencil { half_width, .. } => half_width,
        }
    }

    /// Index of `-chi_j`.
    pub fn mirror(&self, j: usize) -> usize {
        match *self {
            ChiSampling::Grid(g) => g.mirror(j),
            ChiSampling::Stencil { half_width, .. } => 2 * half_width - j,
        }
    }

    /// Index of the point `j` steps away from 0, for either sampling.
    pub fn index(&self, j: i64) -> Option<usize> {
        match *self {
            ChiSampling::Grid(g) => Some(j.rem_euclid(g.len() as i64) as usize),
            ChiSampling::Stencil { half_width, .. } => {
                let w = half_width as i64;
                (j.abs() <= w).then(|| (j + w) as usize)
            }
        }
    }

    pub fn step(&self) -> f64 {
        match *self {
            ChiSampling::Grid(g) => g.spacing(),
            ChiSampling::Stencil { h, .. } => h,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let ChiSampling::Stencil { h, half_width } = *self {
            if !(h > 0.0) || half_width == 0 {
                return Err(PrftError::InvalidInput("stencil needs h > 0 and half_width > 0".into()));
            }
        }
        Ok(())
    }
}

/// `U_{phi + chi_j e_k}(t)` for every sampled `chi_j` and requested time.
#[derive(Debug, Clone)]
pub struct GeneralizedPropagatorSet {
    pub mode: usize,
    pub base_phases: Vec<f64>,
    pub sampling: ChiSampling,
    pub times: Vec<f64>,
    props: Vec<Vec<CMat>>,
}

impl GeneralizedPropagatorSet {
    /// Builds a set from a closure `f(phases, t)`, e.g. from a closed form.
    pub fn from_fn<F>(mode: usize, base_phases: &[f64], sampling: ChiSampling, times: &[f64], f: F) -> Self
    where
        F: Fn(&[f64], f64) -> CMat + Sync,
    {
        let offsets = sampling.offsets();
        let props = times
            .iter()
            .map(|&t| {
                offsets
                    .par_iter()
                    .map(|&chi| {
                        let mut p = base_phases.to_vec();
                        p[mode] += chi;
                        f(&p, t)
                    })
                    .collect()
            })
            .collect();
        GeneralizedPropagatorSet { mode, base_phases: base_phases.to_vec(), sampling, times: times.to_vec(), props }
    }

    pub fn get(&self, time_index: usize, j: usize) -> &CMat {
        &self.props[time_index][j]
    }

    /// `U_phi(t)`.
    pub fn base(&self, time_index: usize) -> &CMat {
        &self.props[time_index][self.sampling.center()]
    }

    pub fn at_time(&self, time_index: usize) -> &[CMat] {
        &self.props[time_index]
    }

    pub fn dim(&self) -> usize {
        self.props.first().and_then(|v| v.first()).map_or(0, |u| u.nrows())
    }

    pub fn base_phase(&self) -> f64 {
        self.base_phases[self.mode]
    }
}

pub fn propagate_generalized(
    sys: &DrivenSystem,
    mode: usize,
    sampling: ChiSampling,
    times: &[f64],
    spec: &IntegratorSpec,
) -> Result<GeneralizedPropagatorSet> {
    sampling.validate()?;
    if mode >= sys.n_modes() {
        return Err(PrftError::InvalidInput(format!("counted mode {mode} out of range")));
    }
    let offsets = sampling.offsets();
    let per_offset: Vec<Vec<CMat>> = offsets
        .par_iter()
        .map(|&chi| propagate(sys, &sys.shifted_phases(mode, chi), times, spec))
        .collect::<Result<_>>()?;
    let props = (0..times.len())
        .map(|ti| per_offset.iter().map(|v| v[ti].clone()).collect())
        .collect();
    Ok(GeneralizedPropagatorSet { mode, base_phases: sys.phases(), sampling, times: times.to_vec(), props })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;
    use crate::semiclassical::jc;

    #[test]
    fn closed_form_set_matches_integration() {
        let (hz, w, g) = (1.0, 1.0, [0.2, 0.2]);
        let sys = DrivenSystem::two_mode_jc(hz, w, g, [0.0, 1.0]).unwrap();
        let sampling = ChiSampling::Grid(CountingGrid::new(16).unwrap());
        let times = [0.0, 2.5, 30.0];
        let num = propagate_generalized(&sys, 0, sampling, &times, &IntegratorSpec::default()).unwrap();
        let ana = GeneralizedPropagatorSet::from_fn(0, &sys.phases(), sampling, &times, |p, t| {
            jc::to_lab_frame(&jc::two_mode_jc_propagator(hz, w, g, [p[0], p[1]], t), w, t)
        });
        for ti in 0..times.len() {
            for j in 0..16 {
                assert!(linalg::max_abs(&(num.get(ti, j) - ana.get(ti, j))) < 1e-9);
            }
        }
    }

    #[test]
    fn sampling_indices() {
        let s = ChiSampling::Stencil { h: 0.1, half_width: 3 };
        assert_eq!(s.len(), 7);
        assert_eq!(s.center(), 3);
        assert_eq!(s.mirror(1), 5);
        assert_eq!(s.index(-3), Some(0));
        assert_eq!(s.index(4), None);
        let g = ChiSampling::Grid(CountingGrid::new(8).unwrap());
        assert_eq!(g.mirror(0), 0);
        assert_eq!(g.mirror(3), 5);
        assert_eq!(g.index(-1), Some(7));
    }
}
