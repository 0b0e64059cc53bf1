//! Amplitude equations of motion and their time propagation.
//!
//! The Hamiltonian is real in the basis of [`crate::statespace`], so the
//! generator is `-i H` with `H` real symmetric. `H` is diagonal in detunings
//! (measured from the band edge) plus three kinds of hops:
//!
//! * atom <-> defect: `g_d sqrt(n_d + 1)` when a defect photon is created,
//! * atom <-> reservoir mode `j`: `g_j sqrt(n_j + 1)`,
//!
//! and the eliminated far part of the continuum lowers every excited-atom
//! state by the vacuum shift `S`.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dos::DiscretizedReservoir;
use crate::error::{Error, Result};
use crate::observables::ObservableRecord;
use crate::statespace::{build_basis, pair_count, Atom, ExcitationBasis, Layout, StateVector};

/// Relative norm drift tolerated over a whole run.
pub const NORM_TOLERANCE: f64 = 1e-8;
/// Largest accepted `dt * max_frequency`.
pub const MAX_PHASE_PER_STEP: f64 = 0.1;
pub const DEFAULT_DT: f64 = 5e-4;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Atomic detuning from the band edge, `w_o - w_e`.
    pub delta_o: f64,
    /// Defect-mode detuning from the band edge, `w_d - w_e`. Negative inside the gap.
    pub delta_d: f64,
    pub g_d: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropagationConfig {
    pub t_max: f64,
    pub dt: f64,
    pub sample_stride: usize,
    pub store_full_state: bool,
}

impl Default for PropagationConfig {
    fn default() -> Self {
        Self {
            t_max: 10.0,
            dt: DEFAULT_DT,
            sample_stride: 1,
            store_full_state: false,
        }
    }
}

impl PropagationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::Config(format!("dt = {} must be positive", self.dt)));
        }
        if !(self.t_max >= 0.0) || !self.t_max.is_finite() {
            return Err(Error::Config(format!("t_max = {} must be non-negative", self.t_max)));
        }
        if self.sample_stride == 0 {
            return Err(Error::Config("sample stride must be at least 1".into()));
        }
        Ok(())
    }

    /// Number of steps and the step actually taken (`t_max / n_steps <= dt`).
    pub fn steps(&self) -> (usize, f64) {
        if self.t_max == 0.0 {
            return (0, self.dt);
        }
        let n = (self.t_max / self.dt - 1e-9).ceil().max(1.0) as usize;
        (n, self.t_max / n as f64)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub observables: Vec<ObservableRecord>,
    pub final_state: StateVector,
    pub states: Option<Vec<StateVector>>,
}

/// Right-hand side `d psi / dt = G psi` of a linear, norm-preserving system.
pub trait Generator {
    fn dim(&self) -> usize;

    /// Largest frequency the propagator has to resolve.
    fn max_frequency(&self) -> f64;

    /// Writes `G psi` into `out`.
    fn derivative(&self, psi: &[Complex64], out: &mut [Complex64]);
}

/// Amplitude equations for one excitation sector, assembled once and applied
/// in a single pass over the blocks.
#[derive(Clone, Debug)]
pub struct AmplitudeEquations {
    layout: Layout,
    n_modes: usize,
    diagonal: Vec<f64>,
    couplings: Vec<f64>,
    /// atom + (p-1) defect photons <-> p defect photons
    g_defect_vacuum: f64,
    /// atom + (p-2) defect photons + 1_j <-> (p-1) defect photons + 1_j
    g_defect_single: f64,
    max_frequency: f64,
}

impl AmplitudeEquations {
    pub fn new(params: &SystemParams, res: &DiscretizedReservoir, basis: &ExcitationBasis) -> Result<Self> {
        if basis.n_modes != res.n_modes {
            return Err(Error::Shape {
                expected: res.n_modes,
                got: basis.n_modes,
            });
        }
        let detunings = res.detunings();
        let shift = res.vacuum_shift;
        let diagonal: Vec<f64> = basis
            .states
            .iter()
            .map(|s| {
                let atom = match s.atom {
                    Atom::Excited => params.delta_o - shift,
                    Atom::Ground => 0.0,
                };
                let reservoir: f64 = s
                    .reservoir_occupation
                    .iter()
                    .map(|(&j, &n)| n as f64 * detunings[j - 1])
                    .sum();
                atom + s.defect_occupation as f64 * params.delta_d + reservoir
            })
            .collect();

        let p = basis.p as f64;
        let mut max_frequency = (params.delta_o.abs() + shift)
            .max((2.0 * params.delta_d).abs())
            .max(diagonal.iter().fold(0.0, |m, d| m.max(d.abs())));
        let width = res.omega_u - res.omega_e;
        if width.is_finite() {
            max_frequency = max_frequency.max(2.0 * width);
        }

        Ok(Self {
            layout: basis.layout,
            n_modes: basis.n_modes,
            diagonal,
            couplings: res.couplings.clone(),
            g_defect_vacuum: params.g_d * p.sqrt(),
            g_defect_single: params.g_d * (p - 1.0).max(0.0).sqrt(),
            max_frequency,
        })
    }

    /// `H psi`, without the factor `-i`.
    pub fn apply_hamiltonian(&self, psi: &[Complex64], out: &mut [Complex64]) {
        let l = &self.layout;
        let g = &self.couplings;
        for ((o, a), d) in out.iter_mut().zip(psi).zip(&self.diagonal) {
            *o = a * *d;
        }
        if let (Some(a0), Some(b0)) = (l.excited_vacuum, l.defect_full) {
            out[a0] += psi[b0] * self.g_defect_vacuum;
            out[b0] += psi[a0] * self.g_defect_vacuum;
        }
        if let (Some(a0), Some(bs)) = (l.excited_vacuum, l.ground_single) {
            let amp = psi[a0];
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..self.n_modes {
                acc += psi[bs + j] * g[j];
                out[bs + j] += amp * g[j];
            }
            out[a0] += acc;
        }
        if let (Some(bs), Some(es)) = (l.ground_single, l.excited_single) {
            for j in 0..self.n_modes {
                out[bs + j] += psi[es + j] * self.g_defect_single;
                out[es + j] += psi[bs + j] * self.g_defect_single;
            }
        }
        if let (Some(es), Some(pairs)) = (l.excited_single, l.ground_pair) {
            let n = self.n_modes;
            let excited = &psi[es..es + n];
            let mut idx = pairs;
            for j in 0..n {
                // diagonal pair b_jj carries the bosonic sqrt(2)
                let c = SQRT_2 * g[j];
                out[idx] += excited[j] * c;
                let mut acc = psi[idx] * c;
                idx += 1;
                let (gj, aj) = (g[j], excited[j]);
                for k in j + 1..n {
                    let b = psi[idx];
                    acc += b * g[k];
                    out[es + k] += b * gj;
                    out[idx] += aj * g[k] + excited[k] * gj;
                    idx += 1;
                }
                out[es + j] += acc;
            }
            debug_assert_eq!(idx, pairs + pair_count(n));
        }
    }
}

impl Generator for AmplitudeEquations {
    fn dim(&self) -> usize {
        self.layout.size
    }

    fn max_frequency(&self) -> f64 {
        self.max_frequency
    }

    fn derivative(&self, psi: &[Complex64], out: &mut [Complex64]) {
        self.apply_hamiltonian(psi, out);
        for o in out.iter_mut() {
            // -i (re + i im) = im - i re
            *o = Complex64::new(o.im, -o.re);
        }
    }
}

fn check_len(expected: usize, psi: &StateVector) -> Result<()> {
    if psi.len() != expected {
        return Err(Error::Shape {
            expected,
            got: psi.len(),
        });
    }
    Ok(())
}

fn rhs_for(p: usize, params: &SystemParams, res: &DiscretizedReservoir, psi: &StateVector) -> Result<StateVector> {
    let without = build_basis(p, res.n_modes, false).ok();
    let with = build_basis(p, res.n_modes, true)?;
    let basis = match without {
        Some(b) if b.len() == psi.len() => b,
        _ => with,
    };
    check_len(basis.len(), psi)?;
    let eqs = AmplitudeEquations::new(params, res, &basis)?;
    let mut out = StateVector::zeros(psi.len());
    eqs.derivative(&psi.amplitudes, &mut out.amplitudes);
    Ok(out)
}

/// Time derivative in the one-excitation sector. A state of length `N + 1`
/// is `(a0, b_1..b_N)`; length `N + 2` adds the defect amplitude after `a0`.
pub fn rhs_one_excitation(params: &SystemParams, res: &DiscretizedReservoir, psi: &StateVector) -> Result<StateVector> {
    rhs_for(1, params, res, psi)
}

/// Time derivative in the two-excitation sector, with or without the defect
/// mode depending on the length of `psi`.
pub fn rhs_two_excitation(params: &SystemParams, res: &DiscretizedReservoir, psi: &StateVector) -> Result<StateVector> {
    rhs_for(2, params, res, psi)
}

/// Fixed-step classical Runge-Kutta propagation. `observe` is evaluated at
/// `t = 0`, every `sample_stride` steps and at `t_max`.
pub fn propagate<G, F>(gen: &G, psi0: StateVector, cfg: &PropagationConfig, mut observe: F) -> Result<Trajectory>
where
    G: Generator + ?Sized,
    F: FnMut(&StateVector) -> ObservableRecord,
{
    cfg.validate()?;
    check_len(gen.dim(), &psi0)?;
    let (n_steps, h) = cfg.steps();
    let max_frequency = gen.max_frequency();
    if h * max_frequency > MAX_PHASE_PER_STEP {
        return Err(Error::StepTooLarge {
            dt: h,
            max_frequency,
            product: h * max_frequency,
        });
    }

    let norm0 = psi0.norm_sq();
    if !norm0.is_finite() {
        return Err(Error::NonFinite(0.0));
    }
    if norm0 == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let dim = psi0.len();
    let mut psi = psi0;
    let mut times = Vec::new();
    let mut observables = Vec::new();
    let mut states = cfg.store_full_state.then(Vec::new);

    let mut record = |step: usize, psi: &StateVector| -> Result<()> {
        let t = step as f64 * h;
        let norm = psi.norm_sq();
        if !norm.is_finite() {
            return Err(Error::NonFinite(t));
        }
        let drift = (norm / norm0 - 1.0).abs();
        if drift > NORM_TOLERANCE {
            return Err(Error::NormDrift { time: t, drift });
        }
        times.push(t);
        observables.push(observe(psi));
        if let Some(s) = states.as_mut() {
            s.push(psi.clone());
        }
        Ok(())
    };
    record(0, &psi)?;

    let zero = Complex64::new(0.0, 0.0);
    let mut k = vec![zero; dim];
    let mut acc = vec![zero; dim];
    let mut stage = vec![zero; dim];
    for step in 1..=n_steps {
        let y = &mut psi.amplitudes;
        gen.derivative(y, &mut k);
        for i in 0..dim {
            acc[i] = k[i];
            stage[i] = y[i] + k[i] * (0.5 * h);
        }
        gen.derivative(&stage, &mut k);
        for i in 0..dim {
            acc[i] += k[i] * 2.0;
            stage[i] = y[i] + k[i] * (0.5 * h);
        }
        gen.derivative(&stage, &mut k);
        for i in 0..dim {
            acc[i] += k[i] * 2.0;
            stage[i] = y[i] + k[i] * h;
        }
        gen.derivative(&stage, &mut k);
        for i in 0..dim {
            y[i] += (acc[i] + k[i]) * (h / 6.0);
        }
        if step % cfg.sample_stride == 0 || step == n_steps {
            record(step, &psi)?;
        }
    }

    Ok(Trajectory {
        times,
        observables,
        final_state: psi,
        states,
    })
}
