//! C ABI over the simulator.
//!
//! Results live behind opaque handles that the caller releases with the
//! matching `*_free` function. Every fallible call returns a [`PbgStatus`];
//! the message of the most recent failure on the calling thread is available
//! from [`pbg_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use pbgsim::cli::{build_reservoir, simulate_decay, simulate_oracle, simulate_two_photon, ExperimentKind, RunConfig, SeedOffset};
use pbgsim::dos::{DiscretizedReservoir, Scheme};
use pbgsim::observables::ObservableRecord;
use pbgsim::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PbgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Singularity = 3,
    Consistency = 4,
    StepTooLarge = 5,
    NormDrift = 6,
    NonFinite = 7,
    MemoryCap = 8,
    BufferTooSmall = 9,
    Unavailable = 10,
    Internal = 11,
}

impl From<&Error> for PbgStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Singularity(_) => PbgStatus::Singularity,
            Error::Consistency { .. } => PbgStatus::Consistency,
            Error::StepTooLarge { .. } => PbgStatus::StepTooLarge,
            Error::NormDrift { .. } => PbgStatus::NormDrift,
            Error::NonFinite(_) => PbgStatus::NonFinite,
            Error::MemoryCap { .. } => PbgStatus::MemoryCap,
            Error::Io(_) => PbgStatus::Internal,
            _ => PbgStatus::InvalidArgument,
        }
    }
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PbgScheme {
    Midpoint = 0,
    FirstOrder = 1,
}

/// Selects one column of a trajectory.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PbgObservable {
    PExcited = 0,
    NDefect = 1,
    PResZero = 2,
    PResOne = 3,
    PResTwo = 4,
    NTotal = 5,
    NormSq = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PbgExperiment {
    Decay = 0,
    TwoPhoton = 1,
    Oracle = 2,
}

/// Run parameters. Fill with [`pbg_params_default`] and adjust.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PbgParams {
    pub n_modes: usize,
    pub omega_u: f64,
    /// First mode above the band edge; zero or negative picks the cell-centred value.
    pub delta_seed: f64,
    pub scheme: PbgScheme,
    pub delta_o: f64,
    pub delta_d: f64,
    pub g_d: f64,
    pub coupling_c: f64,
    pub t_max: f64,
    pub dt: f64,
    pub sample_stride: usize,
    pub include_shift: bool,
}

impl PbgParams {
    fn from_config(cfg: &RunConfig) -> Self {
        Self {
            n_modes: cfg.n_modes,
            omega_u: cfg.omega_u,
            delta_seed: cfg.delta_seed.0.unwrap_or(0.0),
            scheme: match cfg.scheme {
                Scheme::Midpoint => PbgScheme::Midpoint,
                Scheme::FirstOrder => PbgScheme::FirstOrder,
            },
            delta_o: cfg.delta_o,
            delta_d: cfg.delta_d,
            g_d: cfg.g_d,
            coupling_c: cfg.coupling_c,
            t_max: cfg.t_max,
            dt: cfg.dt,
            sample_stride: cfg.sample_stride,
            include_shift: cfg.include_shift,
        }
    }

    fn to_config(self, kind: ExperimentKind) -> RunConfig {
        let mut cfg = RunConfig::defaults(kind);
        cfg.n_modes = self.n_modes;
        cfg.omega_u = self.omega_u;
        cfg.delta_seed = SeedOffset((self.delta_seed > 0.0).then_some(self.delta_seed));
        cfg.scheme = match self.scheme {
            PbgScheme::Midpoint => Scheme::Midpoint,
            PbgScheme::FirstOrder => Scheme::FirstOrder,
        };
        cfg.delta_o = self.delta_o;
        cfg.delta_d = self.delta_d;
        cfg.g_d = self.g_d;
        cfg.coupling_c = self.coupling_c;
        cfg.t_max = self.t_max;
        cfg.dt = self.dt;
        cfg.sample_stride = self.sample_stride;
        cfg.include_shift = self.include_shift;
        cfg
    }
}

/// Discretized reservoir.
pub struct PbgReservoir {
    inner: DiscretizedReservoir,
}

/// Sampled observables of one run.
pub struct PbgTrajectory {
    times: Vec<f64>,
    records: Vec<ObservableRecord>,
    /// Oracle runs carry the excited population only.
    excited_only: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: PbgStatus, msg: impl Into<String>) -> PbgStatus {
    set_error(msg.into());
    status
}

fn guard(f: impl FnOnce() -> PbgStatus) -> PbgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(PbgStatus::Internal, "panic inside pbgsim"),
    }
}

fn from_result<T>(r: pbgsim::Result<T>, out: impl FnOnce(T)) -> PbgStatus {
    match r {
        Ok(v) => {
            out(v);
            PbgStatus::Ok
        }
        Err(e) => fail(PbgStatus::from(&e), e.to_string()),
    }
}

/// Message for the last failed call on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn pbg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `out` must point to writable memory for one `PbgParams`.
#[no_mangle]
pub unsafe extern "C" fn pbg_params_default(kind: PbgExperiment, out: *mut PbgParams) -> PbgStatus {
    if out.is_null() {
        return fail(PbgStatus::NullPointer, "out is null");
    }
    let kind = experiment(kind);
    *out = PbgParams::from_config(&RunConfig::defaults(kind));
    PbgStatus::Ok
}

fn experiment(kind: PbgExperiment) -> ExperimentKind {
    match kind {
        PbgExperiment::Decay => ExperimentKind::Decay,
        PbgExperiment::TwoPhoton => ExperimentKind::TwoPhoton,
        PbgExperiment::Oracle => ExperimentKind::Oracle,
    }
}

/// # Safety
/// `params` must be null or valid; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn pbg_reservoir_new(params: *const PbgParams, out: *mut *mut PbgReservoir) -> PbgStatus {
    if params.is_null() || out.is_null() {
        return fail(PbgStatus::NullPointer, "params or out is null");
    }
    let cfg = (*params).to_config(ExperimentKind::Decay);
    guard(|| {
        from_result(build_reservoir(&cfg, cfg.n_modes), |(_, inner)| {
            *out = Box::into_raw(Box::new(PbgReservoir { inner }));
        })
    })
}

/// # Safety
/// `res` must be null or a handle from [`pbg_reservoir_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pbg_reservoir_free(res: *mut PbgReservoir) {
    if !res.is_null() {
        drop(Box::from_raw(res));
    }
}

/// Number of modes; 0 for a null handle.
///
/// # Safety
/// `res` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pbg_reservoir_len(res: *const PbgReservoir) -> usize {
    res.as_ref().map_or(0, |r| r.inner.n_modes)
}

/// # Safety
/// `res` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pbg_reservoir_coupling(res: *const PbgReservoir) -> f64 {
    res.as_ref().map_or(f64::NAN, |r| r.inner.coupling_g)
}

/// # Safety
/// `res` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pbg_reservoir_vacuum_shift(res: *const PbgReservoir) -> f64 {
    res.as_ref().map_or(f64::NAN, |r| r.inner.vacuum_shift)
}

unsafe fn copy_out(src: &[f64], buf: *mut f64, len: usize) -> PbgStatus {
    if buf.is_null() {
        return fail(PbgStatus::NullPointer, "buffer is null");
    }
    if len < src.len() {
        return fail(
            PbgStatus::BufferTooSmall,
            format!("buffer holds {len} values, {} needed", src.len()),
        );
    }
    ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    PbgStatus::Ok
}

/// Copies the mode frequencies into `buf`, which must hold at least
/// [`pbg_reservoir_len`] values.
///
/// # Safety
/// `buf` must be writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn pbg_reservoir_frequencies(res: *const PbgReservoir, buf: *mut f64, len: usize) -> PbgStatus {
    match res.as_ref() {
        Some(r) => copy_out(&r.inner.frequencies, buf, len),
        None => fail(PbgStatus::NullPointer, "reservoir is null"),
    }
}

unsafe fn run(
    params: *const PbgParams,
    out: *mut *mut PbgTrajectory,
    kind: ExperimentKind,
) -> PbgStatus {
    if params.is_null() || out.is_null() {
        return fail(PbgStatus::NullPointer, "params or out is null");
    }
    let cfg = (*params).to_config(kind);
    guard(|| {
        let traj = cfg.validate().and_then(|_| match kind {
            ExperimentKind::Oracle => simulate_oracle(&cfg, false).map(|o| PbgTrajectory {
                records: o
                    .p_excited
                    .iter()
                    .map(|&p| ObservableRecord {
                        p_excited: p,
                        ..Default::default()
                    })
                    .collect(),
                times: o.times,
                excited_only: true,
            }),
            _ => {
                let sim = if kind == ExperimentKind::TwoPhoton {
                    simulate_two_photon(&cfg)
                } else {
                    simulate_decay(&cfg)
                };
                sim.map(|s| PbgTrajectory {
                    times: s.trajectory.times,
                    records: s.trajectory.observables,
                    excited_only: false,
                })
            }
        });
        from_result(traj, |t| *out = Box::into_raw(Box::new(t)))
    })
}

/// One-excitation decay from `|e,0>`.
///
/// # Safety
/// `params` must be null or valid; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn pbg_run_decay(params: *const PbgParams, out: *mut *mut PbgTrajectory) -> PbgStatus {
    run(params, out, ExperimentKind::Decay)
}

/// Two-excitation run from `|e,1_d,0>`.
///
/// # Safety
/// `params` must be null or valid; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn pbg_run_two_photon(params: *const PbgParams, out: *mut *mut PbgTrajectory) -> PbgStatus {
    run(params, out, ExperimentKind::TwoPhoton)
}

/// Continuum reference for the decay without a defect. Only
/// `PBG_OBSERVABLE_P_EXCITED` is available on the result.
///
/// # Safety
/// `params` must be null or valid; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn pbg_oracle_decay(params: *const PbgParams, out: *mut *mut PbgTrajectory) -> PbgStatus {
    run(params, out, ExperimentKind::Oracle)
}

/// # Safety
/// `traj` must be null or a handle from one of the run functions not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pbg_trajectory_free(traj: *mut PbgTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Number of samples; 0 for a null handle.
///
/// # Safety
/// `traj` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pbg_trajectory_len(traj: *const PbgTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.times.len())
}

/// # Safety
/// `buf` must be writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn pbg_trajectory_times(traj: *const PbgTrajectory, buf: *mut f64, len: usize) -> PbgStatus {
    match traj.as_ref() {
        Some(t) => copy_out(&t.times, buf, len),
        None => fail(PbgStatus::NullPointer, "trajectory is null"),
    }
}

/// # Safety
/// `buf` must be writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn pbg_trajectory_observable(
    traj: *const PbgTrajectory,
    which: PbgObservable,
    buf: *mut f64,
    len: usize,
) -> PbgStatus {
    let Some(t) = traj.as_ref() else {
        return fail(PbgStatus::NullPointer, "trajectory is null");
    };
    if t.excited_only && which != PbgObservable::PExcited {
        return fail(PbgStatus::Unavailable, "oracle trajectories carry p_excited only");
    }
    let pick = |r: &ObservableRecord| match which {
        PbgObservable::PExcited => r.p_excited,
        PbgObservable::NDefect => r.n_defect,
        PbgObservable::PResZero => r.p_res_zero,
        PbgObservable::PResOne => r.p_res_one,
        PbgObservable::PResTwo => r.p_res_two,
        PbgObservable::NTotal => r.n_total,
        PbgObservable::NormSq => r.norm_sq,
    };
    let column: Vec<f64> = t.records.iter().map(pick).collect();
    copy_out(&column, buf, len)
}
