//! C interface to `ilim-core`.
//!
//! Every function returns an [`IlimStatus`]; on failure a description is
//! available from [`ilim_last_error_message`] on the same thread. Objects are
//! handed out as opaque pointers and released with the matching `_free`.

use std::cell::RefCell;
use std::ffi::{c_char, c_void, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::sync::Arc;

use ilim_core::analysis::{error_series, fit_rate, gronwall_envelope};
use ilim_core::corrector::{flat_corrector, CorrectorParams, Trace};
use ilim_core::criteria::{evaluate_criteria, layer_height, LayerSpec, MSchedule};
use ilim_core::field::{make_channel_grid, Clustering, Grid};
use ilim_core::harness::{emit_report, run_sweep, SweepConfig};
use ilim_core::solver::{run_simulation, PairedRun, ShearExact, ShearProfile, TopBoundary};
use ilim_core::Error;

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IlimStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    BufferTooSmall = 3,
    Cfl = 4,
    NonFinite = 5,
    Mismatch = 6,
    Format = 7,
    Io = 8,
    SweepFailed = 9,
    Panic = 10,
}

/// Channel grid handle.
pub struct IlimGrid {
    grid: Arc<Grid>,
}

/// Paired Navier-Stokes / Euler run handle.
pub struct IlimRun {
    run: PairedRun,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(IlimStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::InvalidArgument(_) => IlimStatus::InvalidArgument,
            Error::Cfl { .. } => IlimStatus::Cfl,
            Error::NonFinite { .. } => IlimStatus::NonFinite,
            Error::Mismatch(_) => IlimStatus::Mismatch,
            Error::Format(_) => IlimStatus::Format,
            Error::Io { .. } => IlimStatus::Io,
            Error::SweepFailed => IlimStatus::SweepFailed,
        };
        Failure(status, e.to_string())
    }
}

type FfiResult<T> = Result<T, Failure>;

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> FfiResult<()>) -> IlimStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            IlimStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            IlimStatus::Panic
        }
    }
}

fn null(name: &str) -> Failure {
    Failure(IlimStatus::NullPointer, format!("{name} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(IlimStatus::InvalidArgument, format!("{name} is not valid UTF-8")))
}

unsafe fn slice_arg<'a>(p: *const f64, len: usize, name: &str) -> FfiResult<&'a [f64]> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(name));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn copy_out(src: &[f64], out: *mut f64, len: usize, name: &str) -> FfiResult<()> {
    if out.is_null() {
        return Err(null(name));
    }
    if len < src.len() {
        return Err(Failure(
            IlimStatus::BufferTooSmall,
            format!("{name} holds {len} values, {} needed", src.len()),
        ));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), out, src.len());
    Ok(())
}

unsafe fn write_out<T>(out: *mut T, value: T, name: &str) -> FfiResult<()> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(value);
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ilim_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL. The pointer stays
/// valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn ilim_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Creates a channel grid; `tanh_strength <= 0` selects uniform spacing.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn ilim_grid_new(
    nx: usize,
    ny: usize,
    period: f64,
    height: f64,
    tanh_strength: f64,
    out: *mut *mut IlimGrid,
) -> IlimStatus {
    guard(|| {
        let clustering = if tanh_strength > 0.0 {
            Clustering::Tanh {
                strength: tanh_strength,
            }
        } else {
            Clustering::Uniform
        };
        let grid = make_channel_grid(nx, ny, period, height, clustering)?;
        write_out(out, Box::into_raw(Box::new(IlimGrid { grid })), "out")
    })
}

/// # Safety
/// `grid` must come from [`ilim_grid_new`] and not be freed twice; NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn ilim_grid_free(grid: *mut IlimGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// # Safety
/// `grid` must be a live handle; `nx`, `ny` valid writable pointers.
#[no_mangle]
pub unsafe extern "C" fn ilim_grid_size(grid: *const IlimGrid, nx: *mut usize, ny: *mut usize) -> IlimStatus {
    guard(|| {
        let g = grid.as_ref().ok_or_else(|| null("grid"))?;
        write_out(nx, g.grid.nx(), "nx")?;
        write_out(ny, g.grid.ny(), "ny")
    })
}

/// Copies the `ny` wall-normal coordinates into `out`.
///
/// # Safety
/// `grid` must be a live handle and `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ilim_grid_y_coords(grid: *const IlimGrid, out: *mut f64, len: usize) -> IlimStatus {
    guard(|| {
        let g = grid.as_ref().ok_or_else(|| null("grid"))?;
        copy_out(g.grid.y_coords(), out, len, "out")
    })
}

/// Flat corrector for the wall trace `trace` (`nx` samples) at time `t`.
/// Components are written row by row (`index = j * nx + i`).
///
/// # Safety
/// `trace` must hold `nx` doubles; `phi1` and `phi2` must each hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ilim_flat_corrector(
    grid: *const IlimGrid,
    trace: *const f64,
    nx: usize,
    alpha: f64,
    t: f64,
    phi1: *mut f64,
    phi2: *mut f64,
    len: usize,
) -> IlimStatus {
    guard(|| {
        let g = grid.as_ref().ok_or_else(|| null("grid"))?;
        let samples = slice_arg(trace, nx, "trace")?.to_vec();
        let params = CorrectorParams::new(alpha, t, Trace::from_samples(&g.grid, samples)?)?;
        let phi = flat_corrector(&params, &g.grid)?;
        copy_out(phi.comp1.values(), phi1, len, "phi1")?;
        copy_out(phi.comp2.values(), phi2, len, "phi2")
    })
}

/// Kato layer height for the schedule `m_form` (e.g. `"power:1,0.5"`) and
/// constant `c`. `clamped` is set to 1 when the logarithm was not positive.
///
/// # Safety
/// `m_form` must be a NUL-terminated string; `height` and `clamped` writable.
#[no_mangle]
pub unsafe extern "C" fn ilim_layer_height(
    nu: f64,
    t: f64,
    m_form: *const c_char,
    c: f64,
    height: *mut f64,
    clamped: *mut i32,
) -> IlimStatus {
    guard(|| {
        let m: MSchedule = str_arg(m_form, "m_form")?.parse()?;
        let spec = LayerSpec::new(c, 2.0)?;
        let h = layer_height(nu, t, &m, &spec);
        write_out(height, h.height, "height")?;
        write_out(clamped, h.clamped as i32, "clamped")
    })
}

/// Exact shear flow from `v(y) = -amplitude (1 - exp(-y / scale))` with a
/// stress-free lid at `height`, evaluated at `ys`.
///
/// # Safety
/// `ys` and `out` must each hold `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn ilim_shear_exact(
    nu: f64,
    t: f64,
    amplitude: f64,
    scale: f64,
    height: f64,
    ys: *const f64,
    n: usize,
    out: *mut f64,
) -> IlimStatus {
    guard(|| {
        let profile = ShearProfile::Exponential { amplitude, scale };
        profile.validate()?;
        let exact = ShearExact::new(profile.function(height), nu, height, TopBoundary::StressFree)?;
        let values = exact.profile(t, slice_arg(ys, n, "ys")?)?;
        copy_out(&values, out, n, "out")
    })
}

/// Least-squares exponent of `errors ≈ C nus^exponent`.
///
/// # Safety
/// `nus` and `errors` must hold `n` doubles; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn ilim_fit_rate(
    nus: *const f64,
    errors: *const f64,
    n: usize,
    exponent: *mut f64,
    intercept: *mut f64,
) -> IlimStatus {
    guard(|| {
        let x = slice_arg(nus, n, "nus")?;
        let y = slice_arg(errors, n, "errors")?;
        let samples: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).collect();
        let fit = fit_rate(&samples)?;
        write_out(exponent, fit.exponent, "exponent")?;
        write_out(intercept, fit.intercept, "intercept")
    })
}

/// Forcing callback for [`ilim_gronwall_envelope`].
pub type IlimForcing = Option<extern "C" fn(t: f64, user: *mut c_void) -> f64>;

/// Solution of `y' = 2 c y + 2 f(t)`, `y(0) = 0`, at `t_k = k T / n`, `k = 0..=n`.
///
/// # Safety
/// `out` must hold `len >= n + 1` doubles; `forcing` must be safe to call with `user`.
#[no_mangle]
pub unsafe extern "C" fn ilim_gronwall_envelope(
    c_growth: f64,
    forcing: IlimForcing,
    user: *mut c_void,
    horizon: f64,
    n: usize,
    out: *mut f64,
    len: usize,
) -> IlimStatus {
    guard(|| {
        let f = forcing.ok_or_else(|| null("forcing"))?;
        let curve = gronwall_envelope(c_growth, |t| f(t, user), horizon, n)?;
        let ys: Vec<f64> = curve.into_iter().map(|(_, y)| y).collect();
        copy_out(&ys, out, len, "out")
    })
}

/// Runs a paired simulation from a TOML sweep configuration at viscosity
/// `nu` (the first configured value when `nu <= 0`).
///
/// # Safety
/// `config_toml` must be a NUL-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ilim_run_new(config_toml: *const c_char, nu: f64, out: *mut *mut IlimRun) -> IlimStatus {
    guard(|| {
        let cfg = SweepConfig::from_toml_str(str_arg(config_toml, "config_toml")?)?;
        let nu = if nu > 0.0 { nu } else { cfg.nu_list[0] };
        let run = run_simulation(&cfg.simulation(nu))?;
        write_out(out, Box::into_raw(Box::new(IlimRun { run })), "out")
    })
}

/// # Safety
/// `run` must come from [`ilim_run_new`] and not be freed twice; NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn ilim_run_free(run: *mut IlimRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Number of stored output times.
///
/// # Safety
/// `run` must be a live handle and `len` writable.
#[no_mangle]
pub unsafe extern "C" fn ilim_run_len(run: *const IlimRun, len: *mut usize) -> IlimStatus {
    guard(|| {
        let r = run.as_ref().ok_or_else(|| null("run"))?;
        write_out(len, r.run.ns.len(), "len")
    })
}

/// # Safety
/// `run` must be a live handle and `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ilim_run_times(run: *const IlimRun, out: *mut f64, len: usize) -> IlimStatus {
    guard(|| {
        let r = run.as_ref().ok_or_else(|| null("run"))?;
        copy_out(&r.run.ns.times(), out, len, "out")
    })
}

/// `‖u − ū‖²` at every output time.
///
/// # Safety
/// `run` must be a live handle and `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ilim_run_error_series(run: *const IlimRun, out: *mut f64, len: usize) -> IlimStatus {
    guard(|| {
        let r = run.as_ref().ok_or_else(|| null("run"))?;
        let s = error_series(&r.run.ns, &r.run.euler)?;
        copy_out(&s.values, out, len, "out")
    })
}

/// Evaluates the layer criteria; `r <= 0` or infinite selects `L^∞`.
/// `all_pass` receives 1 when every criterion holds at every time. When
/// `csv_path` is not NULL the report is written there.
///
/// # Safety
/// Pointers must be valid; `csv_path` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn ilim_run_criteria(
    run: *const IlimRun,
    m_form: *const c_char,
    c: f64,
    r: f64,
    csv_path: *const c_char,
    all_pass: *mut i32,
) -> IlimStatus {
    guard(|| {
        let h = run.as_ref().ok_or_else(|| null("run"))?;
        let m: MSchedule = str_arg(m_form, "m_form")?.parse()?;
        let r = if r <= 0.0 { f64::INFINITY } else { r };
        let spec = LayerSpec::new(c, r)?;
        let report = evaluate_criteria(&h.run.ns, &h.run.euler, &m, &spec, false)?;
        if !csv_path.is_null() {
            report.write_csv(Path::new(str_arg(csv_path, "csv_path")?))?;
        }
        write_out(all_pass, report.all_pass() as i32, "all_pass")
    })
}

/// Stores both trajectories as ILIM1 snapshots under `dir/ns` and `dir/euler`.
///
/// # Safety
/// `run` must be a live handle and `dir` a NUL-terminated path.
#[no_mangle]
pub unsafe extern "C" fn ilim_run_write(run: *const IlimRun, dir: *const c_char) -> IlimStatus {
    guard(|| {
        let h = run.as_ref().ok_or_else(|| null("run"))?;
        let dir = Path::new(str_arg(dir, "dir")?);
        h.run.ns.write_dir(&dir.join("ns"))?;
        h.run.euler.write_dir(&dir.join("euler"))?;
        Ok(())
    })
}

/// Runs a full sweep and writes its report into `out_dir`. `exponent`
/// receives the fitted rate, or NaN when it is undefined.
///
/// # Safety
/// `config_toml` and `out_dir` must be NUL-terminated strings; `exponent` writable.
#[no_mangle]
pub unsafe extern "C" fn ilim_sweep_run(
    config_toml: *const c_char,
    jobs: usize,
    out_dir: *const c_char,
    exponent: *mut f64,
) -> IlimStatus {
    guard(|| {
        let cfg = SweepConfig::from_toml_str(str_arg(config_toml, "config_toml")?)?;
        let dir = Path::new(str_arg(out_dir, "out_dir")?);
        let result = run_sweep(&cfg, jobs.max(1))?;
        emit_report(&result, dir)?;
        write_out(exponent, result.rate.map_or(f64::NAN, |f| f.exponent), "exponent")
    })
}
