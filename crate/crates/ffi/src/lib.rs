//! C ABI over the `erbm` crate.
//!
//! Domains and ER systems are opaque heap handles created by `*_new`/`*_parse`
//! functions and released by the matching `*_free`. Every fallible call returns
//! an [`ErbmStatus`] and writes results through out-pointers; on failure the
//! message is available from [`erbm_last_error_message`] on the same thread.
//! Panics are caught at the boundary and reported as `ERBM_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use erbm::bm_kernels::{BoundaryPoint, Potential};
use erbm::erbm::{ErSystem, Start};
use erbm::geometry::{parse_domain, Domain};
use erbm::sampler::{estimate_exit_distribution, RunConfig};
use erbm::slitmap::bilateral_map;
use erbm::{Complex64, Error};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErbmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Malformed domain text; the message names the line.
    Parse = 3,
    /// Curves that are not simple, misoriented or intersecting.
    InvalidDomain = 4,
    IllConditioned = 5,
    ClearanceTooSmall = 6,
    OutsideDomain = 7,
    /// Any other numerical failure.
    Computation = 8,
    Panic = 9,
}

/// A validated domain.
pub struct ErbmDomain {
    inner: Domain,
}

/// The ER machinery (period matrix, collars, restart densities) of one domain.
pub struct ErbmSystem {
    inner: ErSystem,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> ErbmStatus {
    match e {
        Error::InvalidArgument(_) | Error::PointsTooClose { .. } | Error::ArcsNotDisjoint { .. } => ErbmStatus::InvalidArgument,
        Error::Parse { .. } => ErbmStatus::Parse,
        Error::InvalidCurve(_)
        | Error::NonSimpleCurve { .. }
        | Error::DegenerateCurve { .. }
        | Error::ClockwiseCurve { .. }
        | Error::InvalidDomain(_) => ErbmStatus::InvalidDomain,
        Error::IllConditioned { .. } | Error::SolverSingular { .. } => ErbmStatus::IllConditioned,
        Error::ClearanceTooSmall { .. } => ErbmStatus::ClearanceTooSmall,
        Error::OutsideDomain { .. } | Error::PoleTooCloseToBoundary { .. } | Error::NearPole { .. } => ErbmStatus::OutsideDomain,
        _ => ErbmStatus::Computation,
    }
}

struct Failure(ErbmStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(ErbmStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, translating errors and panics into a status and the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> ErbmStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ErbmStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            ErbmStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    // SAFETY: the caller passes a handle obtained from this library or null.
    unsafe { p.as_ref() }.ok_or_else(|| null(what))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    // SAFETY: non-null and, per the caller contract, valid for writes.
    unsafe { out.write(value) };
    Ok(())
}

/// Message of the last failed call on this thread, or null after a success.
/// The pointer stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn erbm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn erbm_status_name(status: ErbmStatus) -> *const c_char {
    let s: &'static CStr = match status {
        ErbmStatus::Ok => c"ok",
        ErbmStatus::NullPointer => c"null pointer",
        ErbmStatus::InvalidArgument => c"invalid argument",
        ErbmStatus::Parse => c"parse error",
        ErbmStatus::InvalidDomain => c"invalid domain",
        ErbmStatus::IllConditioned => c"ill-conditioned",
        ErbmStatus::ClearanceTooSmall => c"clearance too small",
        ErbmStatus::OutsideDomain => c"outside domain",
        ErbmStatus::Computation => c"computation failed",
        ErbmStatus::Panic => c"panic",
    };
    s.as_ptr()
}

/// Parses a domain file (`outer`/`hole` lines) with `nodes` collocation nodes per curve
/// (0 selects the default).
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn erbm_domain_parse(text: *const c_char, nodes: usize, out: *mut *mut ErbmDomain) -> ErbmStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        // SAFETY: caller guarantees a NUL-terminated string.
        let text = unsafe { CStr::from_ptr(text) }
            .to_str()
            .map_err(|e| Failure(ErbmStatus::Parse, format!("domain text is not UTF-8: {e}")))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let domain =
            parse_domain(text, (nodes > 0).then_some(nodes)).map_err(|e| Failure(domain_file_status(&e), e.to_string()))?;
        // SAFETY: checked non-null above.
        unsafe { out.write(Box::into_raw(Box::new(ErbmDomain { inner: domain }))) };
        Ok(())
    })
}

fn domain_file_status(e: &erbm::geometry::DomainFileError) -> ErbmStatus {
    match e {
        erbm::geometry::DomainFileError::Syntax { .. } => ErbmStatus::Parse,
        _ => ErbmStatus::InvalidDomain,
    }
}

/// Releases a domain; null is ignored.
///
/// # Safety
/// `domain` must come from [`erbm_domain_parse`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn erbm_domain_free(domain: *mut ErbmDomain) {
    if !domain.is_null() {
        // SAFETY: caller contract.
        drop(unsafe { Box::from_raw(domain) });
    }
}

/// Number of holes, or 0 for a null handle.
///
/// # Safety
/// `domain` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn erbm_domain_hole_count(domain: *const ErbmDomain) -> usize {
    // SAFETY: caller contract.
    unsafe { domain.as_ref() }.map_or(0, |d| d.inner.hole_count())
}

/// Whether `(x, y)` lies in the domain; false for a null handle.
///
/// # Safety
/// `domain` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn erbm_domain_contains(domain: *const ErbmDomain, x: f64, y: f64) -> bool {
    // SAFETY: caller contract.
    unsafe { domain.as_ref() }.is_some_and(|d| d.inner.contains(Complex64::new(x, y)))
}

/// Poisson kernel `H_D(z, w)` for `z = (x, y)` and `w` the outer boundary point with parameter `t`.
///
/// # Safety
/// `domain` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn erbm_poisson_kernel(domain: *const ErbmDomain, x: f64, y: f64, t: f64, out: *mut f64) -> ErbmStatus {
    guard(|| {
        // SAFETY: caller contract.
        let d = unsafe { deref(domain, "domain") }?;
        let h = Potential::new(&d.inner)?.poisson_kernel(Complex64::new(x, y), BoundaryPoint::outer(t))?;
        // SAFETY: caller contract.
        unsafe { write(out, h, "out") }
    })
}

/// Green's function `G_D(z, w)` with the positive `−(1/π) log|z − w|` normalization.
///
/// # Safety
/// `domain` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn erbm_green(domain: *const ErbmDomain, zx: f64, zy: f64, wx: f64, wy: f64, out: *mut f64) -> ErbmStatus {
    guard(|| {
        // SAFETY: caller contract.
        let d = unsafe { deref(domain, "domain") }?;
        let w = Complex64::new(wx, wy);
        if !d.inner.contains(w) {
            return Err(Error::OutsideDomain { x: wx, y: wy }.into());
        }
        let g = Potential::new(&d.inner)?.greens_function(Complex64::new(zx, zy))?;
        // SAFETY: caller contract.
        unsafe { write(out, g.value(w), "out") }
    })
}

/// Builds the ER system with collars at `collar` times each hole's clearance.
///
/// # Safety
/// `domain` must be a live handle and `out` valid for writes. The system does not
/// borrow the domain, which may be freed afterwards.
#[no_mangle]
pub unsafe extern "C" fn erbm_system_new(domain: *const ErbmDomain, collar: f64, out: *mut *mut ErbmSystem) -> ErbmStatus {
    guard(|| {
        // SAFETY: caller contract.
        let d = unsafe { deref(domain, "domain") }?;
        if out.is_null() {
            return Err(null("out"));
        }
        let s = ErSystem::new(&d.inner, collar)?;
        // SAFETY: checked non-null above.
        unsafe { out.write(Box::into_raw(Box::new(ErbmSystem { inner: s }))) };
        Ok(())
    })
}

/// Releases a system; null is ignored.
///
/// # Safety
/// `system` must come from [`erbm_system_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn erbm_system_free(system: *mut ErbmSystem) {
    if !system.is_null() {
        // SAFETY: caller contract.
        drop(unsafe { Box::from_raw(system) });
    }
}

/// ER Poisson kernel `H^ER(z, w)` for `w` the outer boundary point with parameter `t`.
///
/// # Safety
/// `system` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn erbm_er_poisson_kernel(system: *const ErbmSystem, x: f64, y: f64, t: f64, out: *mut f64) -> ErbmStatus {
    guard(|| {
        // SAFETY: caller contract.
        let s = unsafe { deref(system, "system") }?;
        let z = Complex64::new(x, y);
        if !s.inner.domain().contains(z) {
            return Err(Error::OutsideDomain { x, y }.into());
        }
        let h = s.inner.er_poisson_kernel(BoundaryPoint::outer(t))?;
        // SAFETY: caller contract.
        unsafe { write(out, h.value(z), "out") }
    })
}

/// ER Green's function `G^ER(z, w)`.
///
/// # Safety
/// `system` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn erbm_er_green(system: *const ErbmSystem, zx: f64, zy: f64, wx: f64, wy: f64, out: *mut f64) -> ErbmStatus {
    guard(|| {
        // SAFETY: caller contract.
        let s = unsafe { deref(system, "system") }?;
        let w = Complex64::new(wx, wy);
        if !s.inner.domain().contains(w) {
            return Err(Error::OutsideDomain { x: wx, y: wy }.into());
        }
        let g = s.inner.er_green(Complex64::new(zx, zy))?;
        // SAFETY: caller contract.
        unsafe { write(out, g.value(w), "out") }
    })
}

fn copy_rows(rows: &[Vec<f64>], out: *mut f64, len: usize) -> Result<(), Failure> {
    let n: usize = rows.iter().map(Vec::len).sum();
    if len < n {
        return Err(Failure(ErbmStatus::InvalidArgument, format!("buffer holds {len} values, {n} needed")));
    }
    if n > 0 && out.is_null() {
        return Err(null("out"));
    }
    for (k, v) in rows.iter().flatten().enumerate() {
        // SAFETY: `out` holds at least `len >= n` values per the caller contract.
        unsafe { out.add(k).write(*v) };
    }
    Ok(())
}

/// Writes the boundary chain row-major into `out`: `n` rows of `n + 1` entries for
/// `n` holes, row `i` holding hole `i + 1` and columns `0..=n` the target components.
/// With `jumps` false the entries are the next-hit probabilities `q`, otherwise the
/// jump probabilities `p̃` (self-hits removed).
///
/// # Safety
/// `system` must be a live handle and `out` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn erbm_boundary_chain(system: *const ErbmSystem, jumps: bool, out: *mut f64, len: usize) -> ErbmStatus {
    guard(|| {
        // SAFETY: caller contract.
        let s = unsafe { deref(system, "system") }?;
        if s.inner.hole_count() == 0 {
            return Ok(());
        }
        let chain = s.inner.boundary_chain()?;
        copy_rows(if jumps { chain.p_tilde_rows() } else { chain.q_rows() }, out, len)
    })
}

/// Inner radius of the bilateral slit map sending hole `hole` to the inner circle.
///
/// # Safety
/// `system` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn erbm_bilateral_inner_radius(system: *const ErbmSystem, hole: usize, out: *mut f64) -> ErbmStatus {
    guard(|| {
        // SAFETY: caller contract.
        let s = unsafe { deref(system, "system") }?;
        let (_, ring) = bilateral_map(&s.inner, hole)?;
        // SAFETY: caller contract.
        unsafe { write(out, ring.inner_radius, "out") }
    })
}

/// Samples `paths` ERBM paths and bins their exits on the outer curve into `bins`
/// equal parameter arcs. Paths start on hole `hole`, or at `(x, y)` when `hole` is 0.
/// Writes the empirical frequencies to `frequencies` (length `bins`) and the total
/// variation distance to the ER harmonic measure to `total_variation`.
///
/// # Safety
/// `system` must be a live handle, `frequencies` valid for `bins` writes and
/// `total_variation` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn erbm_sample_exit(
    system: *const ErbmSystem,
    hole: usize,
    x: f64,
    y: f64,
    bins: usize,
    paths: usize,
    seed: u64,
    frequencies: *mut f64,
    total_variation: *mut f64,
) -> ErbmStatus {
    guard(|| {
        // SAFETY: caller contract.
        let s = unsafe { deref(system, "system") }?;
        if frequencies.is_null() || total_variation.is_null() {
            return Err(null("output buffer"));
        }
        let start = if hole == 0 { Start::Point(Complex64::new(x, y)) } else { Start::Hole(hole) };
        let config = RunConfig::default().with_paths(paths).with_seed(seed);
        let est = estimate_exit_distribution(&s.inner, start, bins, &config)?;
        copy_rows(&[est.distribution.frequencies()], frequencies, bins)?;
        // SAFETY: checked non-null above.
        unsafe { total_variation.write(est.total_variation) };
        Ok(())
    })
}
