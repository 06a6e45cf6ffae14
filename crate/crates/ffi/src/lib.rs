//! C ABI over `spring-core`.
//!
//! Objects cross the boundary as opaque handles owned by the caller and
//! released with the matching `*_free`. Every fallible call returns a
//! [`SpringStatus`]; on failure a description is available from
//! [`spring_last_error_message`] on the same thread. Matrices are passed as
//! dense row-major `double` buffers.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use spring_core::linalg::Matrix;
use spring_core::model::{center_scale, compute_suff_stats, DataSet, PenaltyPair, SpringFit};
use spring_core::optimizer::{fit_with_stats, kkt_residual, SolverOptions};
use spring_core::selection::degrees_of_freedom;
use spring_core::structure::{
    chain_laplacian, genetic_precision, hamming_laplacian, identity_structure, GeneticMap,
    StructureMatrix,
};
use spring_core::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpringStatus {
    Ok = 0,
    InvalidInput = 2,
    Numerical = 3,
    Io = 4,
    NullPointer = 5,
    Panic = 6,
}

/// Opaque structure matrix handle.
pub struct SpringStructure {
    inner: StructureMatrix,
}

/// Opaque fitted model handle.
pub struct SpringFitHandle {
    fit: SpringFit,
    df: f64,
    kkt: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> SpringStatus {
    match e {
        Error::Io { .. } => SpringStatus::Io,
        Error::Cell { source, .. } => status_of(source),
        e if e.is_numerical() => SpringStatus::Numerical,
        _ => SpringStatus::InvalidInput,
    }
}

fn guard(f: impl FnOnce() -> Result<(), SpringStatus>) -> SpringStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SpringStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            SpringStatus::Panic
        }
    }
}

fn fail(e: Error) -> SpringStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

fn null(what: &str) -> SpringStatus {
    set_error(format!("null pointer: {what}"));
    SpringStatus::NullPointer
}

/// # Safety
/// `ptr` must be null or valid for reading `len` doubles.
unsafe fn read_slice<'a>(
    ptr: *const f64,
    len: usize,
    what: &str,
) -> Result<&'a [f64], SpringStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

fn checked_len(a: usize, b: usize) -> Result<usize, SpringStatus> {
    a.checked_mul(b).ok_or_else(|| {
        set_error("dimension overflow".into());
        SpringStatus::InvalidInput
    })
}

/// # Safety
/// `out` must be null or valid for writing one pointer.
unsafe fn emit<T>(out: *mut *mut T, value: T) -> Result<(), SpringStatus> {
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// # Safety
/// `out` must be valid for writing one pointer.
unsafe fn new_structure(
    out: *mut *mut SpringStructure,
    make: impl FnOnce() -> Result<StructureMatrix, Error>,
) -> SpringStatus {
    if out.is_null() {
        return null("out");
    }
    *out = ptr::null_mut();
    guard(|| {
        let inner = make().map_err(fail)?;
        emit(out, SpringStructure { inner })
    })
}

/// p×p identity structure.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn spring_structure_identity(
    p: usize,
    out: *mut *mut SpringStructure,
) -> SpringStatus {
    new_structure(out, || identity_structure(p))
}

/// Chain-graph Laplacian of the given order on p predictors.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn spring_structure_chain(
    p: usize,
    order: u32,
    out: *mut *mut SpringStructure,
) -> SpringStatus {
    new_structure(out, || chain_laplacian(p, order))
}

/// Hamming-graph Laplacian over all 4^k motifs of length k.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn spring_structure_hamming(
    k: u32,
    ell: u32,
    out: *mut *mut SpringStructure,
) -> SpringStatus {
    new_structure(out, || hamming_laplacian(k, ell))
}

/// Precision matrix of a single-chromosome genetic map given the
/// `n_markers - 1` consecutive distances in centiMorgan.
///
/// # Safety
/// `distances` must be valid for reading `n_markers - 1` doubles; `out`
/// must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn spring_structure_genetic(
    distances: *const f64,
    n_markers: usize,
    rho: f64,
    out: *mut *mut SpringStructure,
) -> SpringStatus {
    if out.is_null() {
        return null("out");
    }
    *out = ptr::null_mut();
    if n_markers == 0 {
        set_error("genetic map needs at least one marker".into());
        return SpringStatus::InvalidInput;
    }
    let d = match read_slice(distances, n_markers - 1, "distances") {
        Ok(d) => d.to_vec(),
        Err(s) => return s,
    };
    new_structure(out, || {
        genetic_precision(&GeneticMap::single_chromosome(d, rho))
    })
}

/// User-supplied symmetric positive semidefinite p×p matrix (row-major).
///
/// # Safety
/// `values` must be valid for reading `p * p` doubles; `out` must be valid
/// for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn spring_structure_custom(
    values: *const f64,
    p: usize,
    out: *mut *mut SpringStructure,
) -> SpringStatus {
    if out.is_null() {
        return null("out");
    }
    *out = ptr::null_mut();
    let len = match checked_len(p, p) {
        Ok(l) => l,
        Err(s) => return s,
    };
    let v = match read_slice(values, len, "values") {
        Ok(v) => v,
        Err(s) => return s,
    };
    let m = Matrix::from_row_slice(p, p, v);
    new_structure(out, || StructureMatrix::custom(m))
}

/// Dimension of a structure matrix, 0 for null.
///
/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn spring_structure_dim(s: *const SpringStructure) -> usize {
    s.as_ref().map_or(0, |s| s.inner.dim())
}

/// # Safety
/// `s` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn spring_structure_free(s: *mut SpringStructure) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Fits one (lambda1, lambda2) pair. `x` is n×p and `y` n×q, row-major.
/// With `standardize` nonzero the columns are centered and responses scaled
/// to unit variance; otherwise the data must already be centered.
///
/// # Safety
/// `x` and `y` must be valid for reading `n * p` and `n * q` doubles,
/// `structure` must be a live handle and `out` valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn spring_fit(
    x: *const f64,
    y: *const f64,
    n: usize,
    p: usize,
    q: usize,
    structure: *const SpringStructure,
    lambda1: f64,
    lambda2: f64,
    standardize: i32,
    out: *mut *mut SpringFitHandle,
) -> SpringStatus {
    if out.is_null() {
        return null("out");
    }
    *out = ptr::null_mut();
    let Some(l) = structure.as_ref() else {
        return null("structure");
    };
    guard(|| {
        let xs = read_slice(x, checked_len(n, p)?, "x")?;
        let ys = read_slice(y, checked_len(n, q)?, "y")?;
        let xm = Matrix::from_row_slice(n, p, xs);
        let ym = Matrix::from_row_slice(n, q, ys);
        let data = if standardize != 0 {
            DataSet::new(xm, ym).and_then(|d| center_scale(&d))
        } else {
            DataSet::centered(xm, ym)
        }
        .map_err(fail)?;
        let stats = compute_suff_stats(&data).map_err(fail)?;
        let pen = PenaltyPair::new(lambda1, lambda2).map_err(fail)?;
        let fit =
            fit_with_stats(&stats, &l.inner, pen, &SolverOptions::default(), None).map_err(fail)?;
        let df = degrees_of_freedom(&fit, &stats, &l.inner, pen.lambda2).map_err(fail)?;
        let kkt = kkt_residual(&fit, &stats, &l.inner, pen);
        emit(out, SpringFitHandle { fit, df, kkt })
    })
}

/// # Safety
/// `f` must be null or a live handle; `p` and `q` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn spring_fit_dims(
    f: *const SpringFitHandle,
    p: *mut usize,
    q: *mut usize,
) -> SpringStatus {
    let Some(f) = f.as_ref() else {
        return null("fit");
    };
    if p.is_null() || q.is_null() {
        return null("dims");
    }
    *p = f.fit.omega_xy.nrows();
    *q = f.fit.omega_xy.ncols();
    SpringStatus::Ok
}

/// # Safety
/// `buf` must be valid for writing `len` doubles.
unsafe fn copy_out(m: &Matrix, buf: *mut f64, len: usize) -> SpringStatus {
    if buf.is_null() {
        return null("buffer");
    }
    if len != m.len() {
        set_error(format!("buffer holds {len} values, need {}", m.len()));
        return SpringStatus::InvalidInput;
    }
    let t = m.transpose();
    std::slice::from_raw_parts_mut(buf, len).copy_from_slice(t.as_slice());
    SpringStatus::Ok
}

/// # Safety
/// `f` must be null or a live handle and `buf` valid for writing `len` doubles.
unsafe fn get_matrix(
    f: *const SpringFitHandle,
    buf: *mut f64,
    len: usize,
    pick: fn(&SpringFit) -> &Matrix,
) -> SpringStatus {
    clear_error();
    match f.as_ref() {
        Some(f) => copy_out(pick(&f.fit), buf, len),
        None => null("fit"),
    }
}

/// Direct effects Ω_xy (p×q, row-major).
///
/// # Safety
/// `f` must be a live handle and `buf` valid for writing `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn spring_fit_omega_xy(
    f: *const SpringFitHandle,
    buf: *mut f64,
    len: usize,
) -> SpringStatus {
    get_matrix(f, buf, len, |f| &f.omega_xy)
}

/// Response precision Ω_yy (q×q, row-major).
///
/// # Safety
/// `f` must be a live handle and `buf` valid for writing `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn spring_fit_omega_yy(
    f: *const SpringFitHandle,
    buf: *mut f64,
    len: usize,
) -> SpringStatus {
    get_matrix(f, buf, len, |f| &f.omega_yy)
}

/// Regression coefficients B (p×q, row-major).
///
/// # Safety
/// `f` must be a live handle and `buf` valid for writing `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn spring_fit_coefficients(
    f: *const SpringFitHandle,
    buf: *mut f64,
    len: usize,
) -> SpringStatus {
    get_matrix(f, buf, len, |f| &f.b)
}

/// Residual covariance R (q×q, row-major).
///
/// # Safety
/// `f` must be a live handle and `buf` valid for writing `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn spring_fit_residual_cov(
    f: *const SpringFitHandle,
    buf: *mut f64,
    len: usize,
) -> SpringStatus {
    get_matrix(f, buf, len, |f| &f.r)
}

/// Final objective value, NaN for null.
///
/// # Safety
/// `f` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn spring_fit_objective(f: *const SpringFitHandle) -> f64 {
    f.as_ref().map_or(f64::NAN, |f| f.fit.objective_value)
}

/// Estimated degrees of freedom, NaN for null.
///
/// # Safety
/// `f` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn spring_fit_df(f: *const SpringFitHandle) -> f64 {
    f.as_ref().map_or(f64::NAN, |f| f.df)
}

/// Optimality residual of the returned solution, NaN for null.
///
/// # Safety
/// `f` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn spring_fit_kkt_residual(f: *const SpringFitHandle) -> f64 {
    f.as_ref().map_or(f64::NAN, |f| f.kkt)
}

/// 1 if the solver met its stopping rule, 0 if not, -1 for null.
///
/// # Safety
/// `f` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn spring_fit_converged(f: *const SpringFitHandle) -> i32 {
    f.as_ref().map_or(-1, |f| f.fit.converged as i32)
}

/// # Safety
/// `f` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn spring_fit_free(f: *mut SpringFitHandle) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn spring_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}
