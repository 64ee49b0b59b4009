//! C ABI for `qflg`.
//!
//! Every function returns a [`QflgStatus`]. Objects are opaque handles
//! released with their `_free` function; strings returned through `out`
//! parameters are owned by the caller and released with
//! [`qflg_string_free`]. After a failure, [`qflg_last_error`] describes it
//! on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qflg::cli::{self, job, FieldSpec};
use qflg::error::Error;
use qflg::lgp::{self, ScanBounds, Target, Verdict};
use qflg::places::decide_local;
use qflg::springer::{decide_isotropy, decide_ratfun, DiagonalForm};
use qflg::weierstrass::{normalize_form, NormalizedForm};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QflgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidInput = 4,
    ZeroInput = 5,
    InsufficientPrecision = 6,
    UnsupportedField = 7,
    NotASquare = 8,
    NotAUnit = 9,
    NotDivisorOfDistinguished = 10,
    ReducibleFactor = 11,
    UnsupportedPlace = 12,
    UnsupportedCenter = 13,
    NoCanonicalExtension = 14,
    PrecisionTooLowToCertify = 15,
    WitnessSearchExhausted = 16,
    ConsistencyViolation = 17,
    DegreeCapExceeded = 18,
    Panic = 19,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QflgVerdictKind {
    Obstructed = 0,
    Isotropic = 1,
    Undecided = 2,
}

/// Scan and search bounds.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QflgBounds {
    pub blowup_depth: u32,
    pub residue_degree_cap: u32,
    pub witness_degree_x: u32,
    pub witness_degree_y: u32,
    pub precision: u32,
    pub seed: u64,
}

impl From<QflgBounds> for ScanBounds {
    fn from(b: QflgBounds) -> Self {
        ScanBounds {
            blowup_depth: b.blowup_depth as usize,
            residue_degree_cap: b.residue_degree_cap as usize,
            witness_degree_x: b.witness_degree_x as usize,
            witness_degree_y: b.witness_degree_y as usize,
            precision: b.precision as usize,
            seed: b.seed,
        }
    }
}

/// A diagonal form over a complete discretely valued field, a finite field
/// or `F_q(t)`.
pub struct QflgCdvfForm {
    form: DiagonalForm,
}

/// A normalized diagonal form over `Frac(A[[y]])` or `K(y)`, `A = k[[x]]`.
pub struct QflgForm {
    form: NormalizedForm,
    target: Target,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> QflgStatus {
    match e {
        Error::ZeroInput => QflgStatus::ZeroInput,
        Error::InsufficientPrecision(_) => QflgStatus::InsufficientPrecision,
        Error::UnsupportedField(_) => QflgStatus::UnsupportedField,
        Error::NotASquare => QflgStatus::NotASquare,
        Error::NotAUnit => QflgStatus::NotAUnit,
        Error::NotDivisorOfDistinguished(_) => QflgStatus::NotDivisorOfDistinguished,
        Error::ReducibleFactor(_) => QflgStatus::ReducibleFactor,
        Error::UnsupportedPlace(_) => QflgStatus::UnsupportedPlace,
        Error::UnsupportedCenter(_) => QflgStatus::UnsupportedCenter,
        Error::NoCanonicalExtension(_) => QflgStatus::NoCanonicalExtension,
        Error::PrecisionTooLowToCertify => QflgStatus::PrecisionTooLowToCertify,
        Error::WitnessSearchExhausted => QflgStatus::WitnessSearchExhausted,
        Error::ConsistencyViolation(_) => QflgStatus::ConsistencyViolation,
        Error::Parse { .. } => QflgStatus::Parse,
        Error::InvalidInput(_) => QflgStatus::InvalidInput,
        Error::DegreeCapExceeded(_) => QflgStatus::DegreeCapExceeded,
    }
}

enum Fail {
    Status(QflgStatus, String),
    Engine(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Engine(e)
    }
}

type FfiResult<T> = Result<T, Fail>;

/// Runs `f`, recording any failure or panic for [`qflg_last_error`].
fn guard(f: impl FnOnce() -> FfiResult<()>) -> QflgStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QflgStatus::Ok,
        Ok(Err(Fail::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Ok(Err(Fail::Engine(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {msg}"));
            QflgStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(Fail::Status(QflgStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail::Status(QflgStatus::InvalidUtf8, format!("{name} is not valid UTF-8")))
}

fn non_null<T>(p: *const T, name: &str) -> FfiResult<()> {
    if p.is_null() {
        Err(Fail::Status(QflgStatus::NullPointer, format!("{name} is null")))
    } else {
        Ok(())
    }
}

fn to_c(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("nul bytes removed").into_raw()
}

unsafe fn write_string(out: *mut *mut c_char, s: String) {
    if !out.is_null() {
        *out = to_c(s);
    }
}

fn precision_or_default(n: u32) -> usize {
    if n == 0 {
        ScanBounds::default().precision
    } else {
        n as usize
    }
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn qflg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn qflg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn qflg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

#[no_mangle]
pub extern "C" fn qflg_bounds_default() -> QflgBounds {
    let b = ScanBounds::default();
    QflgBounds {
        blowup_depth: b.blowup_depth as u32,
        residue_degree_cap: b.residue_degree_cap as u32,
        witness_degree_x: b.witness_degree_x as u32,
        witness_degree_y: b.witness_degree_y as u32,
        precision: b.precision as u32,
        seed: b.seed,
    }
}

/// Parses `entries` (comma-separated) over `field`, e.g. `"F3((t))"` and
/// `"1, 1, t, t"`. `precision` 0 selects the default.
///
/// # Safety
/// String arguments must be null or NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qflg_cdvf_form_new(
    field: *const c_char,
    entries: *const c_char,
    precision: u32,
    out: *mut *mut QflgCdvfForm,
) -> QflgStatus {
    guard(|| {
        non_null(out, "out")?;
        let (field, entries) = (str_arg(field, "field")?, str_arg(entries, "entries")?);
        let FieldSpec::Tower(t) = cli::parse_field(field, precision_or_default(precision))? else {
            return Err(Fail::Status(QflgStatus::UnsupportedField, format!("{field} is not a field of this kind")));
        };
        let form = DiagonalForm::parse(&t, entries)?;
        *out = Box::into_raw(Box::new(QflgCdvfForm { form }));
        Ok(())
    })
}

/// # Safety
/// `form` must be null or a handle from [`qflg_cdvf_form_new`].
#[no_mangle]
pub unsafe extern "C" fn qflg_cdvf_form_free(form: *mut QflgCdvfForm) {
    if !form.is_null() {
        drop(Box::from_raw(form));
    }
}

/// Decides isotropy; `certificate` (optional) receives the proof as JSON.
///
/// # Safety
/// `form` must be a live handle and `isotropic` writable; `certificate`
/// may be null.
#[no_mangle]
pub unsafe extern "C" fn qflg_cdvf_decide(
    form: *const QflgCdvfForm,
    isotropic: *mut bool,
    certificate: *mut *mut c_char,
) -> QflgStatus {
    guard(|| {
        non_null(form, "form")?;
        non_null(isotropic, "isotropic")?;
        let q = &(*form).form;
        let d = match q.tower {
            qflg::fields::Tower::RatFun { .. } => decide_ratfun(q)?,
            _ => decide_isotropy(q)?,
        };
        *isotropic = d.isotropic;
        write_string(certificate, d.certificate.to_json());
        Ok(())
    })
}

/// Normalizes `entries` (comma-separated literal products such as
/// `"1, y, x*(y - x)"`) over `FracR(k[[x]][[y]])` or `k((x))(y)`. The ring
/// `k[[x]]` alone stands for the first.
///
/// # Safety
/// String arguments must be null or NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qflg_form_new(
    field: *const c_char,
    entries: *const c_char,
    precision: u32,
    out: *mut *mut QflgForm,
) -> QflgStatus {
    guard(|| {
        non_null(out, "out")?;
        let (field, entries) = (str_arg(field, "field")?, str_arg(entries, "entries")?);
        let (r, target) = match cli::parse_field(field, precision_or_default(precision))? {
            FieldSpec::Ring(r) => (r, Target::L),
            FieldSpec::Function(r, t) => (r, t),
            FieldSpec::Tower(_) => {
                return Err(Fail::Status(QflgStatus::UnsupportedField, format!("{field} is not k[[x]] or a function field over it")))
            }
        };
        let list = split_entries(entries);
        if list.is_empty() {
            return Err(Error::InvalidInput("empty form".into()).into());
        }
        let factors = list
            .into_iter()
            .map(|e| job::entry_factors(&r, &cli::EntryJson::Literal(e)))
            .collect::<Result<Vec<_>, Error>>()?;
        let form = normalize_form(&r, &factors)?;
        *out = Box::into_raw(Box::new(QflgForm { form, target }));
        Ok(())
    })
}

fn split_entries(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let (mut depth, mut cur) = (0i32, String::new());
    for c in s.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(std::mem::take(&mut cur).trim().to_string());
                continue;
            }
            _ => {}
        }
        cur.push(c);
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

/// # Safety
/// `form` must be null or a handle from [`qflg_form_new`].
#[no_mangle]
pub unsafe extern "C" fn qflg_form_free(form: *mut QflgForm) {
    if !form.is_null() {
        drop(Box::from_raw(form));
    }
}

/// Number of entries.
///
/// # Safety
/// `form` must be a live handle and `rank` writable.
#[no_mangle]
pub unsafe extern "C" fn qflg_form_rank(form: *const QflgForm, rank: *mut usize) -> QflgStatus {
    guard(|| {
        non_null(form, "form")?;
        non_null(rank, "rank")?;
        *rank = (*form).form.coeffs.len();
        Ok(())
    })
}

/// Normalized entries as a JSON array of `{lambda, n, factors}` records.
///
/// # Safety
/// `form` must be a live handle and `json` writable.
#[no_mangle]
pub unsafe extern "C" fn qflg_form_normalized_json(form: *const QflgForm, json: *mut *mut c_char) -> QflgStatus {
    guard(|| {
        non_null(form, "form")?;
        non_null(json, "json")?;
        let q = &(*form).form;
        let v: Vec<_> = q.coeffs.iter().map(|c| c.to_json(&q.ring)).collect();
        write_string(json, serde_json::to_string(&v).expect("serializes"));
        Ok(())
    })
}

/// Local decision at `place` (`"gauss"`, `"infinity"`, `"special:POLY"`,
/// `"generic:POLY"`, `"blowup:STEPS"` or place JSON).
///
/// # Safety
/// `form` must be a live handle, `place` NUL-terminated, `isotropic`
/// writable; `certificate` may be null.
#[no_mangle]
pub unsafe extern "C" fn qflg_place_decide(
    form: *const QflgForm,
    place: *const c_char,
    isotropic: *mut bool,
    certificate: *mut *mut c_char,
) -> QflgStatus {
    guard(|| {
        non_null(form, "form")?;
        non_null(isotropic, "isotropic")?;
        let q = &(*form).form;
        let spec = cli::parse_place(&q.ring, str_arg(place, "place")?)?;
        let d = decide_local(q, &spec)?;
        *isotropic = d.isotropic;
        write_string(certificate, serde_json::to_string(&d.certificate).expect("serializes"));
        Ok(())
    })
}

/// Three-valued verdict; `report` (optional) receives the full report as
/// JSON. A consistency violation returns
/// [`QflgStatus::ConsistencyViolation`] with the dump in
/// [`qflg_last_error`].
///
/// # Safety
/// `form` must be a live handle, `bounds` null (defaults) or readable,
/// `kind` writable; `report` may be null.
#[no_mangle]
pub unsafe extern "C" fn qflg_verdict(
    form: *const QflgForm,
    bounds: *const QflgBounds,
    kind: *mut QflgVerdictKind,
    report: *mut *mut c_char,
) -> QflgStatus {
    guard(|| {
        non_null(form, "form")?;
        non_null(kind, "kind")?;
        let b: ScanBounds = if bounds.is_null() { ScanBounds::default() } else { (*bounds).into() };
        let f = &*form;
        let rep = lgp::verdict_for(&f.form, &b, f.target)?;
        *kind = match rep.verdict {
            Verdict::Obstructed { .. } => QflgVerdictKind::Obstructed,
            Verdict::Isotropic { .. } => QflgVerdictKind::Isotropic,
            Verdict::Undecided { .. } => QflgVerdictKind::Undecided,
        };
        write_string(report, serde_json::to_string(&rep).expect("serializes"));
        Ok(())
    })
}

/// Runs a command-line invocation; `argv` excludes the program name.
/// Returns the process exit code and stores stdout in `output`.
///
/// # Safety
/// `argv` must point to `argc` NUL-terminated strings; `output` must be
/// writable or null.
#[no_mangle]
pub unsafe extern "C" fn qflg_cli_run(argc: c_int, argv: *const *const c_char, output: *mut *mut c_char) -> c_int {
    let mut code = cli::EXIT_INPUT;
    let status = guard(|| {
        if argc < 0 || (argc > 0 && argv.is_null()) {
            return Err(Fail::Status(QflgStatus::NullPointer, "argv is null".into()));
        }
        let args = (0..argc as usize).map(|i| str_arg(*argv.add(i), "argv").map(str::to_string)).collect::<FfiResult<Vec<_>>>()?;
        let out = cli::run_args(args);
        code = out.code;
        write_string(output, out.output);
        Ok(())
    });
    if status != QflgStatus::Ok {
        write_string(output, LAST_ERROR.with(|e| e.borrow().as_ref().map(|c| c.to_string_lossy().into_owned()).unwrap_or_default()));
    }
    code
}
