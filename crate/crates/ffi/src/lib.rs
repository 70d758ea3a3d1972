//! C ABI over the `cstrigger` library.
//!
//! Every fallible function returns a [`CstStatus`] and writes its result
//! through an out-pointer. On failure, [`cst_last_error_message`] describes
//! the error for the calling thread. Handles and strings returned by the
//! library must be released with the matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cstrigger::association::{Direction, Mode, SharedType};
use cstrigger::corpus::{corpus_stats, parse_corpus_with, Corpus, LanguagePair, TagMapping};
use cstrigger::switching::InsertionalPolicy;
use cstrigger::{
    build_contingency, evaluate_hypotheses, fisher_exact_two_sided, relative_switching_propensity,
    render_multitest_svg, run_grid, validate_corpus, ContingencyTable, GridResult, GridSpec,
    PlotStyle, TestSpec,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CstStatus {
    Ok = 0,
    ErrNull = 1,
    ErrUtf8 = 2,
    ErrParse = 3,
    ErrInvalidArg = 4,
    /// The requested value is not defined for this input (e.g. an RSP with an empty column).
    ErrUndefined = 5,
    ErrPanic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CstSharedType {
    SharedL1 = 0,
    SharedL2 = 1,
    SharedOther = 2,
    AllShared = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CstDirection {
    L1ToL2 = 0,
    L2ToL1 = 1,
    Both = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CstMode {
    Precede = 0,
    Neighbor = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CstPolicy {
    ExcludeReturn = 0,
    ExcludeReturnSkipNeutral = 1,
    KeepAll = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CstTable {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CstTestSpec {
    pub shared_type: CstSharedType,
    pub direction: CstDirection,
    pub mode: CstMode,
    pub distance: u32,
    pub policy: CstPolicy,
    pub skip_neutral_items: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CstCorpusCounts {
    pub utterances: u64,
    pub tokens: u64,
    pub switches: u64,
    pub shared_items: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CstCellResult {
    pub table: CstTable,
    /// NaN when `rsp_defined` is false.
    pub rsp: f64,
    pub rsp_defined: bool,
    pub p_value: f64,
    pub significant: bool,
}

/// Opaque parsed corpus.
pub struct CstCorpus(Corpus);

/// Opaque grid result.
pub struct CstGrid(GridResult);

impl From<CstSharedType> for SharedType {
    fn from(v: CstSharedType) -> Self {
        match v {
            CstSharedType::SharedL1 => SharedType::SharedL1,
            CstSharedType::SharedL2 => SharedType::SharedL2,
            CstSharedType::SharedOther => SharedType::SharedOther,
            CstSharedType::AllShared => SharedType::AllShared,
        }
    }
}

impl From<CstDirection> for Direction {
    fn from(v: CstDirection) -> Self {
        match v {
            CstDirection::L1ToL2 => Direction::L1ToL2,
            CstDirection::L2ToL1 => Direction::L2ToL1,
            CstDirection::Both => Direction::Both,
        }
    }
}

impl From<CstMode> for Mode {
    fn from(v: CstMode) -> Self {
        match v {
            CstMode::Precede => Mode::Precede,
            CstMode::Neighbor => Mode::Neighbor,
        }
    }
}

impl From<CstPolicy> for InsertionalPolicy {
    fn from(v: CstPolicy) -> Self {
        match v {
            CstPolicy::ExcludeReturn => InsertionalPolicy::ExcludeReturn,
            CstPolicy::ExcludeReturnSkipNeutral => InsertionalPolicy::ExcludeReturnSkipNeutral,
            CstPolicy::KeepAll => InsertionalPolicy::KeepAll,
        }
    }
}

impl From<ContingencyTable> for CstTable {
    fn from(t: ContingencyTable) -> Self {
        CstTable {
            a: t.a,
            b: t.b,
            c: t.c,
            d: t.d,
        }
    }
}

impl From<CstTable> for ContingencyTable {
    fn from(t: CstTable) -> Self {
        ContingencyTable::new(t.a, t.b, t.c, t.d)
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

type FfiResult<T> = Result<T, (CstStatus, String)>;

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> FfiResult<()>) -> CstStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            CstStatus::Ok
        }
        Ok(Err((status, message))) => {
            set_error(&message);
            status
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(&format!("internal error: {msg}"));
            CstStatus::ErrPanic
        }
    }
}

fn null(what: &str) -> (CstStatus, String) {
    (CstStatus::ErrNull, format!("{what} is null"))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> FfiResult<&'a T> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> FfiResult<&'a mut T> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| (CstStatus::ErrUtf8, format!("{what}: {e}")))
}

unsafe fn opt_str_arg<'a>(p: *const c_char, what: &str) -> FfiResult<Option<&'a str>> {
    if p.is_null() {
        Ok(None)
    } else {
        str_arg(p, what).map(Some)
    }
}

fn into_c_string(s: String) -> FfiResult<*mut c_char> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|e| (CstStatus::ErrInvalidArg, e.to_string()))
}

fn invalid(message: impl Into<String>) -> (CstStatus, String) {
    (CstStatus::ErrInvalidArg, message.into())
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn cst_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cst_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a corpus from canonical-format text.
///
/// `pair` (e.g. `"en-es"`) overrides the `# pair` header and may be null.
/// `mapping` holds `raw<TAB>tag` lines and may be null for canonical tags.
///
/// # Safety
/// String arguments must be null or valid NUL-terminated strings; `out` must
/// be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cst_corpus_parse(
    text: *const c_char,
    pair: *const c_char,
    mapping: *const c_char,
    out: *mut *mut CstCorpus,
) -> CstStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let text = str_arg(text, "text")?;
        let pair = opt_str_arg(pair, "pair")?
            .map(|p| p.parse::<LanguagePair>())
            .transpose()
            .map_err(|e| invalid(e.to_string()))?;
        let mapping = match opt_str_arg(mapping, "mapping")? {
            Some(m) => {
                TagMapping::read(m.as_bytes()).map_err(|e| (CstStatus::ErrParse, e.to_string()))?
            }
            None => TagMapping::identity(),
        };
        let corpus = parse_corpus_with(text.as_bytes(), pair.as_ref(), &mapping)
            .map_err(|e| (CstStatus::ErrParse, e.to_string()))?;
        *out = Box::into_raw(Box::new(CstCorpus(corpus)));
        Ok(())
    })
}

/// # Safety
/// `corpus` must be null or a handle from [`cst_corpus_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cst_corpus_free(corpus: *mut CstCorpus) {
    if !corpus.is_null() {
        drop(Box::from_raw(corpus));
    }
}

/// # Safety
/// `corpus` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cst_corpus_counts(
    corpus: *const CstCorpus,
    out: *mut CstCorpusCounts,
) -> CstStatus {
    guard(|| {
        let corpus = &ref_arg(corpus, "corpus")?.0;
        let out = out_arg(out, "out")?;
        let stats = corpus_stats(corpus);
        *out = CstCorpusCounts {
            utterances: stats.utterances,
            tokens: stats.tokens,
            switches: stats.cs_total,
            shared_items: stats.shared_items.total(),
        };
        Ok(())
    })
}

/// Writes the number of invariant violations (0 for a valid corpus).
///
/// # Safety
/// `corpus` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cst_corpus_validate(
    corpus: *const CstCorpus,
    out_violations: *mut u64,
) -> CstStatus {
    guard(|| {
        let corpus = &ref_arg(corpus, "corpus")?.0;
        let out = out_arg(out_violations, "out_violations")?;
        *out = validate_corpus(corpus).violations.len() as u64;
        Ok(())
    })
}

/// # Safety
/// `corpus` must be a live handle; `spec` and `out` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn cst_contingency(
    corpus: *const CstCorpus,
    spec: *const CstTestSpec,
    out: *mut CstTable,
) -> CstStatus {
    guard(|| {
        let corpus = &ref_arg(corpus, "corpus")?.0;
        let spec = *ref_arg(spec, "spec")?;
        let out = out_arg(out, "out")?;
        if spec.distance == 0 {
            return Err(invalid("distance must be at least 1"));
        }
        let mut test = TestSpec::new(
            spec.shared_type.into(),
            spec.direction.into(),
            spec.mode.into(),
            spec.distance,
        );
        test.insertional_policy = spec.policy.into();
        test.skip_neutral_items = spec.skip_neutral_items;
        *out = build_contingency(corpus, &test).into();
        Ok(())
    })
}

/// Two-sided Fisher exact p-value.
///
/// # Safety
/// `table` and `out_p` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn cst_fisher_exact(table: *const CstTable, out_p: *mut f64) -> CstStatus {
    guard(|| {
        let table = *ref_arg(table, "table")?;
        *out_arg(out_p, "out_p")? = fisher_exact_two_sided(&table.into());
        Ok(())
    })
}

/// Relative switching propensity; `CST_STATUS_ERR_UNDEFINED` when a rate is undefined or zero.
///
/// # Safety
/// `table` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn cst_rsp(table: *const CstTable, out: *mut f64) -> CstStatus {
    guard(|| {
        let table = *ref_arg(table, "table")?;
        let out = out_arg(out, "out")?;
        *out = f64::NAN;
        *out = relative_switching_propensity(&table.into())
            .map_err(|e| (CstStatus::ErrUndefined, e.to_string()))?;
        Ok(())
    })
}

/// Runs the full 3 × 2 × 6 grid for one shared type.
///
/// # Safety
/// `corpus` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cst_grid_run(
    corpus: *const CstCorpus,
    shared_type: CstSharedType,
    policy: CstPolicy,
    skip_neutral_items: bool,
    alpha: f64,
    out: *mut *mut CstGrid,
) -> CstStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let corpus = &ref_arg(corpus, "corpus")?.0;
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(invalid(format!("alpha {alpha} outside (0, 1)")));
        }
        let mut spec = GridSpec::new(
            corpus.source_label.clone(),
            corpus.pair.clone(),
            shared_type.into(),
        );
        spec.insertional_policy = policy.into();
        spec.skip_neutral_items = skip_neutral_items;
        spec.alpha = alpha;
        *out = Box::into_raw(Box::new(CstGrid(run_grid(corpus, &spec))));
        Ok(())
    })
}

/// Loads a grid previously serialized with [`cst_grid_to_json`].
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cst_grid_from_json(
    json: *const c_char,
    out: *mut *mut CstGrid,
) -> CstStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let json = str_arg(json, "json")?;
        let grid = GridResult::from_json(json).map_err(|e| (CstStatus::ErrParse, e.to_string()))?;
        *out = Box::into_raw(Box::new(CstGrid(grid)));
        Ok(())
    })
}

/// # Safety
/// `grid` must be null or a live grid handle.
#[no_mangle]
pub unsafe extern "C" fn cst_grid_free(grid: *mut CstGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// # Safety
/// `grid` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cst_grid_cell(
    grid: *const CstGrid,
    direction: CstDirection,
    mode: CstMode,
    distance: u32,
    out: *mut CstCellResult,
) -> CstStatus {
    guard(|| {
        let grid = &ref_arg(grid, "grid")?.0;
        let out = out_arg(out, "out")?;
        let cell = grid
            .cell(direction.into(), mode.into(), distance)
            .ok_or_else(|| invalid(format!("no cell at distance {distance}")))?;
        *out = CstCellResult {
            table: cell.result.table.into(),
            rsp: cell.result.rsp.unwrap_or(f64::NAN),
            rsp_defined: cell.result.rsp.is_some(),
            p_value: cell.result.p_value,
            significant: cell.significant,
        };
        Ok(())
    })
}

/// Serializes a grid; free the string with [`cst_string_free`].
///
/// # Safety
/// `grid` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cst_grid_to_json(
    grid: *const CstGrid,
    out: *mut *mut c_char,
) -> CstStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let grid = &ref_arg(grid, "grid")?.0;
        *out = into_c_string(grid.to_json())?;
        Ok(())
    })
}

/// Renders the grid as SVG; free the string with [`cst_string_free`].
///
/// # Safety
/// `grid` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cst_grid_render_svg(
    grid: *const CstGrid,
    log_y: bool,
    out: *mut *mut c_char,
) -> CstStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let grid = &ref_arg(grid, "grid")?.0;
        let style = PlotStyle {
            log_y,
            alpha: grid.spec.alpha,
            ..PlotStyle::default()
        };
        *out = into_c_string(render_multitest_svg(grid, &style))?;
        Ok(())
    })
}

/// Aggregate hypothesis report over `count` grids, as JSON.
///
/// # Safety
/// `grids` must point to `count` live grid handles and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cst_hypotheses_json(
    grids: *const *const CstGrid,
    count: usize,
    alpha: f64,
    out: *mut *mut c_char,
) -> CstStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        if grids.is_null() && count > 0 {
            return Err(null("grids"));
        }
        let handles = if count == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(grids, count)
        };
        let mut owned = Vec::with_capacity(count);
        for (i, &g) in handles.iter().enumerate() {
            owned.push(ref_arg(g, &format!("grids[{i}]"))?.0.clone());
        }
        *out = into_c_string(evaluate_hypotheses(&owned, alpha).to_json())?;
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cst_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
