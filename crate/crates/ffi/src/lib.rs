//! C-compatible surface over dicenote.
//!
//! Every entry point takes NUL-terminated UTF-8 and returns a heap-allocated,
//! NUL-terminated JSON document that the caller releases with
//! [`dicenote_free`]. The document is either a roll report or
//! `{"error": {"code", "message", "span"}}`, identical to the CLI's
//! `--format json` output. Errors, including panics, never cross the
//! boundary as anything other than such a document.
//!
//! The header is `include/dicenote.h`.

use std::collections::BTreeMap;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dicenote::grammar::Statement;
use dicenote::report::{error_json, outcome_json};
use dicenote::{parse_str, RandomSource, SeededSource, Session};
use serde_json::{json, Value as Json};

/// Boundary failures that are not roll errors.
pub mod codes {
    pub const NULL_ARGUMENT: &str = "NULL_ARGUMENT";
    pub const INVALID_UTF8: &str = "INVALID_UTF8";
    pub const INVALID_MACROS: &str = "INVALID_MACROS";
    pub const INTERNAL_PANIC: &str = "INTERNAL_PANIC";
}

static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");

fn boundary_error(code: &str, message: impl Into<String>) -> Json {
    json!({ "error": { "code": code, "message": message.into(), "span": null } })
}

fn is_macro_name(name: &str) -> bool {
    let mut chars = name.chars();
    chars.next().is_some_and(|c| c.is_ascii_uppercase())
        && chars.all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || c == '_')
}

/// Adds `name -> expression` definitions to `session`.
fn define_macros(session: &mut Session, macros: &BTreeMap<String, String>) -> Result<(), Json> {
    for (name, source) in macros {
        if !is_macro_name(name) {
            return Err(boundary_error(
                codes::INVALID_MACROS,
                format!("{name:?} is not an upper-case macro name"),
            ));
        }
        let parsed = parse_str(source).map_err(|e| error_json(&e))?;
        let body = match <[Statement; 1]>::try_from(parsed.statements) {
            Ok([Statement::Expr(body)]) => body,
            _ => {
                return Err(boundary_error(
                    codes::INVALID_MACROS,
                    format!("macro {name} must be a single expression"),
                ))
            }
        };
        session.macros.define(name.clone(), body);
    }
    Ok(())
}

fn parse_macros(text: &str) -> Result<BTreeMap<String, String>, Json> {
    serde_json::from_str(text).map_err(|e| {
        boundary_error(
            codes::INVALID_MACROS,
            format!("macros must be a JSON object of name to expression strings: {e}"),
        )
    })
}

/// Rolls `expression` in a fresh session with the built-in macros plus
/// `macros`, drawing from `rng`.
pub fn roll_value_with(
    expression: &str,
    macros: &BTreeMap<String, String>,
    rng: &mut dyn RandomSource,
) -> Json {
    let mut session = Session::new();
    if let Err(doc) = define_macros(&mut session, macros) {
        return doc;
    }
    outcome_json(&session.roll(expression, rng))
}

/// Safe counterpart of [`dicenote_roll`]: same semantics, same document.
pub fn roll_value(expression: &str, seed: Option<u64>, macros: &BTreeMap<String, String>) -> Json {
    let mut rng = match seed {
        Some(s) => SeededSource::new(s),
        None => SeededSource::from_entropy(),
    };
    roll_value_with(expression, macros, &mut rng)
}

pub fn roll_json(expression: &str, seed: Option<u64>, macros: &BTreeMap<String, String>) -> String {
    roll_value(expression, seed, macros).to_string()
}

/// Reads an optional C string. `Ok(None)` for null.
///
/// # Safety
/// `p` is null or points to a NUL-terminated buffer.
unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<Option<&'a str>, Json> {
    if p.is_null() {
        return Ok(None);
    }
    CStr::from_ptr(p)
        .to_str()
        .map(Some)
        .map_err(|e| boundary_error(codes::INVALID_UTF8, format!("{what} is not UTF-8: {e}")))
}

fn into_c(doc: Json) -> *mut c_char {
    // serde_json escapes NUL, so this cannot fail
    CString::new(doc.to_string())
        .map(CString::into_raw)
        .unwrap_or(ptr::null_mut())
}

fn guarded(f: impl FnOnce() -> Json) -> *mut c_char {
    let doc = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|payload| {
        let message = payload
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| payload.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "unknown panic".into());
        boundary_error(codes::INTERNAL_PANIC, message)
    });
    into_c(doc)
}

/// Rolls `expression` and returns a JSON document.
///
/// `seed` is used when `use_seed` is non-zero; otherwise the roll is seeded
/// from system entropy. `macros_json` may be null, or a JSON object mapping
/// upper-case names to expression strings.
///
/// # Safety
/// `expression` and `macros_json` are null or NUL-terminated. The result must
/// be released with [`dicenote_free`].
#[no_mangle]
pub unsafe extern "C" fn dicenote_roll(
    expression: *const c_char,
    seed: u64,
    use_seed: c_int,
    macros_json: *const c_char,
) -> *mut c_char {
    guarded(|| {
        let expression = match read_str(expression, "expression") {
            Ok(Some(s)) => s,
            Ok(None) => return boundary_error(codes::NULL_ARGUMENT, "expression is null"),
            Err(doc) => return doc,
        };
        let macros = match read_str(macros_json, "macros") {
            Ok(None) => BTreeMap::new(),
            Ok(Some(text)) => match parse_macros(text) {
                Ok(m) => m,
                Err(doc) => return doc,
            },
            Err(doc) => return doc,
        };
        roll_value(expression, (use_seed != 0).then_some(seed), &macros)
    })
}

/// Releases a document returned by this library. Null is ignored.
///
/// # Safety
/// `document` is null or was returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dicenote_free(document: *mut c_char) {
    if !document.is_null() {
        drop(CString::from_raw(document));
    }
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn dicenote_version() -> *const c_char {
    VERSION.as_ptr().cast()
}

/// A session keeps its macro table and random stream across rolls.
pub struct DicenoteSession {
    session: Session,
    rng: SeededSource,
}

impl DicenoteSession {
    pub fn new(seed: Option<u64>) -> Self {
        DicenoteSession {
            session: Session::new(),
            rng: seed.map_or_else(SeededSource::from_entropy, SeededSource::new),
        }
    }

    pub fn roll_value(&mut self, expression: &str) -> Json {
        outcome_json(&self.session.roll(expression, &mut self.rng))
    }
}

/// Creates a session. Release it with [`dicenote_session_free`].
#[no_mangle]
pub extern "C" fn dicenote_session_new(seed: u64, use_seed: c_int) -> *mut DicenoteSession {
    catch_unwind(|| Box::into_raw(Box::new(DicenoteSession::new((use_seed != 0).then_some(seed)))))
        .unwrap_or(ptr::null_mut())
}

/// Rolls within `session`; `#NAME = ...` definitions persist for later calls.
///
/// # Safety
/// `session` is null or a live pointer from [`dicenote_session_new`], not
/// used from another thread during the call. `expression` is null or
/// NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn dicenote_session_roll(
    session: *mut DicenoteSession,
    expression: *const c_char,
) -> *mut c_char {
    guarded(|| {
        let Some(session) = session.as_mut() else {
            return boundary_error(codes::NULL_ARGUMENT, "session is null");
        };
        match read_str(expression, "expression") {
            Ok(Some(s)) => session.roll_value(s),
            Ok(None) => boundary_error(codes::NULL_ARGUMENT, "expression is null"),
            Err(doc) => doc,
        }
    })
}

/// # Safety
/// `session` is null or a live pointer from [`dicenote_session_new`].
#[no_mangle]
pub unsafe extern "C" fn dicenote_session_free(session: *mut DicenoteSession) {
    if !session.is_null() {
        drop(Box::from_raw(session));
    }
}
