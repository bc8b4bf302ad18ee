//! Deterministic number formatting and atomic file output.

use std::io::Write;
use std::path::Path;

use crate::error::Result;

/// Formats `x` with 9 significant digits (like C's `%.9g`), trimming
/// trailing zeros so identical values always print identically.
pub fn fmt9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        trim_fraction(&s)
    } else {
        let s = format!("{x:.8e}");
        let (mantissa, e) = s.split_once('e').expect("scientific format");
        format!("{}e{e}", trim_fraction(mantissa))
    }
}

fn trim_fraction(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// Writes `contents` to a temporary file beside `path` and renames it
/// into place.
pub fn write_atomic(path: impl AsRef<Path>, contents: &str) -> Result<()> {
    let path = path.as_ref();
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
