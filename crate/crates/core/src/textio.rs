//! Helpers shared by the line-oriented text formats.
//!
//! All formats in this crate serialize floats with Rust's shortest
//! round-trip representation, so `serialize -> parse -> serialize` is the
//! identity on bytes. Parsers report errors as `path:line: message`.

use std::fs;
use std::io;
use std::path::Path;

use crate::error::{Error, Result};

/// Format a float with the shortest representation that parses back to the
/// same value. All file formats use this.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

/// Join floats with single spaces using [`fmt_f64`].
pub fn fmt_f64_row(values: &[f64]) -> String {
    let mut out = String::new();
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(&fmt_f64(*v));
    }
    out
}

/// Parse a finite float, rejecting NaN and infinities.
pub fn parse_f64(token: &str, path: &str, line: usize) -> Result<f64> {
    let v: f64 = token
        .parse()
        .map_err(|_| Error::format(path, line, format!("invalid number {token:?}")))?;
    if !v.is_finite() {
        return Err(Error::format(
            path,
            line,
            format!("non-finite number {token:?}"),
        ));
    }
    Ok(v)
}

/// Parse an unsigned integer.
pub fn parse_usize(token: &str, path: &str, line: usize) -> Result<usize> {
    token
        .parse()
        .map_err(|_| Error::format(path, line, format!("invalid integer {token:?}")))
}

/// Parse a u64 (used for seeds).
pub fn parse_u64(token: &str, path: &str, line: usize) -> Result<u64> {
    token
        .parse()
        .map_err(|_| Error::format(path, line, format!("invalid seed {token:?}")))
}

/// Iterate the lines of a document with 1-based line numbers, skipping a
/// trailing empty line so that files with and without a final newline parse
/// identically.
pub fn numbered_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l))
}

/// Write `content` to `path` atomically: the bytes land in a temporary file
/// in the same directory which is then renamed over the target, so a reader
/// never observes a half-written file.
pub fn atomic_write(path: &Path, content: &str) -> io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let file_name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "path has no file name"))?;
    let mut tmp = path.to_path_buf();
    tmp.set_file_name(format!(".{}.tmp", file_name.to_string_lossy()));
    fs::write(&tmp, content)?;
    match fs::rename(&tmp, path) {
        Ok(()) => Ok(()),
        Err(e) => {
            let _ = fs::remove_file(&tmp);
            Err(e)
        }
    }?;
    // Make the visible path independent of whether `dir` existed before.
    let _ = dir;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fmt_round_trips_simple_values() {
        for v in [0.0, -0.0, 1.0, 0.15, 10.77, 768.4, -6.9897000433601875] {
            let s = fmt_f64(v);
            let back: f64 = s.parse().unwrap();
            assert_eq!(v.to_bits(), back.to_bits(), "{s}");
        }
    }

    #[test]
    fn parse_rejects_non_finite() {
        assert!(parse_f64("NaN", "t", 1).is_err());
        assert!(parse_f64("inf", "t", 1).is_err());
        assert!(parse_f64("1e999", "t", 1).is_err());
        assert!(parse_f64("abc", "t", 1).is_err());
    }

    #[test]
    fn numbered_lines_ignores_trailing_newline() {
        let with: Vec<_> = numbered_lines("a\nb\n").collect();
        let without: Vec<_> = numbered_lines("a\nb").collect();
        assert_eq!(with, without);
        assert_eq!(with, vec![(1, "a"), (2, "b")]);
    }

    #[test]
    fn atomic_write_replaces_existing_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.txt");
        atomic_write(&path, "first").unwrap();
        atomic_write(&path, "second").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "second");
        // No stray temporaries left behind.
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    proptest! {
        #[test]
        fn fmt_round_trips_any_finite(v in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            let s = fmt_f64(v);
            let back: f64 = s.parse().unwrap();
            prop_assert_eq!(v.to_bits(), back.to_bits());
        }
    }
}
