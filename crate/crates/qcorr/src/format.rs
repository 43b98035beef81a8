//! Text formats: state files, complex literals, rounded JSON and scan CSV.

use std::io::Write;
use std::path::Path;

use qcorr_core::cluster::ScanRow;
use qcorr_core::measures::{Pair, Triple};
use qcorr_core::{make_pure, PureState, C64};
use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, Result};

/// Significant digits kept in JSON and CSV output.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Parses a state file: one `<bitstring> <re> <im>` entry per line, `#`
/// starts a comment. The state is normalized on load.
pub fn parse_state(text: &str, path: &Path) -> Result<PureState> {
    let err = |line: usize, message: String| CliError::StateFile {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut entries: Vec<(String, C64)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [bits, re, im] = fields[..] else {
            return Err(err(i + 1, format!("expected `<bitstring> <re> <im>`, got {line:?}")));
        };
        let num = |s: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| err(i + 1, format!("invalid number {s:?}")))
        };
        entries.push((bits.to_string(), C64::new(num(re)?, num(im)?)));
    }
    let Some((first, _)) = entries.first() else {
        return Err(err(0, "no basis entries".into()));
    };
    let n = first.len();
    let refs: Vec<(&str, C64)> = entries.iter().map(|(b, c)| (b.as_str(), *c)).collect();
    Ok(make_pure(n, &refs)?.0)
}

pub fn read_state(path: &Path) -> Result<PureState> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_state(&text, path)
}

/// Parses `re`, `imj`, `re+imj` or `re-imj`.
pub fn parse_complex(s: &str) -> Result<C64> {
    let t = s.trim();
    let bad = || CliError::Complex(s.to_string());
    let real = |x: &str| -> Result<f64> {
        x.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(bad)
    };
    let Some(body) = t.strip_suffix('j') else {
        return Ok(C64::new(real(t)?, 0.0));
    };
    // split at the last sign that is neither leading nor part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => Ok(C64::new(real(&body[..k])?, imag_part(&body[k..]).ok_or_else(bad)?)),
        None => Ok(C64::new(0.0, imag_part(body).ok_or_else(bad)?)),
    }
}

fn imag_part(s: &str) -> Option<f64> {
    match s {
        "" | "+" => Some(1.0),
        "-" => Some(-1.0),
        _ => s.parse::<f64>().ok().filter(|v| v.is_finite()),
    }
}

/// Comma-separated complex literals.
pub fn parse_coefficients(s: &str) -> Result<Vec<C64>> {
    s.split(',').map(parse_complex).collect()
}

pub fn format_complex(z: C64) -> String {
    if z.im == 0.0 {
        format_number(z.re)
    } else {
        let im = format_number(z.im);
        let sign = if im.starts_with('-') { "" } else { "+" };
        format!("{}{sign}{im}j", format_number(z.re))
    }
}

/// Rounds to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_significant(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .unwrap_or(x)
}

/// Shortest form of the rounded value; exponent notation outside `[1e-5, 1e15)`.
pub fn format_number(x: f64) -> String {
    let r = round_significant(x);
    if r.is_nan() {
        "NaN".to_string()
    } else if r == 0.0 {
        "0".to_string()
    } else if r.is_finite() && !(1e-5..1e15).contains(&r.abs()) {
        format!("{r:e}")
    } else {
        r.to_string()
    }
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if let Some(x) = n.as_f64().filter(|_| n.is_f64()) {
                if let Some(r) = serde_json::Number::from_f64(round_significant(x)) {
                    *n = r;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Pretty JSON with every float rounded to 12 significant digits.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_value(&mut v);
    Ok(serde_json::to_string_pretty(&v)?)
}

/// Writes scan rows as CSV with a header row.
pub fn write_scan_csv<W: Write>(out: W, family: &str, rows: &[ScanRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "family", "a", "b", "c", "d", "e_ms", "tau4", "tau3_abd", "tau3_bcd", "tau2_ab", "tau2_ac",
        "tau2_cd",
    ])?;
    for row in rows {
        let r = &row.record;
        let mut rec = vec![family.to_string()];
        rec.extend(row.coefficients.iter().map(|&z| format_complex(z)));
        rec.extend(
            [
                r.e_ms,
                r.tau4,
                r.tau3(Triple::ABD),
                r.tau3(Triple::BCD),
                r.tau2(Pair::AB),
                r.tau2(Pair::AC),
                r.tau2(Pair::CD),
            ]
            .map(format_number),
        );
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
