//! Number formatting for CSV output.

use std::io::{self, Write};

/// `printf("%.17g")`: 17 significant digits, trailing zeros trimmed,
/// scientific notation outside `1e-5 <= |x| < 1e17`.
pub fn g17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-5..17).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (16 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Writes a two-column CSV; `None` values become empty cells.
pub fn write_csv<W: Write>(
    mut out: W,
    header: [&str; 2],
    rows: &[(f64, Option<f64>)],
) -> io::Result<()> {
    writeln!(out, "{},{}", header[0], header[1])?;
    for (x, y) in rows {
        match y {
            Some(y) => writeln!(out, "{},{}", g17(*x), g17(*y))?,
            None => writeln!(out, "{},", g17(*x))?,
        }
    }
    out.flush()
}
