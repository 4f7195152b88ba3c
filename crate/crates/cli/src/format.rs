//! Number and table formatting.
//!
//! Data output (CSV, JSON) uses the shortest decimal that parses back to
//! the same `f64`; human tables use six significant digits.

use qspectra::{ComplexMatrix, C64};

/// Shortest round-trip representation.
pub fn data(x: f64) -> String {
    format!("{x:?}")
}

/// `%.6g`-style: six significant digits, trailing zeros trimmed.
pub fn g6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..6).contains(&exp) {
        let s = format!("{x:.5e}");
        let (mantissa, e) = s.split_once('e').expect("exponent form");
        return format!("{}e{e}", trim(mantissa));
    }
    let decimals = (5 - exp).max(0) as usize;
    let s = trim(&format!("{x:.decimals$}"));
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

fn trim(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

pub fn complex_g6(z: C64) -> String {
    if z.im == 0.0 {
        g6(z.re)
    } else if z.im < 0.0 {
        format!("{}-{}i", g6(z.re), g6(-z.im))
    } else {
        format!("{}+{}i", g6(z.re), g6(z.im))
    }
}

/// Right-aligned columns separated by two spaces.
pub fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let parts: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{}{c}", " ".repeat(w - c.chars().count())))
            .collect();
        parts.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(headers.to_vec());
    for row in rows {
        out += &line(row.iter().map(String::as_str).collect());
    }
    out
}

pub fn csv(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = headers.join(",") + "\n";
    for row in rows {
        out += &row.join(",");
        out.push('\n');
    }
    out
}

pub fn matrix_table(m: &ComplexMatrix) -> String {
    let rows: Vec<Vec<String>> = (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| complex_g6(m[(i, j)])).collect()).collect();
    let headers: Vec<String> = (0..m.ncols()).map(|j| j.to_string()).collect();
    table(&headers.iter().map(String::as_str).collect::<Vec<_>>(), &rows)
}

pub fn matrix_csv(m: &ComplexMatrix) -> String {
    let rows: Vec<Vec<String>> = (0..m.nrows())
        .flat_map(|i| (0..m.ncols()).map(move |j| (i, j)))
        .map(|(i, j)| vec![i.to_string(), j.to_string(), data(m[(i, j)].re), data(m[(i, j)].im)])
        .collect();
    csv(&["row", "col", "re", "im"], &rows)
}

pub fn matrix_json(m: &ComplexMatrix) -> serde_json::Value {
    serde_json::Value::Array(
        (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| serde_json::json!([m[(i, j)].re, m[(i, j)].im])).collect())
            .collect(),
    )
}

pub fn json(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}
