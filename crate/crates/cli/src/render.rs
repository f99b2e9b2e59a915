//! Text and CSV rendering for reports, series and matrices.

use std::io::Write;

use anyhow::Result;
use vgc_core::predictor::{LimitCell, PredictorTables};
use vgc_core::{CometFilter, CometSeries, ExceptionReport, ScanKey};

/// Scientific notation with `sig` significant figures and a signed,
/// zero-padded two-digit exponent: `524288 -> "5.2E+05"`.
pub fn fmt_sci(v: f64, sig: usize) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let raw = format!("{:.*E}", sig.saturating_sub(1), v);
    let (mantissa, exp) = raw.split_once('E').expect("std always emits an exponent");
    let exp: i32 = exp.parse().expect("std emits a valid exponent");
    format!("{mantissa}E{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
}

/// Small integral values print exactly; everything else in 2-figure
/// scientific notation, matching the conventional matrix displays.
pub fn fmt_threshold(v: f64) -> String {
    if v < 1e4 && v.fract() == 0.0 {
        format!("{}", v as u64)
    } else {
        fmt_sci(v, 2)
    }
}

fn fmt_envelope_value(v: f64) -> String {
    if v < 1e4 {
        format!("{v:.2}")
    } else {
        fmt_sci(v, 3)
    }
}

fn fmt_limit_cell(cell: &LimitCell) -> String {
    match cell {
        LimitCell::Known(l) => l.to_string(),
        LimitCell::Estimated(v) => fmt_sci(*v, 2),
    }
}

/// Which predictor matrices to show.
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    X1,
    X2,
    H,
    Fy,
    G,
    Estimates,
}

impl MatrixKind {
    pub fn title(self) -> &'static str {
        match self {
            MatrixKind::X1 => "X1",
            MatrixKind::X2 => "X2",
            MatrixKind::H => "H",
            MatrixKind::Fy => "FY",
            MatrixKind::G => "G",
            MatrixKind::Estimates => "L-EST",
        }
    }

    fn cell(self, t: &PredictorTables, a: usize, b: usize) -> String {
        match self {
            MatrixKind::X1 => fmt_threshold(t.x1[a][b]),
            MatrixKind::X2 => fmt_threshold(t.x2[a][b]),
            MatrixKind::H => t.h[a][b].to_string(),
            MatrixKind::Fy => fmt_envelope_value(t.fy[a][b]),
            MatrixKind::G => t.g[a][b].map_or("?".to_string(), |v| format!("{v:.2}")),
            MatrixKind::Estimates => fmt_limit_cell(&t.l_est[a][b]),
        }
    }
}

/// Aligned text grid for one matrix, rows indexed by b and columns by a.
pub fn render_matrix_text(w: &mut dyn Write, t: &PredictorTables, kind: MatrixKind) -> Result<()> {
    let mut grid: Vec<Vec<String>> = Vec::with_capacity(t.dim + 1);
    let mut header = vec![kind.title().to_string()];
    header.extend((0..t.dim).map(|a| format!("a={a}")));
    grid.push(header);
    for b in 0..t.dim {
        let mut row = vec![format!("b={b}")];
        row.extend((0..t.dim).map(|a| kind.cell(t, a, b)));
        grid.push(row);
    }
    let widths: Vec<usize> = (0..=t.dim)
        .map(|col| grid.iter().map(|row| row[col].len()).max().unwrap_or(0))
        .collect();
    for row in &grid {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(cell, w)| format!("{cell:>w$}"))
            .collect();
        writeln!(w, "{}", line.join("  "))?;
    }
    Ok(())
}

/// CSV rows `matrix,a,b,value` for one matrix.
pub fn render_matrix_csv(w: &mut dyn Write, t: &PredictorTables, kind: MatrixKind) -> Result<()> {
    for b in 0..t.dim {
        for a in 0..t.dim {
            writeln!(w, "{},{a},{b},{}", kind.title(), kind.cell(t, a, b))?;
        }
    }
    Ok(())
}

pub fn scan_key_label(key: &ScanKey) -> String {
    match key {
        ScanKey::Orders { a, b } => format!("order pair ({a},{b})"),
        ScanKey::Variant(kind) => format!("variant {kind}"),
    }
}

/// Human-readable scan report. Short exception lists print in full, long
/// ones are elided (emit-seq is the bulk emitter).
pub fn render_report_text(w: &mut dyn Write, r: &ExceptionReport) -> Result<()> {
    writeln!(w, "scan of {}", scan_key_label(&r.key))?;
    writeln!(w, "scanned to 2n = {}", r.scanned_to)?;
    writeln!(w, "exceptions: {}", r.exceptions.len())?;
    if r.exceptions.len() <= 100 {
        let list: Vec<String> = r.exceptions.iter().map(u64::to_string).collect();
        writeln!(w, "exception list: {}", list.join(" "))?;
    } else {
        let head: Vec<String> = r.exceptions[..5].iter().map(u64::to_string).collect();
        let tail: Vec<String> = r.exceptions[r.exceptions.len() - 5..]
            .iter()
            .map(u64::to_string)
            .collect();
        writeln!(w, "exception list: {} ... {}", head.join(" "), tail.join(" "))?;
    }
    writeln!(
        w,
        "candidate L = {} (verified up to n = {})",
        r.candidate_limit(),
        r.scanned_to / 2
    )?;
    Ok(())
}

pub fn render_report_csv(w: &mut dyn Write, r: &ExceptionReport) -> Result<()> {
    writeln!(w, "index,two_n")?;
    for (i, e) in r.exceptions.iter().enumerate() {
        writeln!(w, "{},{e}", i + 1)?;
    }
    Ok(())
}

pub fn report_json(r: &ExceptionReport) -> serde_json::Value {
    let mut obj = serde_json::json!({
        "scanned_to": r.scanned_to,
        "candidate_L": r.candidate_limit(),
        "exception_count": r.exceptions.len(),
        "exceptions": r.exceptions,
        "complete": r.complete,
    });
    match r.key {
        ScanKey::Orders { a, b } => {
            obj["a"] = a.into();
            obj["b"] = b.into();
        }
        ScanKey::Variant(kind) => {
            obj["variant"] = kind.name().into();
        }
    }
    obj
}

fn filter_label(f: CometFilter) -> &'static str {
    match f {
        CometFilter::None => "none",
        CometFilter::GkrcWindow => "gkrc_window",
    }
}

/// RFC-4180-style CSV with a header row and LF endings.
pub fn render_series_csv(w: &mut dyn Write, s: &CometSeries) -> Result<()> {
    writeln!(w, "n,value,order_a,order_b,filter")?;
    let (a, b) = s.order_pair;
    for &(n, v) in &s.points {
        writeln!(w, "{n},{v},{a},{b},{}", filter_label(s.filter))?;
    }
    Ok(())
}

pub fn render_series_text(w: &mut dyn Write, s: &CometSeries) -> Result<()> {
    let (a, b) = s.order_pair;
    writeln!(
        w,
        "series for ({a},{b}), filter {}",
        filter_label(s.filter)
    )?;
    for &(n, v) in &s.points {
        writeln!(w, "{n:>10}  {v}")?;
    }
    Ok(())
}

pub fn series_json(s: &CometSeries) -> serde_json::Value {
    serde_json::json!({
        "order_a": s.order_pair.0,
        "order_b": s.order_pair.1,
        "filter": filter_label(s.filter),
        "points": s.points,
    })
}
