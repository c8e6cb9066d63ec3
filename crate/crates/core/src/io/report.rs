//! CSV tables (the canonical output) and SVG line plots of the same data.
//!
//! Every table starts with `#` comment lines, the first of which records the
//! master seed, followed by a header row.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use plotters::prelude::*;

use crate::designs::Design;
use crate::optimizer::{FitnessCurve, ParetoPoint, SensitivityReport};

use super::analyze::AnalysisRow;
use super::IoError;

pub const CURVE_COLUMNS: [&str; 8] = ["tau", "fitness", "k", "p", "R", "W", "avg_degree", "ci"];
pub const PARETO_COLUMNS: [&str; 5] = ["R", "W", "design", "k", "p"];
pub const SENSITIVITY_COLUMNS: [&str; 11] =
    ["design", "tau", "r", "max_fitness", "selected", "std_k", "std_p", "std_R", "std_W", "singleton", "threshold"];
pub const ANALYSIS_COLUMNS: [&str; 13] = [
    "tau",
    "R",
    "R_ci",
    "W",
    "F",
    "F_ci",
    "R_weighted",
    "R_weighted_ci",
    "W_weighted",
    "F_weighted",
    "F_weighted_ci",
    "F_gap",
    "W_gap",
];

/// A header plus string cells, ready to be written as CSV.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub comments: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { comments: Vec::new(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn comment(mut self, line: impl Into<String>) -> Self {
        self.comments.push(line.into());
        self
    }

    /// Column index by header name.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

/// Optimal configuration per τ: `tau,fitness,k,p,R,W,avg_degree,ci`.
pub fn curve_table(curve: &FitnessCurve) -> Table {
    let mut t = Table::new(&CURVE_COLUMNS)
        .comment(format!("design={} r={}", curve.design, curve.r))
        .comment(format!("cv_flagged_taus={}", curve.points.iter().filter(|p| p.high_cv).count()));
    for p in &curve.points {
        t.rows.push(vec![
            num(p.tau),
            num(p.fitness),
            opt(p.k),
            opt(p.p),
            num(p.r_mean),
            num(p.w_mean),
            num(p.avg_degree),
            num(p.ci),
        ]);
    }
    t
}

/// Frontier points: `R,W,design,k,p`.
pub fn pareto_table(points: &[ParetoPoint]) -> Table {
    let mut t = Table::new(&PARETO_COLUMNS);
    for p in points {
        t.rows.push(vec![num(p.r), num(p.w), p.config.design.to_string(), opt(p.config.k), opt(p.config.p)]);
    }
    t
}

pub fn sensitivity_table(rows: &[(Design, f64, SensitivityReport)]) -> Table {
    let mut t = Table::new(&SENSITIVITY_COLUMNS);
    for (design, tau, s) in rows {
        t.rows.push(vec![
            design.to_string(),
            num(*tau),
            num(s.r),
            num(s.max_fitness),
            s.selected.to_string(),
            opt(s.std_k),
            opt(s.std_p),
            num(s.std_r),
            num(s.std_w),
            s.singleton.to_string(),
            num(s.threshold),
        ]);
    }
    t
}

/// Per-τ binary and weighted metrics with their gaps.
pub fn analysis_table(rows: &[AnalysisRow]) -> Table {
    let mut t = Table::new(&ANALYSIS_COLUMNS);
    for row in rows {
        let b = row.binary;
        let w = row.weighted;
        t.rows.push(vec![
            num(row.tau),
            num(b.r),
            num(b.r_ci),
            num(b.w),
            num(b.fitness),
            num(b.fitness_ci),
            opt(w.map(|w| w.r)),
            opt(w.map(|w| w.r_ci)),
            opt(w.map(|w| w.w)),
            opt(w.map(|w| w.fitness)),
            opt(w.map(|w| w.fitness_ci)),
            opt(row.fitness_gap()),
            opt(row.efficiency_gap()),
        ]);
    }
    t
}

/// Write `table` to `path` with the master seed as the first comment.
/// Refuses to create a file for an empty table.
pub fn emit_csv(path: &Path, seed: u64, table: &Table) -> Result<(), IoError> {
    if table.rows.is_empty() {
        return Err(IoError::EmptyResults);
    }
    let file = File::create(path).map_err(|e| IoError::Io(format!("{}: {e}", path.display())))?;
    let mut out = BufWriter::new(file);
    let io = |e: std::io::Error| IoError::Io(e.to_string());
    writeln!(out, "# seed={seed}").map_err(io)?;
    for c in &table.comments {
        writeln!(out, "# {c}").map_err(io)?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&table.header).map_err(|e| IoError::Csv(e.to_string()))?;
    for row in &table.rows {
        w.write_record(row).map_err(|e| IoError::Csv(e.to_string()))?;
    }
    w.flush().map_err(io)?;
    Ok(())
}

/// Read a table written by [`emit_csv`].
pub fn read_csv(path: &Path) -> Result<Table, IoError> {
    let text = std::fs::read_to_string(path).map_err(|e| IoError::Io(format!("{}: {e}", path.display())))?;
    let comments =
        text.lines().take_while(|l| l.starts_with('#')).map(|l| l.trim_start_matches('#').trim().to_string()).collect();
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| IoError::Csv(e.to_string()))?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in reader.records() {
        rows.push(rec.map_err(|e| IoError::Csv(e.to_string()))?.iter().map(String::from).collect());
    }
    Ok(Table { comments, header, rows })
}

/// The seed recorded in a table's leading comment.
pub fn recorded_seed(table: &Table) -> Option<u64> {
    table.comments.first()?.strip_prefix("seed=")?.parse().ok()
}

/// Line plot of several series against a shared x axis, as SVG.
pub fn emit_plot(path: &Path, title: &str, xs: &[f64], series: &[(&str, Vec<f64>)]) -> Result<(), IoError> {
    if xs.is_empty() || series.is_empty() {
        return Err(IoError::EmptyResults);
    }
    let plot_err = |e: String| IoError::Plot(e);
    let root = SVGBackend::new(path, (720, 480)).into_drawing_area();
    root.fill(&WHITE).map_err(|e| plot_err(e.to_string()))?;
    let x_lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let x_hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let y_hi = series.iter().flat_map(|(_, ys)| ys.iter().copied()).fold(1.0, f64::max);
    let x_hi = if x_hi > x_lo { x_hi } else { x_lo + 1.0 };
    let mut chart = ChartBuilder::on(&root)
        .caption(title, ("sans-serif", 20))
        .margin(12)
        .x_label_area_size(36)
        .y_label_area_size(48)
        .build_cartesian_2d(x_lo..x_hi, 0.0..y_hi * 1.05)
        .map_err(|e| plot_err(e.to_string()))?;
    chart.configure_mesh().x_desc("tau").draw().map_err(|e| plot_err(e.to_string()))?;
    for (i, (name, ys)) in series.iter().enumerate() {
        let color = Palette99::pick(i).to_rgba();
        chart
            .draw_series(LineSeries::new(xs.iter().copied().zip(ys.iter().copied()), color.stroke_width(2)))
            .map_err(|e| plot_err(e.to_string()))?
            .label(*name)
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 16, y)], color));
    }
    chart
        .configure_series_labels()
        .border_style(BLACK)
        .background_style(WHITE.mix(0.8))
        .draw()
        .map_err(|e| plot_err(e.to_string()))?;
    root.present().map_err(|e| plot_err(e.to_string()))?;
    Ok(())
}

/// Fitness, R and W of a curve against τ.
pub fn emit_curve_plot(path: &Path, curve: &FitnessCurve) -> Result<(), IoError> {
    let xs: Vec<f64> = curve.points.iter().map(|p| p.tau).collect();
    let series = [
        ("fitness", curve.points.iter().map(|p| p.fitness).collect()),
        ("R", curve.points.iter().map(|p| p.r_mean).collect()),
        ("W", curve.points.iter().map(|p| p.w_mean).collect()),
    ];
    emit_plot(path, &format!("{} (r = {})", curve.design, curve.r), &xs, &series)
}
