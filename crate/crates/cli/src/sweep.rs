//! Parameter sweeps over `(F, H̲₋)`: per-wave classification on a worker
//! pool, boundary curves, and the diagram files.

use crate::config::{Format, SweepConfig};
use crate::error::{io_err, CliError, Result};
use crate::output::{write_csv, write_csv_with_header, write_json};
use crate::svg::{Mark, Panel, Series, PALETTE};
use rayon::prelude::*;
use rollwave::lowfreq::{boundary_i, boundary_ii};
use rollwave::profile::{h_hom, validate_params, z_plus};
use rollwave::spectrum::{classify_stability, locate_midfreq_boundary, ClassifyOptions};
use rollwave::{Wave, WaveParameters};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::time::Instant;

/// One swept wave, in rescaled coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagramRow {
    #[serde(rename = "F")]
    pub froude: f64,
    #[serde(rename = "Hminus_over_Hs")]
    pub hminus: f64,
    #[serde(rename = "Hplus_over_Hs")]
    pub hplus: f64,
    #[serde(rename = "X_over_Hs")]
    pub period: f64,
    pub verdict: String,
    pub alpha: f64,
    pub beta: f64,
    pub index: f64,
    pub max_winding: Option<i64>,
    pub wall_time_ms: Option<f64>,
}

pub const DIAGRAM_HEADER: [&str; 10] =
    ["F", "Hminus_over_Hs", "Hplus_over_Hs", "X_over_Hs", "verdict", "alpha", "beta", "index", "max_winding", "wall_time_ms"];

/// A grid point that produced no row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Skipped {
    #[serde(rename = "F")]
    pub froude: f64,
    #[serde(rename = "Hminus_over_Hs")]
    pub hminus: f64,
    pub reason: String,
}

/// Boundary heights at one Froude number, rescaled by `H_s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryRow {
    #[serde(rename = "F")]
    pub froude: f64,
    pub existence_hminus: f64,
    pub boundary_i_hminus: Option<f64>,
    pub boundary_i_hplus: Option<f64>,
    pub boundary_i_period: Option<f64>,
    pub boundary_ii_hminus: Option<f64>,
    pub boundary_ii_hplus: Option<f64>,
    pub boundary_ii_period: Option<f64>,
    pub midfreq_hminus: Option<f64>,
    pub midfreq_hplus: Option<f64>,
    pub midfreq_period: Option<f64>,
    /// Imaginary part of the critical root at the mid-frequency boundary.
    pub midfreq_touch_im: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<DiagramRow>,
    pub skipped: Vec<Skipped>,
}

impl SweepResult {
    pub fn complete(&self) -> bool {
        self.skipped.is_empty()
    }
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new().num_threads(workers).build().map_err(|e| CliError::InvalidOption(format!("worker pool: {e}")))
}

fn by_key(a: (f64, f64), b: (f64, f64)) -> std::cmp::Ordering {
    a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1))
}

/// Classifies one wave; `Err` carries the reason it was skipped.
pub fn classify_point(froude: f64, hminus: f64, cfg: &SweepConfig) -> std::result::Result<DiagramRow, String> {
    let params = WaveParameters::new(froude, cfg.h_sonic, hminus * cfg.h_sonic);
    let v = validate_params(&params);
    if !v.valid {
        return Err(v.reason.map_or("invalid".into(), |r| r.code().to_string()));
    }
    let start = Instant::now();
    let wave = Wave::new(params).map_err(|e| e.to_string())?;
    let opts = ClassifyOptions { xi_mesh: cfg.xi_mesh, contour: cfg.contour, prefilter: cfg.prefilter };
    let verdict = classify_stability(&wave, &opts).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    Ok(DiagramRow {
        froude,
        hminus,
        hplus: wave.scaled.h_plus,
        period: wave.scaled.period,
        verdict: verdict.verdict.as_str().to_string(),
        alpha: verdict.evidence.alpha,
        beta: verdict.evidence.beta,
        index: verdict.evidence.index,
        max_winding: verdict.max_winding,
        wall_time_ms: cfg.timings.then_some(elapsed),
    })
}

/// Classifies every grid point; output order is `(F, H̲₋)` regardless of
/// completion order.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    let points = cfg.points();
    let results: Vec<_> = pool(cfg.workers)?.install(|| points.par_iter().map(|&(f, h)| (f, h, classify_point(f, h, cfg))).collect());
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for (f, h, r) in results {
        match r {
            Ok(row) => rows.push(row),
            Err(reason) => {
                eprintln!("skipped F={f} H-/Hs={h}: {reason}");
                skipped.push(Skipped { froude: f, hminus: h, reason });
            }
        }
    }
    rows.sort_by(|a, b| by_key((a.froude, a.hminus), (b.froude, b.hminus)));
    skipped.sort_by(|a, b| by_key((a.froude, a.hminus), (b.froude, b.hminus)));
    Ok(SweepResult { rows, skipped })
}

fn scaled_period(froude: f64, h: f64) -> Option<f64> {
    Wave::near_homoclinic(WaveParameters::scaled(froude, h), 1e-13).ok().map(|w| w.scaled.period)
}

/// Boundaries I and II (and optionally the mid-frequency boundary) for each
/// Froude number, in input order.
pub fn boundary_rows(froudes: &[f64], midfreq: bool, cfg: &SweepConfig) -> Result<Vec<BoundaryRow>> {
    let rows = pool(cfg.workers)?.install(|| {
        froudes
            .par_iter()
            .map(|&f| {
                let one = boundary_i(f).ok();
                let two = boundary_ii(f).ok();
                let mid = midfreq.then(|| locate_midfreq_boundary(f, cfg.tol, cfg.contour, cfg.xi_mesh).ok()).flatten();
                let mh = mid.map(|m| m.hminus);
                BoundaryRow {
                    froude: f,
                    existence_hminus: h_hom(f),
                    boundary_i_hminus: one,
                    boundary_i_hplus: one.map(z_plus),
                    boundary_i_period: one.and_then(|h| scaled_period(f, h)),
                    boundary_ii_hminus: two,
                    boundary_ii_hplus: two.map(z_plus),
                    boundary_ii_period: two.and_then(|h| scaled_period(f, h)),
                    midfreq_hminus: mh,
                    midfreq_hplus: mh.map(z_plus),
                    midfreq_period: mh.and_then(|h| scaled_period(f, h)),
                    midfreq_touch_im: mid.and_then(|m| m.touch).map(|l| l.im.abs()),
                }
            })
            .collect()
    });
    Ok(rows)
}

/// The coordinate plotted against F.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coordinate {
    Hminus,
    Hplus,
    Period,
    /// Period, zoomed near onset.
    PeriodOnset,
    /// Period-averaged height.
    Havg,
}

fn scaled_avg_height(froude: f64, h: f64) -> Option<f64> {
    Wave::near_homoclinic(WaveParameters::scaled(froude, h), 1e-13).ok().map(|w| w.scaled.avg_h)
}

impl std::str::FromStr for Coordinate {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hminus" => Ok(Coordinate::Hminus),
            "hplus" => Ok(Coordinate::Hplus),
            "period" => Ok(Coordinate::Period),
            "period-onset" => Ok(Coordinate::PeriodOnset),
            "havg" => Ok(Coordinate::Havg),
            other => Err(CliError::InvalidOption(format!("unknown coordinate `{other}`"))),
        }
    }
}

impl Coordinate {
    /// The four panels written by a sweep.
    pub const ALL: [Coordinate; 4] = [Coordinate::Hminus, Coordinate::Hplus, Coordinate::Period, Coordinate::PeriodOnset];

    pub fn file_stem(&self) -> &'static str {
        match self {
            Coordinate::Hminus => "diagram_hminus",
            Coordinate::Hplus => "diagram_hplus",
            Coordinate::Period => "diagram_period",
            Coordinate::PeriodOnset => "diagram_period_onset",
            Coordinate::Havg => "diagram_havg",
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Coordinate::Hminus => "H-/Hs",
            Coordinate::Hplus => "H+/Hs",
            Coordinate::Period | Coordinate::PeriodOnset => "X/Hs",
            Coordinate::Havg => "mean H/Hs",
        }
    }

    pub fn of_row(&self, r: &DiagramRow) -> f64 {
        match self {
            Coordinate::Hminus => r.hminus,
            Coordinate::Hplus => r.hplus,
            Coordinate::Period | Coordinate::PeriodOnset => r.period,
            Coordinate::Havg => scaled_avg_height(r.froude, r.hminus).unwrap_or(f64::NAN),
        }
    }

    fn of_boundary(&self, b: &BoundaryRow) -> [Option<f64>; 3] {
        match self {
            Coordinate::Hminus => [b.boundary_i_hminus, b.boundary_ii_hminus, b.midfreq_hminus],
            Coordinate::Hplus => [b.boundary_i_hplus, b.boundary_ii_hplus, b.midfreq_hplus],
            Coordinate::Period | Coordinate::PeriodOnset => [b.boundary_i_period, b.boundary_ii_period, b.midfreq_period],
            Coordinate::Havg => [b.boundary_i_hminus, b.boundary_ii_hminus, b.midfreq_hminus].map(|h| h.and_then(|h| scaled_avg_height(b.froude, h))),
        }
    }
}

/// Scatter of stable waves plus boundary curves in one coordinate.
pub fn diagram_panel(coord: Coordinate, rows: &[DiagramRow], bounds: &[BoundaryRow], extra: Vec<Series>) -> Panel {
    let stable: Vec<(f64, f64)> = rows.iter().filter(|r| r.verdict == "stable").map(|r| (r.froude, coord.of_row(r))).collect();
    let unstable: Vec<(f64, f64)> = rows.iter().filter(|r| r.verdict != "stable").map(|r| (r.froude, coord.of_row(r))).collect();
    let curve = |k: usize| -> Vec<(f64, f64)> { bounds.iter().map(|b| (b.froude, coord.of_boundary(b)[k].unwrap_or(f64::NAN))).collect() };
    let mut series = vec![
        Series { label: "unstable".into(), color: "#c8c8c8", mark: Mark::Dots, points: unstable },
        Series { label: "stable".into(), color: PALETTE[0], mark: Mark::Dots, points: stable },
        Series { label: "boundary I".into(), color: PALETTE[1], mark: Mark::Line, points: curve(0) },
        Series { label: "boundary II".into(), color: PALETTE[2], mark: Mark::Line, points: curve(1) },
        Series { label: "mid-frequency".into(), color: PALETTE[3], mark: Mark::Line, points: curve(2) },
    ];
    if coord == Coordinate::Hminus {
        series.push(Series {
            label: "existence".into(),
            color: "black",
            mark: Mark::Line,
            points: bounds.iter().map(|b| (b.froude, b.existence_hminus)).collect(),
        });
    }
    series.retain(|s| s.points.iter().any(|p| p.1.is_finite()));
    series.extend(extra);
    let x_range = (coord == Coordinate::PeriodOnset).then_some((2.0, 3.2));
    Panel {
        title: format!("Inviscid roll-wave stability: {} vs F", coord.label()),
        x_label: "F".into(),
        y_label: coord.label().into(),
        x_range,
        y_range: None,
        series,
    }
}

fn write_file(path: &Path, f: impl FnOnce(&mut dyn std::io::Write) -> Result<()>) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path).map_err(io_err(path))?);
    f(&mut w)?;
    std::io::Write::flush(&mut w).map_err(io_err(path))
}

/// Writes the sweep products into `cfg.output_dir`; returns the paths written.
pub fn write_diagram(cfg: &SweepConfig, res: &SweepResult, bounds: &[BoundaryRow]) -> Result<Vec<PathBuf>> {
    let dir = &cfg.output_dir;
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();
    if cfg.formats.contains(&Format::Csv) {
        let p = dir.join("diagram.csv");
        write_file(&p, |w| write_csv_with_header(w, &DIAGRAM_HEADER, &res.rows))?;
        written.push(p);
        let p = dir.join("boundaries.csv");
        write_file(&p, |w| write_csv(w, bounds))?;
        written.push(p);
    }
    if cfg.formats.contains(&Format::Json) {
        let p = dir.join("diagram.json");
        write_file(&p, |w| write_json(w, &res.rows))?;
        written.push(p);
    }
    if cfg.formats.contains(&Format::Svg) {
        for c in Coordinate::ALL {
            let p = dir.join(format!("{}.svg", c.file_stem()));
            let svg = diagram_panel(c, &res.rows, bounds, Vec::new()).render();
            std::fs::write(&p, svg).map_err(io_err(&p))?;
            written.push(p);
        }
    }
    let p = dir.join("skipped.csv");
    if res.complete() {
        if p.exists() {
            std::fs::remove_file(&p).map_err(io_err(&p))?;
        }
    } else {
        write_file(&p, |w| write_csv(w, &res.skipped))?;
        written.push(p);
    }
    Ok(written)
}

/// Reads a diagram CSV written by [`write_diagram`].
pub fn read_diagram(path: &Path) -> Result<Vec<DiagramRow>> {
    read_table(path, Some(&DIAGRAM_HEADER))
}

/// Reads a `boundaries.csv` written by [`write_diagram`].
pub fn read_boundaries(path: &Path) -> Result<Vec<BoundaryRow>> {
    read_table(path, None)
}

fn read_table<T: serde::de::DeserializeOwned>(path: &Path, expect: Option<&[&str]>) -> Result<Vec<T>> {
    let file = std::fs::File::open(path).map_err(io_err(path))?;
    let mut r = csv::Reader::from_reader(file);
    let header = r.headers().map_err(|e| CliError::SchemaMismatch { path: path.into(), line: 1, message: e.to_string() })?.clone();
    if let Some(expect) = expect {
        if header.iter().collect::<Vec<_>>() != expect {
            return Err(CliError::SchemaMismatch { path: path.into(), line: 1, message: format!("expected header {}", expect.join(",")) });
        }
    }
    r.deserialize()
        .map(|row| {
            row.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line() as usize);
                CliError::SchemaMismatch { path: path.into(), line, message: e.to_string() }
            })
        })
        .collect()
}
