//! Command-line surface and the single-wave subcommands.

use crate::config::{FileConfig, Format, SweepConfig};
use crate::error::{CliError, Result};
use crate::output::{sink, write_csv, write_json};
use crate::overlay::{overlay_series, read_overlay, OverlayPoint};
use crate::sweep::{boundary_rows, classify_point, diagram_panel, read_diagram, run_sweep, write_diagram, Coordinate};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rollwave::evans::evans_split;
use rollwave::highfreq::hf_index;
use rollwave::modulation::{averaged_discriminant, averaged_hyperbolicity_boundary, whitham_characteristics};
use rollwave::singular_ode::{EigenSolver, SolverOptions};
use rollwave::spectrum::{split_table, track_critical_root, xi_mesh_half};
use rollwave::{Wave, WaveParameters};
use serde::Serialize;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "rollwave", version, about = "Spectral stability of inviscid roll waves")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every subcommand; they override the config file.
/// Heights are rescaled: `--hminus` is `H₋/H_s`.
#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// Froude numbers (comma-separated).
    #[arg(long, global = true, value_delimiter = ',')]
    pub froude: Vec<f64>,
    /// Left heights `H₋/H_s` (comma-separated).
    #[arg(long, global = true, value_delimiter = ',')]
    pub hminus: Vec<f64>,
    /// Left heights given as offsets above the homoclinic height.
    #[arg(long, global = true, value_delimiter = ',')]
    pub above_hom: Vec<f64>,
    /// Sonic height `H_s`.
    #[arg(long, global = true)]
    pub hsonic: Option<f64>,
    /// Bisection tolerance in `H₋/H_s` for boundary refinement.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Output file, or directory for `diagram`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// csv, json or svg (comma-separated for `diagram`).
    #[arg(long, global = true, value_delimiter = ',')]
    pub format: Vec<String>,
    /// Key-value (TOML) configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Derived constants and averages of each wave.
    Profile {
        /// Also write the profile `(x, H, Q)` on this many points.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Whitham characteristics and averaged-system discriminant.
    Modulation,
    /// Periodic Evans-Lopatinsky determinant at one `(λ, ξ)`.
    Evans {
        /// `re,im`
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        xi: f64,
    },
    /// Existence, low-frequency and (optionally) mid-frequency boundaries.
    Boundaries {
        /// Also bisect the mid-frequency boundary (slow).
        #[arg(long)]
        midfreq: bool,
        /// Emit the averaged-system hyperbolicity boundary as overlay CSV
        /// (`F,value,label`, value = mean height over `H_s`).
        #[arg(long)]
        averaged: bool,
    },
    /// High-frequency index and its threshold.
    HighIndex,
    /// Winding numbers of `Δ̂(·, ξ)` around the half annulus.
    Winding {
        /// Bloch frequencies; defaults to the non-negative half mesh.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        xi: Vec<f64>,
    },
    /// Stability verdict of each wave, or a tracked root curve.
    Spectrum {
        /// Track a root from `--seed` over `xi0,xi1` instead of classifying.
        #[arg(long, allow_hyphen_values = true)]
        track: Option<String>,
        /// `re,im` starting guess for tracking.
        #[arg(long, allow_hyphen_values = true)]
        seed: Option<String>,
        #[arg(long, default_value_t = 200)]
        steps: usize,
        #[arg(long)]
        no_prefilter: bool,
    },
    /// Full stability diagram sweep.
    Diagram {
        #[arg(long)]
        no_prefilter: bool,
        /// Leave `wall_time_ms` empty so reruns are byte-identical.
        #[arg(long)]
        no_timings: bool,
        /// Also refine the mid-frequency boundary per Froude number (slow).
        #[arg(long)]
        midfreq: bool,
    },
    /// Plot a computed diagram together with external boundary curves.
    Overlay {
        /// `diagram.csv` from a previous sweep.
        #[arg(long)]
        diagram: PathBuf,
        /// `boundaries.csv` from the same sweep.
        #[arg(long)]
        boundaries: Option<PathBuf>,
        /// Overlay CSV files with header `F,value,label`.
        #[arg(long = "curves", value_delimiter = ',')]
        curves: Vec<PathBuf>,
        /// hminus, hplus, period, period-onset or havg.
        #[arg(long, default_value = "hminus")]
        coordinate: String,
    },
}

/// Process exit status for a finished command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Complete,
    Partial,
}

fn parse_pair(s: &str, what: &str) -> Result<Complex64> {
    let mut it = s.split(',').map(|p| p.trim().parse::<f64>());
    match (it.next(), it.next(), it.next()) {
        (Some(Ok(a)), Some(Ok(b)), None) => Ok(Complex64::new(a, b)),
        (Some(Ok(a)), None, None) => Ok(Complex64::new(a, 0.0)),
        _ => Err(CliError::InvalidOption(format!("{what}: expected `re,im`, got `{s}`"))),
    }
}

impl GlobalArgs {
    fn overrides(&self) -> FileConfig {
        let list = |v: &Vec<f64>| (!v.is_empty()).then(|| v.clone());
        FileConfig {
            froude: list(&self.froude),
            hminus: list(&self.hminus),
            hminus_above_hom: list(&self.above_hom),
            hsonic: self.hsonic,
            tol: self.tol,
            workers: self.workers,
            out: self.out.clone(),
            format: (!self.format.is_empty()).then(|| self.format.clone()),
            ..Default::default()
        }
    }

    /// Config file (if any) with these flags applied on top.
    pub fn file_config(&self) -> Result<FileConfig> {
        let mut base = match &self.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let over = self.overrides();
        // A height given on the command line replaces either height policy from the file.
        if over.hminus.is_some() || over.hminus_above_hom.is_some() {
            base.hminus = None;
            base.hminus_above_hom = None;
        }
        Ok(base.merged(over))
    }
}

/// Output format for table commands: the first `--format`, or `default`.
fn table_format(cfg: &FileConfig, default: Format) -> Result<Format> {
    match cfg.format.as_ref().and_then(|v| v.first()) {
        Some(s) => match s.parse()? {
            Format::Svg => Err(CliError::InvalidOption("svg output is only available for diagram and overlay".into())),
            f => Ok(f),
        },
        None => Ok(default),
    }
}

fn emit<T: Serialize>(rows: &[T], cfg: &FileConfig, default: Format) -> Result<()> {
    let w = sink(cfg.out.as_deref())?;
    match table_format(cfg, default)? {
        Format::Json => write_json(w, rows),
        _ => write_csv(w, rows),
    }
}

/// Waves named on the command line: every Froude number with every height.
fn waves(sc: &SweepConfig) -> Result<Vec<Wave>> {
    if sc.froude_grid.is_empty() {
        return Err(CliError::InvalidOption("no Froude number given".into()));
    }
    sc.points().into_iter().map(|(f, h)| Ok(Wave::new(WaveParameters::new(f, sc.h_sonic, h * sc.h_sonic))?)).collect()
}

/// Single-wave commands default to one height rather than a full column.
fn single_config(fc: &FileConfig) -> Result<SweepConfig> {
    let mut fc = fc.clone();
    if fc.hminus.is_none() && fc.hminus_above_hom.is_none() && fc.hminus_count.is_none() {
        return Err(CliError::InvalidOption("give --hminus or --above-hom".into()));
    }
    if fc.froude.is_none() && fc.froude_range.is_none() {
        return Err(CliError::InvalidOption("give --froude".into()));
    }
    fc.out = None;
    SweepConfig::resolve(&fc)
}

#[derive(Debug, Serialize)]
struct ProfileRecord {
    #[serde(rename = "F")]
    froude: f64,
    h_sonic: f64,
    h_minus: f64,
    h_plus: f64,
    h_hom: f64,
    speed: f64,
    flux_const: f64,
    period: f64,
    sonic_pos: f64,
    avg_h: f64,
    avg_q: f64,
    avg_gamma: f64,
    wavenumber: f64,
    temporal_wavenumber: f64,
}

#[derive(Debug, Serialize)]
struct SampleRecord {
    #[serde(rename = "F")]
    froude: f64,
    h_minus: f64,
    x: f64,
    #[serde(rename = "H")]
    h: f64,
    #[serde(rename = "Q")]
    q: f64,
}

#[derive(Debug, Serialize)]
struct ModulationRecord {
    #[serde(rename = "F")]
    froude: f64,
    #[serde(rename = "Hminus_over_Hs")]
    hminus: f64,
    alpha1: f64,
    alpha2: f64,
    hyperbolic: bool,
    jordan_defect: bool,
    averaged_discriminant: f64,
}

#[derive(Debug, Serialize)]
struct EvansRecord {
    #[serde(rename = "F")]
    froude: f64,
    #[serde(rename = "Hminus_over_Hs")]
    hminus: f64,
    lambda_re: f64,
    lambda_im: f64,
    xi: f64,
    ln_abs: f64,
    arg: f64,
    re: f64,
    im: f64,
}

#[derive(Debug, Serialize)]
struct HighIndexRecord {
    #[serde(rename = "F")]
    froude: f64,
    #[serde(rename = "Hminus_over_Hs")]
    hminus: f64,
    index: f64,
    threshold: f64,
    asymptote: f64,
    prefactor: f64,
    mu_tilde_plus_integral: f64,
    gamma_tilde_plus_integral: f64,
    verdict: &'static str,
}

#[derive(Debug, Serialize)]
struct WindingRecord {
    #[serde(rename = "F")]
    froude: f64,
    #[serde(rename = "Hminus_over_Hs")]
    hminus: f64,
    xi: f64,
    winding: i64,
}

#[derive(Debug, Serialize)]
struct CurveRecord {
    xi: f64,
    re_lambda: f64,
    im_lambda: f64,
}

fn rescaled_hminus(w: &Wave) -> f64 {
    w.hm() / w.hs()
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let fc = cli.global.file_config()?;
    match &cli.command {
        Command::Profile { samples } => {
            let ws = waves(&single_config(&fc)?)?;
            if let Some(n) = samples {
                let mut rows = Vec::new();
                for w in &ws {
                    for (x, h, q) in w.sample(*n)? {
                        rows.push(SampleRecord { froude: w.froude(), h_minus: w.hm(), x, h, q });
                    }
                }
                return emit(&rows, &fc, Format::Csv).map(|_| Outcome::Complete);
            }
            let rows: Vec<ProfileRecord> = ws
                .iter()
                .map(|w| ProfileRecord {
                    froude: w.froude(),
                    h_sonic: w.hs(),
                    h_minus: w.hm(),
                    h_plus: w.q.h_plus,
                    h_hom: w.q.h_hom,
                    speed: w.q.speed,
                    flux_const: w.q.flux_const,
                    period: w.q.period,
                    sonic_pos: w.q.sonic_pos,
                    avg_h: w.q.avg_h,
                    avg_q: w.q.avg_q,
                    avg_gamma: w.q.avg_gamma,
                    wavenumber: w.q.wavenumber,
                    temporal_wavenumber: w.q.temporal_wavenumber,
                })
                .collect();
            emit(&rows, &fc, Format::Csv)?;
        }
        Command::Modulation => {
            let rows = waves(&single_config(&fc)?)?
                .iter()
                .map(|w| {
                    let ch = whitham_characteristics(w)?;
                    Ok(ModulationRecord {
                        froude: w.froude(),
                        hminus: rescaled_hminus(w),
                        alpha1: ch.alpha1,
                        alpha2: ch.alpha2,
                        hyperbolic: ch.hyperbolic,
                        jordan_defect: ch.jordan_defect,
                        averaged_discriminant: averaged_discriminant(w),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            emit(&rows, &fc, Format::Csv)?;
        }
        Command::Evans { lambda, xi } => {
            let l = parse_pair(lambda, "--lambda")?;
            let rows = waves(&single_config(&fc)?)?
                .iter()
                .map(|w| {
                    let d = evans_split(&EigenSolver::new(w), l)?.evans(*xi);
                    let z = d.to_complex();
                    Ok(EvansRecord {
                        froude: w.froude(),
                        hminus: rescaled_hminus(w),
                        lambda_re: l.re,
                        lambda_im: l.im,
                        xi: *xi,
                        ln_abs: d.ln_norm(),
                        arg: d.arg(),
                        re: z.re,
                        im: z.im,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            emit(&rows, &fc, Format::Csv)?;
        }
        Command::Boundaries { midfreq, averaged } => {
            let mut fc = fc.clone();
            fc.hminus_count.get_or_insert(1);
            let out = fc.out.take();
            let sc = SweepConfig::resolve(&fc)?;
            let fc = FileConfig { out, ..fc };
            if *averaged {
                let tol = sc.tol;
                let mut rows = Vec::new();
                for &f in &sc.froude_grid {
                    // k-th sign change from below; each becomes its own curve.
                    for (k, h) in averaged_hyperbolicity_boundary(f, 400, tol)?.into_iter().enumerate() {
                        let w = Wave::new(WaveParameters::scaled(f, h))?;
                        rows.push(OverlayPoint { froude: f, value: w.scaled.avg_h, label: format!("averaged-hyperbolicity-{}", k + 1) });
                    }
                }
                emit(&rows, &fc, Format::Csv)?;
            } else {
                emit(&boundary_rows(&sc.froude_grid, *midfreq, &sc)?, &fc, Format::Csv)?;
            }
        }
        Command::HighIndex => {
            let rows = waves(&single_config(&fc)?)?
                .iter()
                .map(|w| {
                    let hf = hf_index(w)?;
                    Ok(HighIndexRecord {
                        froude: w.froude(),
                        hminus: rescaled_hminus(w),
                        index: hf.index,
                        threshold: hf.threshold,
                        asymptote: hf.asymptote,
                        prefactor: hf.prefactor,
                        mu_tilde_plus_integral: hf.mu_tilde_plus_integral,
                        gamma_tilde_plus_integral: hf.gamma_tilde_plus_integral,
                        verdict: hf.verdict.as_str(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            emit(&rows, &fc, Format::Csv)?;
        }
        Command::Winding { xi } => {
            let sc = single_config(&fc)?;
            let mut rows = Vec::new();
            for w in waves(&sc)? {
                let solver = EigenSolver::with_options(&w, SolverOptions::sweep());
                let table = split_table(&solver, sc.contour)?;
                let xs = if xi.is_empty() { xi_mesh_half(w.period(), sc.xi_mesh) } else { xi.clone() };
                for x in xs {
                    rows.push(WindingRecord { froude: w.froude(), hminus: rescaled_hminus(&w), xi: x, winding: table.winding(&solver, x)? });
                }
            }
            emit(&rows, &fc, Format::Csv)?;
        }
        Command::Spectrum { track, seed, steps, no_prefilter } => {
            let mut sc = single_config(&fc)?;
            sc.prefilter = !no_prefilter;
            if let Some(range) = track {
                let r = parse_pair(range, "--track")?;
                let seed = parse_pair(seed.as_deref().ok_or_else(|| CliError::InvalidOption("--track needs --seed".into()))?, "--seed")?;
                let mut rows = Vec::new();
                let mut stalled = false;
                for w in waves(&sc)? {
                    let curve = track_critical_root(&EigenSolver::new(&w), seed, r.re, r.im, *steps)?;
                    if let Some(why) = &curve.stall {
                        eprintln!("tracking stopped early: {why}");
                        stalled = true;
                    }
                    rows.extend(curve.points.iter().map(|&(xi, l)| CurveRecord { xi, re_lambda: l.re, im_lambda: l.im }));
                }
                emit(&rows, &fc, Format::Csv)?;
                return Ok(if stalled { Outcome::Partial } else { Outcome::Complete });
            }
            let mut rows = Vec::new();
            let mut partial = false;
            for (f, h) in sc.points() {
                match classify_point(f, h, &sc) {
                    Ok(r) => rows.push(r),
                    Err(why) => {
                        eprintln!("skipped F={f} H-/Hs={h}: {why}");
                        partial = true;
                    }
                }
            }
            emit(&rows, &fc, Format::Json)?;
            return Ok(if partial { Outcome::Partial } else { Outcome::Complete });
        }
        Command::Diagram { no_prefilter, no_timings, midfreq } => {
            let mut sc = SweepConfig::resolve(&fc)?;
            sc.prefilter &= !no_prefilter;
            sc.timings &= !no_timings;
            sc.midfreq |= midfreq;
            let res = run_sweep(&sc)?;
            let bounds = boundary_rows(&sc.froude_grid, sc.midfreq, &sc)?;
            write_diagram(&sc, &res, &bounds)?;
            return Ok(if res.complete() { Outcome::Complete } else { Outcome::Partial });
        }
        Command::Overlay { diagram, boundaries, curves, coordinate } => {
            let coord: Coordinate = coordinate.parse()?;
            let rows = read_diagram(diagram)?;
            let bounds = match boundaries {
                Some(p) => crate::sweep::read_boundaries(p)?,
                None => Vec::new(),
            };
            let mut external = Vec::new();
            for p in curves {
                external.extend(read_overlay(p)?);
            }
            let svg = diagram_panel(coord, &rows, &bounds, overlay_series(&external)).render();
            let mut w = sink(fc.out.as_deref())?;
            w.write_all(svg.as_bytes())?;
            w.flush()?;
        }
    }
    Ok(Outcome::Complete)
}
