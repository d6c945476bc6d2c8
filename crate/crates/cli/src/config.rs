//! Sweep configuration: a TOML key-value file merged with command-line
//! overrides (flags win).

use crate::error::{io_err, CliError, Result};
use rollwave::profile::h_hom;
use rollwave::spectrum::ContourSpec;
use serde::Deserialize;
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl std::str::FromStr for Format {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            other => Err(CliError::InvalidOption(format!("unknown format `{other}`"))),
        }
    }
}

/// Keys accepted in a config file. Every key is optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub froude: Option<Vec<f64>>,
    pub froude_range: Option<[f64; 2]>,
    pub froude_count: Option<usize>,
    /// Explicit rescaled left heights `H̲₋`, used for every Froude number.
    pub hminus: Option<Vec<f64>>,
    /// Offsets above `H_hom(F)`, used for every Froude number.
    pub hminus_above_hom: Option<Vec<f64>>,
    /// Uniform points per Froude number inside `(H_hom, 1)`.
    pub hminus_count: Option<usize>,
    pub hsonic: Option<f64>,
    pub tol: Option<f64>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Vec<String>>,
    pub r_inner: Option<f64>,
    pub r_outer: Option<f64>,
    pub n_small_arc: Option<usize>,
    pub n_segment: Option<usize>,
    pub n_large_arc: Option<usize>,
    pub xi_mesh: Option<usize>,
    pub prefilter: Option<bool>,
    pub timings: Option<bool>,
    pub midfreq: Option<bool>,
}

impl FileConfig {
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let line = e.span().map_or(1, |s| text[..s.start.min(text.len())].matches('\n').count() + 1);
            CliError::ConfigParse { path: path.to_path_buf(), line, message: e.message().to_string() }
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        Self::parse(&text, path)
    }

    /// Keys set in `over` replace those in `self`.
    pub fn merged(self, over: FileConfig) -> FileConfig {
        macro_rules! pick {
            ($($f:ident),*) => { FileConfig { $($f: over.$f.or(self.$f)),* } };
        }
        pick!(
            froude,
            froude_range,
            froude_count,
            hminus,
            hminus_above_hom,
            hminus_count,
            hsonic,
            tol,
            workers,
            out,
            format,
            r_inner,
            r_outer,
            n_small_arc,
            n_segment,
            n_large_arc,
            xi_mesh,
            prefilter,
            timings,
            midfreq
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum HminusPolicy {
    Uniform(usize),
    Explicit(Vec<f64>),
    AboveHomoclinic(Vec<f64>),
}

impl HminusPolicy {
    /// Rescaled left heights for one Froude number.
    pub fn heights(&self, froude: f64) -> Vec<f64> {
        let hh = h_hom(froude);
        match self {
            HminusPolicy::Uniform(n) => (0..*n).map(|j| hh + (1.0 - hh) * (j as f64 + 0.5) / *n as f64).collect(),
            HminusPolicy::Explicit(v) => v.clone(),
            HminusPolicy::AboveHomoclinic(v) => v.iter().map(|d| hh + d).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub froude_grid: Vec<f64>,
    pub hminus: HminusPolicy,
    pub h_sonic: f64,
    pub contour: ContourSpec,
    pub xi_mesh: usize,
    pub workers: usize,
    pub output_dir: PathBuf,
    pub formats: BTreeSet<Format>,
    pub prefilter: bool,
    pub timings: bool,
    /// Also refine the mid-frequency boundary for each Froude number.
    pub midfreq: bool,
    /// Bisection tolerance in `H̲₋` for boundary refinement.
    pub tol: f64,
}

pub const DEFAULT_FROUDE_RANGE: [f64; 2] = [2.1, 20.0];
pub const DEFAULT_FROUDE_COUNT: usize = 60;
pub const DEFAULT_HMINUS_COUNT: usize = 100;

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

impl SweepConfig {
    pub fn resolve(c: &FileConfig) -> Result<Self> {
        let froude_grid = match (&c.froude, c.froude_range) {
            (Some(v), _) => v.clone(),
            (None, range) => {
                let [a, b] = range.unwrap_or(DEFAULT_FROUDE_RANGE);
                let n = c.froude_count.unwrap_or(DEFAULT_FROUDE_COUNT);
                match n {
                    0 => Vec::new(),
                    1 => vec![a],
                    _ => (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect(),
                }
            }
        };
        let hminus = match (&c.hminus, &c.hminus_above_hom) {
            (Some(_), Some(_)) => return Err(CliError::InvalidOption("set only one of hminus and hminus_above_hom".into())),
            (Some(v), None) => HminusPolicy::Explicit(v.clone()),
            (None, Some(v)) => HminusPolicy::AboveHomoclinic(v.clone()),
            (None, None) => HminusPolicy::Uniform(c.hminus_count.unwrap_or(DEFAULT_HMINUS_COUNT)),
        };
        let d = ContourSpec::default();
        let contour = ContourSpec {
            r_inner: c.r_inner.unwrap_or(d.r_inner),
            r_outer: c.r_outer.unwrap_or(d.r_outer),
            n_small_arc: c.n_small_arc.unwrap_or(d.n_small_arc),
            n_segment: c.n_segment.unwrap_or(d.n_segment),
            n_large_arc: c.n_large_arc.unwrap_or(d.n_large_arc),
        };
        if !(contour.r_inner > 0.0 && contour.r_outer > contour.r_inner)
            || contour.n_small_arc == 0
            || contour.n_segment == 0
            || contour.n_large_arc == 0
        {
            return Err(CliError::InvalidOption("contour needs 0 < r_inner < r_outer and positive point counts".into()));
        }
        let formats = match &c.format {
            Some(v) => v.iter().map(|s| s.parse()).collect::<Result<BTreeSet<_>>>()?,
            None => [Format::Csv, Format::Json, Format::Svg].into_iter().collect(),
        };
        let h_sonic = c.hsonic.unwrap_or(1.0);
        if !(h_sonic > 0.0) {
            return Err(CliError::InvalidOption("hsonic must be positive".into()));
        }
        Ok(SweepConfig {
            froude_grid,
            hminus,
            h_sonic,
            contour,
            xi_mesh: c.xi_mesh.unwrap_or(1000),
            workers: c.workers.unwrap_or_else(default_workers).max(1),
            output_dir: c.out.clone().unwrap_or_else(|| PathBuf::from("diagram-out")),
            formats,
            prefilter: c.prefilter.unwrap_or(true),
            timings: c.timings.unwrap_or(true),
            midfreq: c.midfreq.unwrap_or(false),
            tol: c.tol.unwrap_or(1e-6),
        })
    }

    /// `(F, H̲₋)` pairs in sweep order.
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.froude_grid.iter().flat_map(|&f| self.hminus.heights(f).into_iter().map(move |h| (f, h))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_values() {
        let file = FileConfig::parse("froude = [3.0]\nworkers = 2\nhminus_count = 4\n", Path::new("c.toml")).unwrap();
        let over = FileConfig { workers: Some(8), ..Default::default() };
        let c = SweepConfig::resolve(&file.merged(over)).unwrap();
        assert_eq!(c.workers, 8);
        assert_eq!(c.points().len(), 4);
        assert!(c.points().iter().all(|&(f, h)| f == 3.0 && h > h_hom(3.0) && h < 1.0));
    }

    #[test]
    fn parse_error_reports_line() {
        let err = FileConfig::parse("froude = [3.0]\n\nbogus = 1\n", Path::new("c.toml")).unwrap_err();
        match err {
            CliError::ConfigParse { line, .. } => assert_eq!(line, 3),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn default_grid_has_six_thousand_points() {
        let c = SweepConfig::resolve(&FileConfig::default()).unwrap();
        assert_eq!(c.points().len(), 6000);
        assert_eq!(c.contour.total_points(), 7000);
    }
}
