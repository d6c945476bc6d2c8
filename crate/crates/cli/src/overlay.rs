//! External boundary curves (for instance viscous or averaged-model
//! stability boundaries) merged into the diagram plots.
//!
//! Overlay files are CSV with the header `F,value,label`; `value` is in the
//! coordinate of the target panel and rows sharing a label form one curve.

use crate::error::{io_err, CliError, Result};
use crate::svg::{Mark, Series, PALETTE};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

pub const OVERLAY_HEADER: [&str; 3] = ["F", "value", "label"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlayPoint {
    #[serde(rename = "F")]
    pub froude: f64,
    pub value: f64,
    pub label: String,
}

/// Parses overlay CSV text. An empty file yields no points.
pub fn parse_overlay(text: &str, path: &Path) -> Result<Vec<OverlayPoint>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mismatch = |line: usize, message: String| CliError::SchemaMismatch { path: path.to_path_buf(), line, message };
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header: Vec<String> = r.headers().map_err(|e| mismatch(1, e.to_string()))?.iter().map(str::to_string).collect();
    if header != OVERLAY_HEADER {
        return Err(mismatch(1, format!("expected header `{}`, found `{}`", OVERLAY_HEADER.join(","), header.join(","))));
    }
    let mut out = Vec::new();
    for rec in r.deserialize::<OverlayPoint>() {
        match rec {
            Ok(p) if p.froude.is_finite() && p.value.is_finite() => out.push(p),
            Ok(p) => return Err(mismatch(out.len() + 2, format!("non-finite value for label `{}`", p.label))),
            Err(e) => {
                let line = e.position().map_or(out.len() + 2, |p| p.line() as usize);
                return Err(mismatch(line, e.to_string()));
            }
        }
    }
    Ok(out)
}

pub fn read_overlay(path: &Path) -> Result<Vec<OverlayPoint>> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    parse_overlay(&text, path)
}

/// One line series per label, ordered by label and then by F.
pub fn overlay_series(points: &[OverlayPoint]) -> Vec<Series> {
    let mut groups: BTreeMap<&str, Vec<(f64, f64)>> = BTreeMap::new();
    for p in points {
        groups.entry(&p.label).or_default().push((p.froude, p.value));
    }
    groups
        .into_iter()
        .enumerate()
        .map(|(k, (label, mut pts))| {
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            Series { label: label.to_string(), color: PALETTE[(k + 4) % PALETTE.len()], mark: Mark::Line, points: pts }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_has_no_curves() {
        assert!(parse_overlay("", Path::new("o.csv")).unwrap().is_empty());
        assert!(parse_overlay("F,value,label\n", Path::new("o.csv")).unwrap().is_empty());
    }

    #[test]
    fn malformed_header_reports_line_one() {
        match parse_overlay("F,height,label\n3,0.5,a\n", Path::new("o.csv")) {
            Err(CliError::SchemaMismatch { line, .. }) => assert_eq!(line, 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_row_reports_its_line() {
        match parse_overlay("F,value,label\n3,0.5,a\n4,oops,a\n", Path::new("o.csv")) {
            Err(CliError::SchemaMismatch { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn groups_by_label() {
        let pts = parse_overlay("F,value,label\n4,0.4,b\n3,0.5,a\n2,0.6,b\n", Path::new("o.csv")).unwrap();
        let s = overlay_series(&pts);
        assert_eq!(s.len(), 2);
        assert_eq!(s[1].label, "b");
        assert_eq!(s[1].points, vec![(2.0, 0.6), (4.0, 0.4)]);
    }
}
