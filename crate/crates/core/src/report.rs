//! Verification reports and tabular/plot output.
//!
//! All numbers are written with 12 significant digits so that files are
//! byte-identical across runs with the same configuration.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which error a case's tolerance applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorMetric {
    Absolute,
    Relative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub case_id: String,
    /// `None` when the case could not be evaluated; see `failure`.
    pub computed: Option<f64>,
    pub expected: f64,
    pub abs_error: Option<f64>,
    pub rel_error: Option<f64>,
    pub tolerance: f64,
    pub metric: ErrorMetric,
    pub pass: bool,
    pub failure: Option<String>,
}

impl CaseRecord {
    pub fn new(
        case_id: impl Into<String>,
        computed: f64,
        expected: f64,
        tolerance: f64,
        metric: ErrorMetric,
    ) -> Self {
        let abs = (computed - expected).abs();
        let rel = if expected == 0.0 { abs } else { abs / expected.abs() };
        let err = match metric {
            ErrorMetric::Absolute => abs,
            ErrorMetric::Relative => rel,
        };
        Self {
            case_id: case_id.into(),
            computed: Some(computed),
            expected,
            abs_error: Some(abs),
            rel_error: Some(rel),
            tolerance,
            metric,
            pass: err <= tolerance,
            failure: None,
        }
    }

    /// A case whose evaluation failed; always reported as not passing.
    pub fn failed(
        case_id: impl Into<String>,
        expected: f64,
        tolerance: f64,
        metric: ErrorMetric,
        error: &Error,
    ) -> Self {
        Self {
            case_id: case_id.into(),
            computed: None,
            expected,
            abs_error: None,
            rel_error: None,
            tolerance,
            metric,
            pass: false,
            failure: Some(error.to_string()),
        }
    }

    /// The error the tolerance is compared against.
    pub fn error(&self) -> Option<f64> {
        match self.metric {
            ErrorMetric::Absolute => self.abs_error,
            ErrorMetric::Relative => self.rel_error,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub cases: usize,
    pub passes: usize,
    /// Largest tolerance-relevant error over evaluated cases.
    pub max_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub command: String,
    pub records: Vec<CaseRecord>,
    pub summary: Summary,
}

impl VerificationReport {
    /// Sorts records by case id and computes the summary.
    pub fn new(command: impl Into<String>, mut records: Vec<CaseRecord>) -> Self {
        records.sort_by(|a, b| a.case_id.cmp(&b.case_id));
        let summary = Summary {
            cases: records.len(),
            passes: records.iter().filter(|r| r.pass).count(),
            max_error: records.iter().filter_map(CaseRecord::error).reduce(f64::max),
        };
        Self {
            command: command.into(),
            records,
            summary,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.summary.passes == self.summary.cases
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parameter(format!("invalid report JSON: {e}")))
    }

    /// `case,computed,expected,abs_error,rel_error,pass`
    pub fn to_csv(&self) -> String {
        let mut out = String::from("case,computed,expected,abs_error,rel_error,pass\n");
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.case_id,
                fmt_opt(r.computed),
                fmt_num(r.expected),
                fmt_opt(r.abs_error),
                fmt_opt(r.rel_error),
                r.pass
            );
        }
        out
    }
}

/// 12 significant digits in scientific notation.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.11e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_num).unwrap_or_default()
}

/// A table with a fixed header; every cell is already formatted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Samples of one quantity along one coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileData {
    pub quantity: String,
    pub unit: String,
    pub coordinate: String,
    pub coordinate_unit: String,
    pub coords: Vec<f64>,
    pub values: Vec<f64>,
    /// True where the value is excluded (node mask or unusable stencil).
    pub mask: Vec<bool>,
}

impl ProfileData {
    /// `coordinate,value,mask`
    pub fn to_csv(&self) -> String {
        let mut out = String::from("coordinate,value,mask\n");
        for ((c, v), m) in self.coords.iter().zip(&self.values).zip(&self.mask) {
            let _ = writeln!(out, "{},{},{}", fmt_num(*c), fmt_num(*v), m);
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("profile serializes")
    }

    /// Single-panel line plot of the unmasked samples; masked points break
    /// the line.
    pub fn to_svg(&self) -> String {
        const W: f64 = 640.0;
        const H: f64 = 400.0;
        const L: f64 = 80.0;
        const R: f64 = 20.0;
        const T: f64 = 20.0;
        const B: f64 = 60.0;
        let pts: Vec<(f64, f64)> = self
            .coords
            .iter()
            .zip(&self.values)
            .zip(&self.mask)
            .filter(|(_, &m)| !m)
            .map(|((&c, &v), _)| (c, v))
            .collect();
        let (x0, x1) = extent(pts.iter().map(|p| p.0));
        let (y0, y1) = extent(pts.iter().map(|p| p.1));
        let sx = |x: f64| L + (x - x0) / (x1 - x0) * (W - L - R);
        let sy = |y: f64| H - B - (y - y0) / (y1 - y0) * (H - T - B);

        let mut paths = Vec::new();
        let mut current = String::new();
        for ((&c, &v), &m) in self.coords.iter().zip(&self.values).zip(&self.mask) {
            if m {
                if !current.is_empty() {
                    paths.push(std::mem::take(&mut current));
                }
                continue;
            }
            let cmd = if current.is_empty() { 'M' } else { 'L' };
            let _ = write!(current, "{cmd}{:.2},{:.2} ", sx(c), sy(v));
        }
        if !current.is_empty() {
            paths.push(current);
        }

        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
        );
        let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(
            svg,
            r#"<path d="M{L},{T} L{L},{} L{},{}" fill="none" stroke="black"/>"#,
            H - B,
            W - R,
            H - B
        );
        for p in &paths {
            let _ = writeln!(
                svg,
                r#"<path d="{}" fill="none" stroke="steelblue" stroke-width="1.5"/>"#,
                p.trim_end()
            );
        }
        let label = |s: &str| s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;");
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">{} [{}]</text>"#,
            (L + W - R) / 2.0,
            H - 15.0,
            label(&self.coordinate),
            label(&self.coordinate_unit)
        );
        let _ = writeln!(
            svg,
            r#"<text x="20" y="{}" text-anchor="middle" font-size="14" transform="rotate(-90 20 {})">{} [{}]</text>"#,
            (T + H - B) / 2.0,
            (T + H - B) / 2.0,
            label(&self.quantity),
            label(&self.unit)
        );
        for (v, x, y, anchor) in [
            (x0, L, H - B + 18.0, "start"),
            (x1, W - R, H - B + 18.0, "end"),
        ] {
            let _ = writeln!(
                svg,
                r#"<text x="{x}" y="{y}" text-anchor="{anchor}" font-size="11">{}</text>"#,
                short(v)
            );
        }
        for (v, y) in [(y0, H - B), (y1, T + 10.0)] {
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{y}" text-anchor="end" font-size="11">{}</text>"#,
                L - 4.0,
                short(v)
            );
        }
        svg.push_str("</svg>\n");
        svg
    }
}

fn short(v: f64) -> String {
    format!("{v:.4e}")
}

/// (min, max) with a nonzero span.
fn extent(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
        (a.min(v), b.max(v))
    });
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo > 1e-12 * lo.abs().max(hi.abs()) {
        (lo, hi)
    } else {
        let pad = if lo == 0.0 { 1.0 } else { 0.5 * lo.abs() };
        (lo - pad, hi + pad)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pass_flag_follows_tolerance() {
        let r = CaseRecord::new("a", 1.0 + 1e-9, 1.0, 1e-8, ErrorMetric::Relative);
        assert!(r.pass);
        let r = CaseRecord::new("a", 1.1, 1.0, 1e-8, ErrorMetric::Relative);
        assert!(!r.pass);
        let r = CaseRecord::new("a", 1e-3, 0.0, 1e-2, ErrorMetric::Absolute);
        assert!(r.pass && r.rel_error == Some(1e-3));
    }

    #[test]
    fn records_sorted_and_summarized() {
        let rep = VerificationReport::new(
            "x",
            vec![
                CaseRecord::new("b", 2.0, 2.0, 1e-8, ErrorMetric::Absolute),
                CaseRecord::failed("c", 1.0, 1e-8, ErrorMetric::Absolute, &Error::EmptyMask),
                CaseRecord::new("a", 1.5, 1.0, 1e-8, ErrorMetric::Absolute),
            ],
        );
        let ids: Vec<&str> = rep.records.iter().map(|r| r.case_id.as_str()).collect();
        assert_eq!(ids, ["a", "b", "c"]);
        assert_eq!((rep.summary.cases, rep.summary.passes), (3, 1));
        assert_eq!(rep.summary.max_error, Some(0.5));
        assert!(!rep.all_pass());
        let csv = rep.to_csv();
        assert!(csv.starts_with("case,computed,expected,abs_error,rel_error,pass\n"));
        assert!(csv.contains("a,1.50000000000e0,1.00000000000e0,5.00000000000e-1,5.00000000000e-1,false\n"));
        assert!(csv.contains("c,,1.00000000000e0,,,false\n"));
    }

    #[test]
    fn number_format_has_twelve_significant_digits() {
        assert_eq!(fmt_num(-0.125), "-1.25000000000e-1");
        assert_eq!(fmt_num(1.0 / 3.0), "3.33333333333e-1");
    }

    #[test]
    fn svg_is_self_contained() {
        let p = ProfileData {
            quantity: "V_Q".into(),
            unit: "hartree".into(),
            coordinate: "r".into(),
            coordinate_unit: "bohr".into(),
            coords: vec![1.0, 2.0, 3.0, 4.0],
            values: vec![-0.5; 4],
            mask: vec![false, true, false, false],
        };
        let svg = p.to_svg();
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert!(svg.contains("V_Q [hartree]") && svg.contains("r [bohr]"));
        assert_eq!(svg.matches("stroke=\"steelblue\"").count(), 2);
        assert!(!svg.contains("href"));
    }

    fn arb_record() -> impl Strategy<Value = CaseRecord> {
        (
            "[a-z0-9_,()+-]{1,12}",
            -1e6f64..1e6,
            -1e6f64..1e6,
            1e-12f64..1.0,
            any::<bool>(),
            any::<bool>(),
        )
            .prop_map(|(id, c, e, tol, rel, ok)| {
                let metric = if rel { ErrorMetric::Relative } else { ErrorMetric::Absolute };
                if ok {
                    CaseRecord::new(id, c, e, tol, metric)
                } else {
                    CaseRecord::failed(id, e, tol, metric, &Error::Domain("x".into()))
                }
            })
    }

    proptest! {
        #[test]
        fn json_round_trip(records in proptest::collection::vec(arb_record(), 0..8)) {
            let rep = VerificationReport::new("flatness", records);
            let back = VerificationReport::from_json(&rep.to_json()).unwrap();
            prop_assert_eq!(back, rep);
        }
    }
}
