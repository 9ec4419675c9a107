//! Machine-readable run reports.
//!
//! JSON output is a single compact object whose keys follow struct field
//! order. Every real is written with 17 significant digits, which round-trips
//! any `f64` exactly.

use std::fmt::Write as _;
use std::io;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum LogBase {
    Nats,
    Bits,
}

impl LogBase {
    /// Factor applied to a value in nats.
    pub fn factor(self) -> f64 {
        match self {
            LogBase::Nats => 1.0,
            LogBase::Bits => 1.0 / std::f64::consts::LN_2,
        }
    }
}

/// Resolved run configuration, echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub dims: Vec<usize>,
    pub p: f64,
    pub seed: u64,
    pub restarts: usize,
    pub samples: usize,
    pub max_iters: usize,
    pub initial_step: f64,
    pub step_shrink: f64,
    pub converge_tol: f64,
    pub min_step: f64,
    pub fd_step: f64,
    pub tol: f64,
    pub gap_lower: f64,
    pub gap_upper: f64,
    pub threads: usize,
    pub allow_p_above_2: bool,
    pub format: OutputFormat,
    pub log_base: LogBase,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CaseInput {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subset: Option<u32>,
}

impl CaseInput {
    fn describe(&self) -> String {
        let mut parts = Vec::new();
        if let Some(d) = &self.dims {
            let ds: Vec<String> = d.iter().map(|x| x.to_string()).collect();
            parts.push(format!("dims={}", ds.join(";")));
        }
        if let Some(p) = self.p {
            parts.push(format!("p={p}"));
        }
        if let Some(s) = self.sample {
            parts.push(format!("sample={s}"));
        }
        if let Some(s) = self.subset {
            parts.push(format!("subset={s:#b}"));
        }
        parts.join(" ")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Case {
    pub id: String,
    pub input: CaseInput,
    pub expected: Option<f64>,
    pub actual: f64,
    pub abs_error: f64,
    pub pass: bool,
    /// Entropy-valued case; rescaled when reporting in bits.
    #[serde(skip)]
    pub entropic: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: bool,
    pub max_abs_error: f64,
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub config: ConfigEcho,
    pub cases: Vec<Case>,
    pub summary: Summary,
}

impl Report {
    /// Builds the summary from the cases: `pass` iff every case passes.
    pub fn new(command: &str, config: ConfigEcho, cases: Vec<Case>, wall_time_ms: f64) -> Self {
        let summary = summarize(&cases, wall_time_ms);
        Self {
            command: command.to_string(),
            config,
            cases,
            summary,
        }
    }

    /// Copy with entropy-valued fields expressed in `base`.
    pub fn in_units(&self, base: LogBase) -> Report {
        let f = base.factor();
        let cases: Vec<Case> = self
            .cases
            .iter()
            .map(|c| {
                if !c.entropic {
                    return c.clone();
                }
                Case {
                    expected: c.expected.map(|e| e * f),
                    actual: c.actual * f,
                    abs_error: c.abs_error * f,
                    ..c.clone()
                }
            })
            .collect();
        let mut summary = summarize(&cases, self.summary.wall_time_ms);
        summary.pass = self.summary.pass;
        Report {
            cases,
            summary,
            ..self.clone()
        }
    }
}

fn summarize(cases: &[Case], wall_time_ms: f64) -> Summary {
    Summary {
        pass: cases.iter().all(|c| c.pass),
        max_abs_error: cases.iter().map(|c| c.abs_error).fold(0.0, f64::max),
        wall_time_ms,
    }
}

/// serde_json formatter writing floats as `{:.16e}`.
struct FixedDigits;

impl serde_json::ser::Formatter for FixedDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

pub fn to_json(r: &Report) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedDigits);
    r.serialize(&mut ser).expect("report serialization is infallible");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn real(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn to_csv(r: &Report) -> String {
    let mut out = String::from("id,input,expected,actual,abs_error,pass\n");
    for c in &r.cases {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            csv_field(&c.id),
            csv_field(&c.input.describe()),
            c.expected.map(real).unwrap_or_default(),
            real(c.actual),
            real(c.abs_error),
            c.pass
        );
    }
    out
}

pub fn to_text(r: &Report) -> String {
    let mut out = String::new();
    let unit = match r.config.log_base {
        LogBase::Nats => "nats",
        LogBase::Bits => "bits",
    };
    let _ = writeln!(out, "command: {}", r.command);
    let dims: Vec<String> = r.config.dims.iter().map(|d| d.to_string()).collect();
    let _ = writeln!(
        out,
        "dims: {}  p: {}  seed: {}",
        dims.join(","),
        r.config.p,
        r.config.seed
    );
    for c in &r.cases {
        let expected = c.expected.map(|e| format!("{e:.12}")).unwrap_or_else(|| "-".into());
        let _ = writeln!(
            out,
            "  [{}] {:<24} expected {:>18} actual {:>18.12} err {:.3e}{}",
            if c.pass { "ok" } else { "FAIL" },
            c.id,
            expected,
            c.actual,
            c.abs_error,
            if c.entropic {
                format!(" ({unit})")
            } else {
                String::new()
            }
        );
    }
    let _ = writeln!(
        out,
        "summary: {} ({} cases, max abs error {:.3e}, {:.1} ms)",
        if r.summary.pass { "PASS" } else { "FAIL" },
        r.cases.len(),
        r.summary.max_abs_error,
        r.summary.wall_time_ms
    );
    out
}

pub fn emit_report(r: &Report, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => {
            let mut s = to_json(r);
            s.push('\n');
            s
        }
        OutputFormat::Csv => to_csv(r),
        OutputFormat::Text => to_text(r),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn echo() -> ConfigEcho {
        ConfigEcho {
            dims: vec![3, 3],
            p: 1.0,
            seed: 7,
            restarts: 32,
            samples: 2,
            max_iters: 2000,
            initial_step: 0.1,
            step_shrink: 0.5,
            converge_tol: 1e-12,
            min_step: 1e-14,
            fd_step: 1e-6,
            tol: 1e-10,
            gap_lower: 1e-6,
            gap_upper: 1e-4,
            threads: 1,
            allow_p_above_2: false,
            format: OutputFormat::Json,
            log_base: LogBase::Nats,
        }
    }

    fn case(id: &str, actual: f64, err: f64, pass: bool) -> Case {
        Case {
            id: id.into(),
            input: CaseInput {
                dims: Some(vec![3, 3]),
                sample: Some(0),
                ..Default::default()
            },
            expected: Some(actual - err),
            actual,
            abs_error: err,
            pass,
            entropic: true,
        }
    }

    #[test]
    fn empty_report_passes() {
        let r = Report::new("meo", echo(), vec![], 0.0);
        assert!(r.summary.pass);
        assert_eq!(r.summary.max_abs_error, 0.0);
        let parsed: serde_json::Value = serde_json::from_str(&to_json(&r)).unwrap();
        assert_eq!(parsed["cases"].as_array().unwrap().len(), 0);
    }

    #[test]
    fn one_failing_case_fails_summary() {
        let r = Report::new(
            "meo",
            echo(),
            vec![case("a", 1.0, 0.0, true), case("b", 2.0, 0.5, false)],
            0.0,
        );
        assert!(!r.summary.pass);
        assert_eq!(r.summary.max_abs_error, 0.5);
    }

    #[test]
    fn json_has_fixed_key_order() {
        let r = Report::new("meo", echo(), vec![case("a", std::f64::consts::LN_2, 1e-13, true)], 0.0);
        let s = to_json(&r);
        let keys = ["\"command\"", "\"config\"", "\"cases\"", "\"summary\""];
        let pos: Vec<usize> = keys.iter().map(|k| s.find(k).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]));
        let case_keys = [
            "\"id\"",
            "\"input\"",
            "\"expected\"",
            "\"actual\"",
            "\"abs_error\"",
            "\"pass\"",
        ];
        let cpos: Vec<usize> = case_keys.iter().map(|k| s.find(k).unwrap()).collect();
        assert!(cpos.windows(2).all(|w| w[0] < w[1]));
        assert!(s.contains("6.9314718055994529e-1"));
    }

    #[test]
    fn json_round_trip_is_exact() {
        let vals = [
            std::f64::consts::PI,
            1.0 / 3.0,
            2.0f64.ln() * 2.0,
            5e-324,
            1.7976931348623157e308,
        ];
        let cases: Vec<Case> = vals.iter().map(|&v| case("x", v, v / 7.0, true)).collect();
        let r = Report::new("verify-identity", echo(), cases, 12.25);
        let back: Report = serde_json::from_str(&to_json(&r)).unwrap();
        for (a, b) in r.cases.iter().zip(&back.cases) {
            assert_eq!(a.actual.to_bits(), b.actual.to_bits());
            assert_eq!(a.abs_error.to_bits(), b.abs_error.to_bits());
            assert_eq!(a.expected.map(f64::to_bits), b.expected.map(f64::to_bits));
        }
        assert_eq!(back.summary, r.summary);
        assert_eq!(back.config, r.config);
    }

    #[test]
    fn bits_rescale_only_entropic_cases() {
        let mut plain = case("purity", 0.25, 0.0, true);
        plain.entropic = false;
        let r = Report::new("meo", echo(), vec![case("meo", 2f64.ln(), 0.0, true), plain], 0.0);
        let b = r.in_units(LogBase::Bits);
        assert!((b.cases[0].actual - 1.0).abs() < 1e-15);
        assert_eq!(b.cases[1].actual, 0.25);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let r = Report::new("meo", echo(), vec![case("a", 1.0, 0.0, true)], 0.0);
        let s = to_csv(&r);
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "id,input,expected,actual,abs_error,pass");
        assert_eq!(lines.len(), 2);
        assert!(lines[1].starts_with("a,dims=3;3 sample=0,"));
    }
}
