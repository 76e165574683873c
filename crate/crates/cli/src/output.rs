//! Report payload and serialization. The JSON key set is stable:
//! {schema_version, config, eigenvalues, analytic, matches, checks,
//! pairs, table, verdict, metadata}. `metadata` holds the timestamp
//! and is the only non-deterministic field. CSV output flattens the
//! eigenvalue rows only.

use num_complex::Complex64;
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
pub struct EigRow {
    pub re: f64,
    pub im: f64,
    pub residual: Option<f64>,
    pub bound: bool,
}

#[derive(Serialize)]
pub struct AnalyticRow {
    pub n: i64,
    pub value: f64,
}

#[derive(Serialize)]
pub struct ComplexRow {
    pub re: f64,
    pub im: f64,
}

#[derive(Serialize)]
pub struct MatchRow {
    pub num: ComplexRow,
    pub ana: f64,
    pub dist: f64,
}

#[derive(Serialize)]
pub struct CheckRow {
    pub check: String,
    pub defects: Vec<f64>,
    pub grids: Vec<usize>,
    pub ratios: Vec<f64>,
    pub pass: bool,
    pub tolerance: f64,
}

#[derive(Serialize)]
pub struct PairRow {
    pub n1: u32,
    pub v21: f64,
    pub n2: u32,
    pub v22: f64,
    pub delta_n: u32,
    pub energy: f64,
}

#[derive(Serialize)]
pub struct TableRow {
    pub x: f64,
    pub m: f64,
    pub q: f64,
    pub v_re: f64,
    pub v_im: f64,
}

#[derive(Serialize)]
pub struct Payload {
    pub schema_version: u32,
    pub config: serde_json::Value,
    pub eigenvalues: Vec<EigRow>,
    pub analytic: Vec<AnalyticRow>,
    pub matches: Vec<MatchRow>,
    pub checks: Vec<CheckRow>,
    pub pairs: Vec<PairRow>,
    pub table: Vec<TableRow>,
    pub verdict: String,
}

impl Payload {
    pub fn new(config: serde_json::Value) -> Payload {
        Payload {
            schema_version: SCHEMA_VERSION,
            config,
            eigenvalues: Vec::new(),
            analytic: Vec::new(),
            matches: Vec::new(),
            checks: Vec::new(),
            pairs: Vec::new(),
            table: Vec::new(),
            verdict: "pass".into(),
        }
    }

    pub fn set_verdict(&mut self, pass: bool) {
        self.verdict = if pass { "pass" } else { "fail" }.into();
    }

    pub fn passed(&self) -> bool {
        self.verdict == "pass"
    }

    pub fn to_json(&self) -> String {
        // payload first, metadata appended so the deterministic part
        // is a stable prefix
        let mut value = serde_json::to_value(self).expect("payload serializes");
        let stamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        value["metadata"] = serde_json::json!({ "timestamp_unix_s": stamp });
        let mut text = serde_json::to_string_pretty(&value).expect("payload serializes");
        text.push('\n');
        text
    }

    pub fn to_csv(&self) -> String {
        let mut text = String::from("re,im,residual,bound\n");
        for row in &self.eigenvalues {
            let res = row.residual.map_or(String::new(), |r| format!("{r:e}"));
            text.push_str(&format!("{:e},{:e},{},{}\n", row.re, row.im, res, row.bound));
        }
        text
    }
}

pub fn eig_row(value: Complex64, residual: Option<f64>, bound: bool) -> EigRow {
    EigRow {
        re: value.re,
        im: value.im,
        residual,
        bound,
    }
}
