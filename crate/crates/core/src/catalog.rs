//! Published full-adder measurements and survey statistics over them.
//!
//! Two datasets ship with the crate: the eleven surveyed designs
//! ([`seed_catalog`]) and the per-design measurement rows of the
//! simplification campaigns ([`seed_results`]), together with the reported
//! improvement percentages ([`seed_improvements`]).

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::genlib::Completeness;
use crate::metrics::improvement_percent;
use crate::trit::CarryEncoding;

const DESIGNS: &str = include_str!("../data/designs.csv");
const DESIGN_SETUPS: &str = include_str!("../data/design_setups.csv");
const RESULTS: &str = include_str!("../data/results.csv");
const IMPROVEMENTS: &str = include_str!("../data/improvements.csv");

pub const HEADER: [&str; 12] = [
    "key",
    "year",
    "style",
    "technology",
    "lg_nm",
    "completeness",
    "carry_encoding",
    "cascade",
    "delay_ps",
    "power_uw",
    "pdp_fj",
    "transistors",
];

/// Relative tolerance of [`pdp_check`].
pub const PDP_TOLERANCE: f64 = 0.005;
/// Absolute tolerance, in percentage points, of [`improvement_check`].
pub const IMPROVEMENT_TOLERANCE: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    /// `row` counts data rows from 1; 0 means the header.
    #[error("row {row}: {message}")]
    Schema { row: usize, message: String },
    #[error("unknown field `{0}`")]
    UnknownField(String),
}

fn schema(row: usize, message: impl Into<String>) -> CatalogError {
    CatalogError::Schema { row, message: message.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cascade {
    Direct,
    TwoTha,
    Both,
}

impl Cascade {
    pub fn keyword(self) -> &'static str {
        match self {
            Cascade::Direct => "direct",
            Cascade::TwoTha => "two-tha",
            Cascade::Both => "both",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Setup {
    pub supply_volts: Option<f64>,
    pub frequency_mhz: Option<f64>,
    pub transitions: Option<u32>,
    pub load: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignRecord {
    pub key: String,
    pub year: u16,
    pub logic_style: String,
    pub technology: String,
    pub gate_length_nm: Option<u32>,
    pub completeness: Completeness,
    /// `None` for complete designs, whose carry is an ordinary trit.
    pub carry_encoding: Option<CarryEncoding>,
    pub cascade: Cascade,
    pub setup: Setup,
    pub delay_ps: Option<f64>,
    pub power_uw: Option<f64>,
    pub pdp_fj: Option<f64>,
    pub transistors: Option<u32>,
}

fn completeness_keyword(c: Completeness) -> &'static str {
    match c {
        Completeness::Complete => "complete",
        Completeness::Partial => "partial",
    }
}

fn carry_keyword(c: Option<CarryEncoding>) -> &'static str {
    match c {
        None => "n/a",
        Some(CarryEncoding::HalfVddHigh) => "half",
        Some(CarryEncoding::FullVddHigh) => "vdd",
    }
}

fn cell(rec: &csv::StringRecord, i: usize) -> Option<&str> {
    rec.get(i).map(str::trim).filter(|s| !s.is_empty())
}

fn number<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, row: usize) -> Result<Option<T>, CatalogError> {
    match cell(rec, i) {
        None => Ok(None),
        Some(s) => s
            .parse()
            .map(Some)
            .map_err(|_| schema(row, format!("{}: not a number: {s:?}", HEADER[i]))),
    }
}

fn required(rec: &csv::StringRecord, i: usize, row: usize) -> Result<&str, CatalogError> {
    cell(rec, i).ok_or_else(|| schema(row, format!("{} is required", HEADER[i])))
}

fn parse_row(rec: &csv::StringRecord, row: usize) -> Result<DesignRecord, CatalogError> {
    if rec.len() != HEADER.len() {
        return Err(schema(row, format!("expected {} fields, found {}", HEADER.len(), rec.len())));
    }
    let completeness = match required(rec, 5, row)? {
        "complete" => Completeness::Complete,
        "partial" => Completeness::Partial,
        other => return Err(schema(row, format!("completeness: {other:?}"))),
    };
    let carry_encoding = match cell(rec, 6) {
        None | Some("n/a") => None,
        Some("half") => Some(CarryEncoding::HalfVddHigh),
        Some("vdd") => Some(CarryEncoding::FullVddHigh),
        Some(other) => return Err(schema(row, format!("carry_encoding: {other:?}"))),
    };
    if completeness == Completeness::Complete && carry_encoding == Some(CarryEncoding::FullVddHigh) {
        return Err(schema(row, "a complete adder cannot use a binary carry"));
    }
    let cascade = match required(rec, 7, row)? {
        "direct" => Cascade::Direct,
        "two-tha" => Cascade::TwoTha,
        "both" => Cascade::Both,
        other => return Err(schema(row, format!("cascade: {other:?}"))),
    };
    let year = number::<u16>(rec, 1, row)?.ok_or_else(|| schema(row, "year is required"))?;
    let delay_ps: Option<f64> = number(rec, 8, row)?;
    let power_uw: Option<f64> = number(rec, 9, row)?;
    let pdp_fj: Option<f64> = number(rec, 10, row)?;
    for (name, v) in [("delay_ps", delay_ps), ("power_uw", power_uw), ("pdp_fj", pdp_fj)] {
        if let Some(v) = v {
            if !v.is_finite() || v < 0.0 {
                return Err(schema(row, format!("{name} must be non-negative, got {v}")));
            }
        }
    }
    Ok(DesignRecord {
        key: required(rec, 0, row)?.to_string(),
        year,
        logic_style: required(rec, 2, row)?.to_string(),
        technology: required(rec, 3, row)?.to_string(),
        gate_length_nm: number(rec, 4, row)?,
        completeness,
        carry_encoding,
        cascade,
        setup: Setup::default(),
        delay_ps,
        power_uw,
        pdp_fj,
        transistors: number(rec, 11, row)?,
    })
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new().flexible(true).from_reader(text.as_bytes())
}

/// Parses a catalog CSV with the exact [`HEADER`]. Empty cells are unknown.
pub fn load_catalog(text: &str) -> Result<Vec<DesignRecord>, CatalogError> {
    let mut rdr = reader(text);
    let header = rdr.headers().map_err(|e| schema(0, e.to_string()))?;
    if header.iter().map(str::trim).ne(HEADER) {
        return Err(schema(0, format!("header must be `{}`", HEADER.join(","))));
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| schema(i + 1, e.to_string()))?;
        out.push(parse_row(&rec, i + 1)?);
    }
    Ok(out)
}

fn load_setups(text: &str) -> Result<BTreeMap<String, Setup>, CatalogError> {
    let mut rdr = reader(text);
    let mut out = BTreeMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| schema(i + 1, e.to_string()))?;
        let bad = |what: &str| schema(i + 1, format!("setup {what}"));
        let parse_f = |j: usize| cell(&rec, j).map(|s| s.parse::<f64>().map_err(|_| bad("number"))).transpose();
        let setup = Setup {
            supply_volts: parse_f(1)?,
            frequency_mhz: parse_f(2)?,
            transitions: cell(&rec, 3).map(|s| s.parse().map_err(|_| bad("transitions"))).transpose()?,
            load: cell(&rec, 4).map(str::to_string),
        };
        out.insert(required(&rec, 0, i + 1)?.to_string(), setup);
    }
    Ok(out)
}

/// The eleven surveyed designs with their simulation setups.
pub fn seed_catalog() -> Vec<DesignRecord> {
    let mut records = load_catalog(DESIGNS).expect("shipped catalog parses");
    let setups = load_setups(DESIGN_SETUPS).expect("shipped setups parse");
    for r in &mut records {
        if let Some(s) = setups.get(&r.key) {
            r.setup = s.clone();
        }
    }
    records
}

/// Measurement rows of the complete, earlier-partial and simplified adders.
///
/// Keys read `t<table>.<role>.<design>`.
pub fn seed_results() -> Vec<DesignRecord> {
    load_catalog(RESULTS).expect("shipped results parse")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Metric {
    Delay,
    Power,
    Pdp,
    Transistors,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Metric::Delay, Metric::Power, Metric::Pdp, Metric::Transistors];

    pub fn keyword(self) -> &'static str {
        match self {
            Metric::Delay => "delay",
            Metric::Power => "power",
            Metric::Pdp => "pdp",
            Metric::Transistors => "transistors",
        }
    }

    pub fn of(self, r: &DesignRecord) -> Option<f64> {
        match self {
            Metric::Delay => r.delay_ps,
            Metric::Power => r.power_uw,
            Metric::Pdp => r.pdp_fj,
            Metric::Transistors => r.transistors.map(f64::from),
        }
    }
}

/// A reported "Improvement" row: percentages of `candidate` over `baseline`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportedImprovement {
    pub table: u8,
    pub baseline: String,
    pub candidate: String,
    pub percent: BTreeMap<Metric, f64>,
}

pub fn seed_improvements() -> Vec<ReportedImprovement> {
    let mut rdr = reader(IMPROVEMENTS);
    rdr.records()
        .map(|rec| {
            let rec = rec.expect("shipped improvements parse");
            let mut percent = BTreeMap::new();
            for (j, m) in Metric::ALL.into_iter().enumerate() {
                if let Some(v) = cell(&rec, 3 + j) {
                    percent.insert(m, v.parse().expect("numeric percentage"));
                }
            }
            ReportedImprovement {
                table: rec[0].parse().expect("table number"),
                baseline: rec[1].to_string(),
                candidate: rec[2].to_string(),
                percent,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Share {
    pub count: usize,
    pub percent: f64,
}

pub const CATEGORICAL_FIELDS: [&str; 7] =
    ["year", "style", "technology", "lg_nm", "completeness", "carry_encoding", "cascade"];

fn category(r: &DesignRecord, field: &str) -> Option<String> {
    Some(match field {
        "year" => r.year.to_string(),
        "style" => r.logic_style.clone(),
        "technology" => r.technology.clone(),
        "lg_nm" => r.gate_length_nm.map_or_else(|| "unknown".to_string(), |g| g.to_string()),
        "completeness" => completeness_keyword(r.completeness).to_string(),
        "carry_encoding" => carry_keyword(r.carry_encoding).to_string(),
        "cascade" => r.cascade.keyword().to_string(),
        _ => return None,
    })
}

/// Counts records per category of a categorical field.
pub fn aggregate(records: &[DesignRecord], field: &str) -> Result<BTreeMap<String, Share>, CatalogError> {
    if !CATEGORICAL_FIELDS.contains(&field) {
        return Err(CatalogError::UnknownField(field.to_string()));
    }
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for r in records {
        *counts.entry(category(r, field).expect("known field")).or_default() += 1;
    }
    let total = records.len() as f64;
    Ok(counts
        .into_iter()
        .map(|(k, count)| (k, Share { count, percent: count as f64 * 100.0 / total }))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdpCheck {
    pub key: String,
    pub recomputed_fj: f64,
    pub reported_fj: Option<f64>,
    pub consistent: bool,
}

/// Recomputes delay × power for every record that has both.
///
/// ps × µW is 1e-18 J, so the product is divided by 1000 to get fJ. Rows
/// without a reported PDP are trivially consistent.
pub fn pdp_check(records: &[DesignRecord]) -> Vec<PdpCheck> {
    records
        .iter()
        .filter_map(|r| {
            let recomputed_fj = r.delay_ps? * r.power_uw? / 1000.0;
            let consistent = match r.pdp_fj {
                None => true,
                Some(p) if p == 0.0 => recomputed_fj == 0.0,
                Some(p) => ((recomputed_fj - p) / p).abs() <= PDP_TOLERANCE,
            };
            Some(PdpCheck { key: r.key.clone(), recomputed_fj, reported_fj: r.pdp_fj, consistent })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImprovementCheck {
    pub table: u8,
    pub metric: Metric,
    pub recomputed: f64,
    pub reported: f64,
    pub consistent: bool,
}

impl fmt::Display for ImprovementCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "table {} {}: recomputed {:.2}%, reported {}%",
            self.table,
            self.metric.keyword(),
            self.recomputed,
            self.reported
        )
    }
}

/// Recomputes each reported improvement percentage from the measurement rows.
///
/// A reported cell whose rows lack the metric is reported inconsistent with a
/// NaN recomputation.
pub fn improvement_check(results: &[DesignRecord], reported: &[ReportedImprovement]) -> Vec<ImprovementCheck> {
    let by_key: BTreeMap<&str, &DesignRecord> = results.iter().map(|r| (r.key.as_str(), r)).collect();
    let mut out = Vec::new();
    for row in reported {
        for (&metric, &pct) in &row.percent {
            let old = by_key.get(row.baseline.as_str()).and_then(|r| metric.of(r));
            let new = by_key.get(row.candidate.as_str()).and_then(|r| metric.of(r));
            let recomputed = match (old, new) {
                (Some(o), Some(n)) => improvement_percent(o, n),
                _ => f64::NAN,
            };
            out.push(ImprovementCheck {
                table: row.table,
                metric,
                recomputed,
                reported: pct,
                consistent: (recomputed - pct).abs() <= IMPROVEMENT_TOLERANCE,
            });
        }
    }
    out
}
