//! Comparison of solver output against published cut values.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::report::Record;

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct Reference {
    pub instance: String,
    pub expected_cut: f64,
    pub gate: bool,
    /// Accepted relative shortfall; `0` demands the exact value.
    #[serde(default)]
    pub tolerance: f64,
}

pub fn read_reference(path: &Path) -> Result<Vec<Reference>, String> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .map_err(|e| format!("cannot read reference file {}: {e}", path.display()))?;
    rdr.deserialize()
        .collect::<Result<Vec<Reference>, _>>()
        .map_err(|e| format!("bad reference file {}: {e}", path.display()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Match,
    Better,
    Within,
    Miss,
    NoReference,
    Error,
}

impl Status {
    fn passes(self) -> bool {
        matches!(self, Status::Match | Status::Better | Status::Within)
    }

    fn as_str(self) -> &'static str {
        match self {
            Status::Match => "match",
            Status::Better => "better",
            Status::Within => "within",
            Status::Miss => "miss",
            Status::NoReference => "no-reference",
            Status::Error => "error",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub instance: String,
    /// An algorithm name, or `BEST` for the best cut over the algorithms run.
    pub algorithm: String,
    pub cut: f64,
    pub expected: Option<f64>,
    pub status: Status,
    /// Whether this row counts towards the exit code.
    pub gate: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<f64>,
}

fn classify(cut: f64, reference: Option<&Reference>) -> Status {
    match reference {
        None => Status::NoReference,
        Some(r) if cut == r.expected_cut => Status::Match,
        Some(r) if cut > r.expected_cut => Status::Better,
        Some(r) if cut >= r.expected_cut * (1.0 - r.tolerance) => Status::Within,
        Some(_) => Status::Miss,
    }
}

/// Per-algorithm rows followed by one `BEST` row per instance; only the
/// `BEST` rows of gate-marked instances are gated.
pub fn compare(records: &[Record], refs: &[Reference]) -> Vec<BenchRow> {
    let by_name: BTreeMap<&str, &Reference> = refs.iter().map(|r| (r.instance.as_str(), r)).collect();
    let mut grouped: BTreeMap<&str, Vec<&Record>> = BTreeMap::new();
    for r in records {
        grouped.entry(r.instance.as_str()).or_default().push(r);
    }
    let mut rows = Vec::new();
    for (instance, runs) in grouped {
        let reference = by_name.get(instance).copied();
        let expected = reference.map(|r| r.expected_cut);
        for r in &runs {
            let status = if r.error.is_empty() { classify(r.cut_weight, reference) } else { Status::Error };
            rows.push(BenchRow {
                instance: instance.to_string(),
                algorithm: r.algorithm.clone(),
                cut: r.cut_weight,
                expected,
                status,
                gate: false,
                time: r.wall_time,
            });
        }
        let ok: Vec<&&Record> = runs.iter().filter(|r| r.error.is_empty()).collect();
        let best = ok.iter().map(|r| r.cut_weight).fold(f64::NEG_INFINITY, f64::max);
        let (cut, status) = if ok.is_empty() { (0.0, Status::Error) } else { (best, classify(best, reference)) };
        rows.push(BenchRow {
            instance: instance.to_string(),
            algorithm: "BEST".into(),
            cut,
            expected,
            status,
            gate: reference.is_some_and(|r| r.gate),
            time: ok.iter().map(|r| r.wall_time).sum(),
        });
    }
    rows
}

pub fn gate_passed(rows: &[BenchRow]) -> bool {
    rows.iter().filter(|r| r.gate).all(|r| r.status.passes())
}

pub fn to_table(rows: &[BenchRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<12} {:<7} {:>14} {:>14} {:<13} {:<5} {:>9}",
        "instance", "alg", "cut", "expected", "match?", "gate", "time[s]"
    );
    for r in rows {
        let expected = r.expected.map(|e| e.to_string()).unwrap_or_else(|| "-".into());
        let time = r.time.map(|t| format!("{t:.3}")).unwrap_or_default();
        let gate = if r.gate { "yes" } else { "" };
        let _ = writeln!(
            out,
            "{:<12} {:<7} {:>14} {:>14} {:<13} {:<5} {:>9}",
            r.instance,
            r.algorithm,
            r.cut,
            expected,
            r.status.as_str(),
            gate,
            time
        );
    }
    out
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["instance", "algorithm", "cut", "expected", "status", "gate"])
        .expect("in-memory writer");
    for r in rows {
        w.write_record([
            r.instance.clone(),
            r.algorithm.clone(),
            r.cut.to_string(),
            r.expected.map(|e| e.to_string()).unwrap_or_default(),
            r.status.as_str().to_string(),
            r.gate.to_string(),
        ])
        .expect("in-memory writer");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("csv is utf-8")
}

pub fn to_json(rows: &[BenchRow]) -> String {
    let mut s = serde_json::to_string_pretty(rows).expect("rows serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(instance: &str, alg: &str, cut: f64) -> Record {
        let mut r = Record::failed(instance, alg, 3, "");
        r.cut_weight = cut;
        r
    }

    fn reference(instance: &str, expected: f64, gate: bool, tolerance: f64) -> Reference {
        Reference { instance: instance.into(), expected_cut: expected, gate, tolerance }
    }

    #[test]
    fn statuses_and_gate() {
        let refs = [reference("a", 10.0, true, 0.0), reference("b", 100.0, true, 0.01)];
        let records = [rec("a", "CDA1", 9.0), rec("a", "CDA2", 10.0), rec("b", "CDA1", 99.5), rec("c", "CDA1", 1.0)];
        let rows = compare(&records, &refs);
        let st: Vec<(&str, &str, Status)> = rows.iter().map(|r| (r.instance.as_str(), r.algorithm.as_str(), r.status)).collect();
        assert_eq!(
            st,
            vec![
                ("a", "CDA1", Status::Miss),
                ("a", "CDA2", Status::Match),
                ("a", "BEST", Status::Match),
                ("b", "CDA1", Status::Within),
                ("b", "BEST", Status::Within),
                ("c", "CDA1", Status::NoReference),
                ("c", "BEST", Status::NoReference),
            ]
        );
        assert!(gate_passed(&rows));
        let rows = compare(&[rec("a", "CDA1", 9.0)], &refs);
        assert!(!gate_passed(&rows));
    }
}
