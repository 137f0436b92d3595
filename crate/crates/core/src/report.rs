//! JSON and CSV reports.
//!
//! Every job report has the fields `job, claim, paper_ref, samples, measured,
//! tolerance, verdict, witnesses`, in that order. `measured` and `tolerance`
//! are objects with sorted keys, and nothing time- or machine-dependent is
//! recorded, so identical inputs give byte-identical output.

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::Result;
use crate::jordan::JordanInvariants;
use crate::probe::{Holds, ProbeConfig, ProbeVerdict, Sample, SampleRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobReport {
    pub job: String,
    pub claim: String,
    pub paper_ref: String,
    pub samples: usize,
    pub measured: Map<String, Value>,
    pub tolerance: Map<String, Value>,
    pub verdict: Verdict,
    pub witnesses: Vec<Value>,
}

impl JobReport {
    pub fn new(job: &str, claim: &str, paper_ref: &str) -> Self {
        JobReport {
            job: job.to_string(),
            claim: claim.to_string(),
            paper_ref: paper_ref.to_string(),
            samples: 0,
            measured: Map::new(),
            tolerance: Map::new(),
            verdict: Verdict::Pass,
            witnesses: Vec::new(),
        }
    }

    fn fail(&mut self) {
        self.verdict = Verdict::Fail;
    }

    /// Records `value` and fails the job unless `value <= tol`.
    pub fn at_most(&mut self, name: &str, value: f64, tol: f64) -> bool {
        self.measured.insert(name.to_string(), json!(value));
        self.tolerance.insert(name.to_string(), json!(tol));
        let ok = value <= tol;
        if !ok {
            self.fail();
        }
        ok
    }

    /// Records `value` and fails the job unless it equals `expected`.
    pub fn expect<T: Serialize + PartialEq>(&mut self, name: &str, value: T, expected: T) -> bool {
        let ok = value == expected;
        self.measured.insert(name.to_string(), json!(value));
        self.tolerance.insert(name.to_string(), json!({ "expected": expected }));
        if !ok {
            self.fail();
        }
        ok
    }

    /// Records a value that carries no pass/fail weight.
    pub fn note<T: Serialize>(&mut self, name: &str, value: T) {
        self.measured.insert(name.to_string(), json!(value));
    }

    pub fn error(&mut self, msg: String) {
        self.measured.insert("error".into(), json!(msg));
        self.fail();
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub config: ProbeConfig,
    pub passed: usize,
    pub failed: usize,
    pub inconclusive: usize,
    pub jobs: Vec<JobReport>,
}

impl SuiteReport {
    pub fn new(suite: &str, config: &ProbeConfig, jobs: Vec<JobReport>) -> Self {
        let count = |v: Verdict| jobs.iter().filter(|j| j.verdict == v).count();
        SuiteReport {
            suite: suite.to_string(),
            config: config.clone(),
            passed: count(Verdict::Pass),
            failed: count(Verdict::Fail),
            inconclusive: count(Verdict::Inconclusive),
            jobs,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.failed == 0 && self.inconclusive == 0
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// A probe verdict in the job-report schema.
pub fn probe_report(source: &str, verdict: &ProbeVerdict, cfg: &ProbeConfig) -> JobReport {
    let claim = format!(
        "{} Jordan {} on {source}",
        verdict.kind,
        match verdict.property {
            crate::probe::Property::Osserman => "Osserman",
            crate::probe::Property::Ip => "Ivanov-Petrova",
        }
    );
    let mut r = JobReport::new(
        "probe",
        &claim,
        "definition: Jordan normal form constant on the unit pseudo-sphere or the oriented 2-plane Grassmannian",
    );
    r.samples = verdict.stats.samples;
    r.note("holds", verdict.holds.as_str());
    r.note("stats", &verdict.stats);
    r.note("reference", &verdict.reference);
    r.tolerance.insert("tolerances".into(), json!(cfg.tol));
    r.tolerance.insert("box_radius".into(), json!(cfg.box_radius));
    r.tolerance.insert("cone_margin".into(), json!(cfg.cone_margin));
    r.verdict = match verdict.holds {
        Holds::True => Verdict::Pass,
        Holds::False => Verdict::Fail,
        Holds::Inconclusive => Verdict::Inconclusive,
    };
    r.witnesses = verdict
        .witnesses
        .iter()
        .map(|w| serde_json::to_value(w).expect("witnesses serialize"))
        .collect();
    r
}

fn fmt_vec(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(" ")
}

fn cluster_summary(fp: &JordanInvariants) -> String {
    fp.clusters
        .iter()
        .map(|c| {
            if c.im == 0.0 {
                format!("{:e}x{}", c.re, c.multiplicity)
            } else {
                format!("{:e}{:+e}ix{}", c.re, c.im, c.multiplicity)
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Writes `header` and `rows` as CSV.
pub fn csv_table<R, S>(header: &[&str], rows: R) -> Result<String>
where
    R: IntoIterator,
    R::Item: IntoIterator<Item = S>,
    S: AsRef<[u8]>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// One CSV row per sample: point, sample coordinates, cluster summary and
/// overall rank chain. Vector-valued cells are space separated.
pub fn records_csv(records: &[SampleRecord], points: &[Option<Vec<f64>>]) -> Result<String> {
    let rows = records.iter().map(|r| {
        let coords = r
            .point
            .and_then(|p| points.get(p).cloned().flatten())
            .map(|c| fmt_vec(&c))
            .unwrap_or_default();
        let (vector, e1, e2) = match &r.sample {
            Sample::Vector(v) => (fmt_vec(v), String::new(), String::new()),
            Sample::Plane([a, b]) => (String::new(), fmt_vec(a), fmt_vec(b)),
        };
        let (clusters, chain) = match &r.fingerprint {
            Some(fp) => (cluster_summary(fp), fp.chain_label().replace(',', " ")),
            None => (String::new(), String::new()),
        };
        let source = match r.source {
            crate::probe::Source::Random => "random",
            crate::probe::Source::Structured => "structured",
        };
        [
            r.point.map(|p| p.to_string()).unwrap_or_default(),
            coords,
            r.index.to_string(),
            source.to_string(),
            vector,
            e1,
            e2,
            clusters,
            chain,
            r.error.clone().unwrap_or_default(),
        ]
    });
    csv_table(
        &["point", "coordinates", "index", "source", "vector", "plane_e1", "plane_e2", "clusters", "rank_chain", "error"],
        rows,
    )
}

/// Job reports flattened to CSV, one row per measured quantity.
pub fn jobs_csv(jobs: &[JobReport]) -> Result<String> {
    let rows = jobs.iter().flat_map(|j| {
        let verdict = serde_json::to_value(j.verdict).expect("verdict serializes");
        let verdict = verdict.as_str().unwrap_or_default().to_string();
        j.measured.iter().map(move |(k, v)| {
            let tol = j.tolerance.get(k).map(|t| t.to_string()).unwrap_or_default();
            [j.job.clone(), verdict.clone(), j.samples.to_string(), k.clone(), v.to_string(), tol]
        })
    });
    csv_table(&["job", "verdict", "samples", "quantity", "measured", "tolerance"], rows)
}
