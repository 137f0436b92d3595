//! Sampling deciders for the Jordan Osserman and Jordan Ivanov-Petrova
//! conditions.
//!
//! A property "holds" when every sampled fingerprint equals the reference
//! fingerprint (the first sample), so `holds = true` means that no violation
//! was found among the samples drawn, never a proof.
//!
//! Unit vectors of one causal kind are drawn on the pseudo-sphere through a
//! `g`-orthonormal frame: the coefficients along the other kind are uniform in
//! `[-box, box]`, and the remaining coefficients are a uniform direction
//! scaled onto the pseudo-sphere. In addition, each probe evaluates the
//! structured candidates built from chart coordinates (sums of at most three
//! basis vectors with signs), which is where the degenerate directions of
//! polynomial metrics tend to live. Every sample draws from its own ChaCha
//! stream derived from `(seed, point, kind, index)`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::curvature::{CurvatureTensor, OrientedPlane};
use crate::error::{Error, Result};
use crate::exec::map_indexed;
use crate::geometry::{riemann_at, sample_points, MetricField};
use crate::jordan::{jordan_equal, jordan_invariants, JordanInvariants};
use crate::linalg::{CausalKind, IndefiniteInnerProduct, Tolerances};
use crate::random::{stream_rng, unit_direction};

/// Raw draws allowed per requested plane before giving up.
const MAX_PLANE_DRAWS: usize = 10_000;
/// Witnesses kept in a verdict; the total count is in the stats.
pub const MAX_WITNESSES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Property {
    /// Jacobi operator on unit vectors
    Osserman,
    /// skew-symmetric curvature operator on oriented 2-planes
    Ip,
}

impl Property {
    pub fn as_str(self) -> &'static str {
        match self {
            Property::Osserman => "osserman",
            Property::Ip => "ip",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Property {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "osserman" => Ok(Property::Osserman),
            "ip" => Ok(Property::Ip),
            _ => Err(Error::Parse(format!("unknown property `{s}` (expected osserman or ip)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub n_vectors: usize,
    pub n_planes: usize,
    pub n_points: usize,
    pub seed: u64,
    pub tol: Tolerances,
    /// Bound on the frame coefficients along the opposite causal kind.
    pub box_radius: f64,
    /// Structured candidates, and second plane vectors after orthogonalizing,
    /// need `|g(v,v)| >= cone_margin * |v|^2`.
    pub cone_margin: f64,
    /// Also evaluate the chart-coordinate candidates.
    pub structured: bool,
    pub parallel: bool,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            n_vectors: 100,
            n_planes: 100,
            n_points: 10,
            seed: 0x5EED,
            tol: Tolerances::default(),
            box_radius: 2.0,
            cone_margin: 1e-3,
            structured: true,
            parallel: true,
        }
    }
}

impl ProbeConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Parse(format!("invalid probe configuration: {what}")));
        if self.n_vectors == 0 || self.n_planes == 0 || self.n_points == 0 {
            return bad("sample counts must be at least 1");
        }
        if !(self.box_radius > 0.0) {
            return bad("box radius must be positive");
        }
        let t = &self.tol;
        if !(t.rank_rel > 0.0 && t.eig > 0.0 && t.null_cone > 0.0 && t.zero_abs > 0.0) {
            return bad("tolerances must be positive");
        }
        if !(self.cone_margin > 0.0 && self.cone_margin < 1.0) {
            return bad("cone margin must lie in (0, 1)");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Holds {
    True,
    False,
    Inconclusive,
}

impl Holds {
    pub fn as_str(self) -> &'static str {
        match self {
            Holds::True => "true",
            Holds::False => "false",
            Holds::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Random,
    Structured,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sample {
    Vector(Vec<f64>),
    Plane([Vec<f64>; 2]),
}

/// One evaluated sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub point: Option<usize>,
    pub index: usize,
    pub source: Source,
    pub sample: Sample,
    pub fingerprint: Option<JordanInvariants>,
    pub error: Option<String>,
}

/// A sample whose fingerprint differs from the reference of its point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub point: Option<usize>,
    pub coordinates: Option<Vec<f64>>,
    pub index: usize,
    pub source: Source,
    pub sample: Sample,
    pub fingerprint: JordanInvariants,
    pub reference: JordanInvariants,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ProbeStats {
    pub points: usize,
    pub samples: usize,
    pub random: usize,
    pub structured: usize,
    pub mismatches: usize,
    pub errors: usize,
    /// Overall rank chains of all fingerprints, with counts.
    pub chain_histogram: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeVerdict {
    pub property: Property,
    pub kind: CausalKind,
    pub holds: Holds,
    /// Reference fingerprint at the first point.
    pub reference: Option<JordanInvariants>,
    pub witnesses: Vec<Witness>,
    pub stats: ProbeStats,
    #[serde(skip)]
    pub records: Vec<SampleRecord>,
}

impl ProbeVerdict {
    /// Every overall rank chain observed.
    pub fn chains(&self) -> Vec<Vec<usize>> {
        self.records
            .iter()
            .filter_map(|r| r.fingerprint.as_ref())
            .map(|f| f.overall_rank_chain.clone())
            .collect()
    }
}

fn stream_id(point: usize, tag: u64, index: usize) -> u64 {
    ((point as u64) << 32) | (tag << 28) | index as u64
}

fn tag(property: Property, kind: CausalKind) -> u64 {
    match (property, kind) {
        (Property::Osserman, CausalKind::Spacelike) => 1,
        (Property::Osserman, CausalKind::Timelike) => 2,
        (Property::Ip, CausalKind::Spacelike) => 3,
        (Property::Ip, CausalKind::Timelike) => 4,
    }
}

fn check_sphere(g: &IndefiniteInnerProduct, kind: CausalKind) -> Result<()> {
    let sig = g.signature();
    let have = match kind {
        CausalKind::Spacelike => sig.q,
        CausalKind::Timelike => sig.p,
    };
    if have == 0 {
        return Err(Error::EmptyPseudoSphere { kind, p: sig.p, q: sig.q });
    }
    Ok(())
}

fn check_planes(g: &IndefiniteInnerProduct, kind: CausalKind) -> Result<()> {
    let sig = g.signature();
    let have = match kind {
        CausalKind::Spacelike => sig.q,
        CausalKind::Timelike => sig.p,
    };
    if have < 2 {
        return Err(Error::NoPlanes { kind, p: sig.p, q: sig.q });
    }
    Ok(())
}

/// Orthonormal frame split into timelike and spacelike columns.
struct Frame {
    timelike: DMatrix<f64>,
    spacelike: DMatrix<f64>,
}

impl Frame {
    fn new(g: &IndefiniteInnerProduct) -> Self {
        let (cols, _) = g.orthonormal_frame();
        let p = g.signature().p;
        let m = g.dim();
        Frame {
            timelike: cols.columns(0, p).into_owned(),
            spacelike: cols.columns(p, m - p).into_owned(),
        }
    }

    fn draw<R: Rng>(&self, rng: &mut R, kind: CausalKind, radius: f64) -> DVector<f64> {
        let (same, other) = match kind {
            CausalKind::Spacelike => (&self.spacelike, &self.timelike),
            CausalKind::Timelike => (&self.timelike, &self.spacelike),
        };
        let b = DVector::from_fn(other.ncols(), |_, _| rng.random_range(-radius..=radius));
        let u = unit_direction(rng, same.ncols()) * (1.0 + b.norm_squared()).sqrt();
        same * u + other * b
    }
}

fn unit<R: Rng>(
    g: &IndefiniteInnerProduct,
    frame: &Frame,
    rng: &mut R,
    kind: CausalKind,
    cfg: &ProbeConfig,
) -> DVector<f64> {
    loop {
        let v = frame.draw(rng, kind, cfg.box_radius);
        let n = g.inner_unchecked(&v, &v);
        if n * kind.sign() > cfg.tol.null_cone * v.norm_squared() {
            return v / n.abs().sqrt();
        }
    }
}

fn vectors_at(g: &IndefiniteInnerProduct, kind: CausalKind, cfg: &ProbeConfig, point: usize) -> Vec<DVector<f64>> {
    let frame = Frame::new(g);
    let t = tag(Property::Osserman, kind);
    (0..cfg.n_vectors)
        .map(|i| {
            let mut rng = stream_rng(cfg.seed, stream_id(point, t, i));
            unit(g, &frame, &mut rng, kind, cfg)
        })
        .collect()
}

fn planes_at(
    g: &IndefiniteInnerProduct,
    kind: CausalKind,
    cfg: &ProbeConfig,
    point: usize,
) -> Result<Vec<OrientedPlane>> {
    let frame = Frame::new(g);
    let t = tag(Property::Ip, kind);
    (0..cfg.n_planes)
        .map(|i| {
            let mut rng = stream_rng(cfg.seed, stream_id(point, t, i));
            for _ in 0..MAX_PLANE_DRAWS {
                let u = unit(g, &frame, &mut rng, kind, cfg);
                let v = unit(g, &frame, &mut rng, kind, cfg);
                if let Ok(pl) = OrientedPlane::from_span(g, &u, &v, cfg.cone_margin) {
                    if pl.kind == kind {
                        return Ok(pl);
                    }
                }
            }
            Err(Error::DegeneratePlane(format!(
                "no {kind} plane found after {MAX_PLANE_DRAWS} draws"
            )))
        })
        .collect()
}

/// `n_vectors` unit vectors with `g(v,v) = ±1` for the requested kind.
pub fn sample_pseudo_sphere(
    g: &IndefiniteInnerProduct,
    kind: CausalKind,
    cfg: &ProbeConfig,
) -> Result<Vec<DVector<f64>>> {
    check_sphere(g, kind)?;
    Ok(vectors_at(g, kind, cfg, 0))
}

/// `n_planes` oriented orthonormal 2-planes of the requested kind.
pub fn sample_planes(g: &IndefiniteInnerProduct, kind: CausalKind, cfg: &ProbeConfig) -> Result<Vec<OrientedPlane>> {
    check_planes(g, kind)?;
    planes_at(g, kind, cfg, 0)
}

/// Sums of at most `max_support` basis vectors with signs `±1`, one
/// representative per `±v` pair.
fn signed_combinations(m: usize, max_support: usize) -> Vec<DVector<f64>> {
    let mut out = Vec::new();
    fn rec(m: usize, start: usize, left: usize, cur: &mut Vec<usize>, acc: &mut Vec<Vec<usize>>) {
        if !cur.is_empty() {
            acc.push(cur.clone());
        }
        if left == 0 {
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(m, i + 1, left - 1, cur, acc);
            cur.pop();
        }
    }
    let mut supports = Vec::new();
    rec(m, 0, max_support, &mut Vec::new(), &mut supports);
    supports.sort_by_key(|s| s.len());
    for s in supports {
        // first coefficient fixed to +1
        for signs in 0..(1u32 << (s.len() - 1)) {
            let mut v = DVector::zeros(m);
            v[s[0]] = 1.0;
            for (b, &i) in s.iter().enumerate().skip(1) {
                v[i] = if signs & (1 << (b - 1)) != 0 { -1.0 } else { 1.0 };
            }
            out.push(v);
        }
    }
    out
}

/// Chart-coordinate candidates of the requested kind, normalized; those
/// within `cone_margin` of the null cone are skipped.
pub fn structured_vectors(g: &IndefiniteInnerProduct, kind: CausalKind, cfg: &ProbeConfig) -> Vec<DVector<f64>> {
    signed_combinations(g.dim(), 3)
        .into_iter()
        .filter_map(|v| {
            let n = g.inner_unchecked(&v, &v);
            (n * kind.sign() >= cfg.cone_margin * v.norm_squared()).then(|| v / n.abs().sqrt())
        })
        .collect()
}

/// Planes spanned by a basis vector and a signed sum of at most two basis
/// vectors, kept when non-degenerate of the requested kind.
pub fn structured_planes(g: &IndefiniteInnerProduct, kind: CausalKind, cfg: &ProbeConfig) -> Vec<OrientedPlane> {
    let m = g.dim();
    let seconds = signed_combinations(m, 2);
    let mut out = Vec::new();
    for i in 0..m {
        let mut u = DVector::zeros(m);
        u[i] = 1.0;
        for v in &seconds {
            if v.iter().enumerate().all(|(j, c)| (j == i) == (*c != 0.0)) {
                continue;
            }
            if let Ok(pl) = OrientedPlane::from_span(g, &u, v, cfg.cone_margin) {
                if pl.kind == kind {
                    out.push(pl);
                }
            }
        }
    }
    out
}

fn fingerprint_record(
    a: &CurvatureTensor,
    sample: Sample,
    source: Source,
    kind: CausalKind,
    point: Option<usize>,
    index: usize,
    tol: &Tolerances,
) -> SampleRecord {
    let op = match &sample {
        Sample::Vector(v) => a.jacobi(&DVector::from_column_slice(v)),
        Sample::Plane([e1, e2]) => a.skew_operator(&OrientedPlane {
            e1: DVector::from_column_slice(e1),
            e2: DVector::from_column_slice(e2),
            kind,
        }),
    };
    let fp = op.and_then(|t| jordan_invariants(&t, tol));
    let (fingerprint, error) = match fp {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    SampleRecord {
        point,
        index,
        source,
        sample,
        fingerprint,
        error,
    }
}

/// Samples for one tensor: random ones first, then structured ones.
fn samples_for(
    a: &CurvatureTensor,
    property: Property,
    kind: CausalKind,
    cfg: &ProbeConfig,
    point: usize,
) -> Result<Vec<(Sample, Source)>> {
    let g = a.space();
    let mut out = Vec::new();
    match property {
        Property::Osserman => {
            check_sphere(g, kind)?;
            for v in vectors_at(g, kind, cfg, point) {
                out.push((Sample::Vector(v.as_slice().to_vec()), Source::Random));
            }
            if cfg.structured {
                for v in structured_vectors(g, kind, cfg) {
                    out.push((Sample::Vector(v.as_slice().to_vec()), Source::Structured));
                }
            }
        }
        Property::Ip => {
            check_planes(g, kind)?;
            let plane = |pl: OrientedPlane| Sample::Plane([pl.e1.as_slice().to_vec(), pl.e2.as_slice().to_vec()]);
            for pl in planes_at(g, kind, cfg, point)? {
                out.push((plane(pl), Source::Random));
            }
            if cfg.structured {
                for pl in structured_planes(g, kind, cfg) {
                    out.push((plane(pl), Source::Structured));
                }
            }
        }
    }
    Ok(out)
}

fn evaluate(
    a: &CurvatureTensor,
    property: Property,
    kind: CausalKind,
    cfg: &ProbeConfig,
    point: Option<usize>,
) -> Result<Vec<SampleRecord>> {
    let samples = samples_for(a, property, kind, cfg, point.unwrap_or(0))?;
    Ok(map_indexed(samples.len(), cfg.parallel, |i| {
        let (sample, source) = samples[i].clone();
        fingerprint_record(a, sample, source, kind, point, i, &cfg.tol)
    }))
}

/// Per-point comparison against the first fingerprint, then the overall
/// verdict: false if any mismatch, otherwise inconclusive if any sample
/// failed, otherwise true.
fn reduce(
    property: Property,
    kind: CausalKind,
    per_point: Vec<(Option<Vec<f64>>, Vec<SampleRecord>)>,
    tol: &Tolerances,
) -> ProbeVerdict {
    let mut stats = ProbeStats {
        points: per_point.len(),
        ..ProbeStats::default()
    };
    let mut witnesses = Vec::new();
    let mut reference_out = None;
    let mut all_records = Vec::new();
    for (pi, (coords, records)) in per_point.into_iter().enumerate() {
        let reference = records.iter().find_map(|r| r.fingerprint.clone());
        if pi == 0 {
            reference_out = reference.clone();
        }
        for r in &records {
            stats.samples += 1;
            match r.source {
                Source::Random => stats.random += 1,
                Source::Structured => stats.structured += 1,
            }
            let Some(fp) = &r.fingerprint else {
                stats.errors += 1;
                continue;
            };
            *stats.chain_histogram.entry(fp.chain_label()).or_insert(0) += 1;
            let reference = reference.as_ref().expect("a fingerprint exists");
            if !jordan_equal(fp, reference, tol.eig) {
                stats.mismatches += 1;
                if witnesses.len() < MAX_WITNESSES {
                    witnesses.push(Witness {
                        point: r.point,
                        coordinates: coords.clone(),
                        index: r.index,
                        source: r.source,
                        sample: r.sample.clone(),
                        fingerprint: fp.clone(),
                        reference: reference.clone(),
                    });
                }
            }
        }
        all_records.extend(records);
    }
    let holds = if stats.mismatches > 0 {
        Holds::False
    } else if stats.errors > 0 || reference_out.is_none() {
        Holds::Inconclusive
    } else {
        Holds::True
    };
    ProbeVerdict {
        property,
        kind,
        holds,
        reference: reference_out,
        witnesses,
        stats,
        records: all_records,
    }
}

pub fn probe(a: &CurvatureTensor, property: Property, kind: CausalKind, cfg: &ProbeConfig) -> Result<ProbeVerdict> {
    cfg.validate()?;
    let records = evaluate(a, property, kind, cfg, None)?;
    Ok(reduce(property, kind, vec![(None, records)], &cfg.tol))
}

/// Is the Jordan form of `J_A(v)` constant on the unit pseudo-sphere of `kind`?
pub fn osserman_probe(a: &CurvatureTensor, kind: CausalKind, cfg: &ProbeConfig) -> Result<ProbeVerdict> {
    probe(a, Property::Osserman, kind, cfg)
}

/// Is the Jordan form of `A(π)` constant over oriented planes of `kind`?
pub fn ip_probe(a: &CurvatureTensor, kind: CausalKind, cfg: &ProbeConfig) -> Result<ProbeVerdict> {
    probe(a, Property::Ip, kind, cfg)
}

/// Runs the probe on the Weyl tensor at `n_points` chart points. The
/// fingerprint may change from point to point; the property holds when it
/// holds at every point.
pub fn conformal_probe(
    field: &MetricField,
    property: Property,
    kind: CausalKind,
    cfg: &ProbeConfig,
) -> Result<ProbeVerdict> {
    cfg.validate()?;
    let points = sample_points(field, cfg.n_points, cfg.seed)?;
    let per_point = map_indexed(points.len(), cfg.parallel, |i| {
        let x = points[i].as_slice();
        let frame = riemann_at(field, x)?;
        let records = evaluate(&frame.weyl, property, kind, cfg, Some(i))?;
        Ok((Some(x.to_vec()), records))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(reduce(property, kind, per_point, &cfg.tol))
}

pub fn conformal_osserman_probe(field: &MetricField, kind: CausalKind, cfg: &ProbeConfig) -> Result<ProbeVerdict> {
    conformal_probe(field, Property::Osserman, kind, cfg)
}

pub fn conformal_ip_probe(field: &MetricField, kind: CausalKind, cfg: &ProbeConfig) -> Result<ProbeVerdict> {
    conformal_probe(field, Property::Ip, kind, cfg)
}
