//! Desk-scale search over Weyl projections of single generators `A_φ`.
//!
//! Each trial draws a generator type, a signature and a self-adjoint `φ`,
//! projects `A_φ` to its Weyl part and runs both probes for both kinds.
//! The logs are sampling evidence only: an empty candidate list is reported
//! as "no counterexample found".

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;
use serde_json::json;

use crate::curvature::CurvatureTensor;
use crate::error::Result;
use crate::exec::map_indexed;
use crate::linalg::{CausalKind, Endomorphism, IndefiniteInnerProduct};
use crate::probe::{probe, Holds, ProbeConfig, Property};
use crate::random::{involution, nilpotent_generator, para_involution, stream_rng, GeneratorType};
use crate::report::{JobReport, SuiteReport, Verdict};

const EXPLORE_STREAM: u64 = 1 << 57;

/// Weyl tensors with `max |W| <= WEYL_ZERO * (1 + max |A_φ|)` count as zero.
const WEYL_ZERO: f64 = 1e-9;

/// Cap on logged candidates per job.
const MAX_LOGGED: usize = 16;

#[derive(Debug, Clone, Serialize)]
struct Trial {
    trial: usize,
    generator: GeneratorType,
    p: usize,
    q: usize,
    weyl_max_abs: f64,
    weyl_zero: bool,
    /// `(property, kind) -> (holds, every fingerprint nilpotent)`
    probes: BTreeMap<String, (Holds, bool)>,
    phi: Vec<Vec<f64>>,
}

impl Trial {
    fn definite(&self) -> bool {
        self.p == 0 || self.q == 0
    }

    fn probe(&self, property: Property, kind: CausalKind) -> Option<(Holds, bool)> {
        self.probes.get(&format!("{property} {kind}")).copied()
    }

    fn summary(&self, kind: Option<CausalKind>) -> serde_json::Value {
        json!({
            "trial": self.trial,
            "generator": self.generator,
            "signature": [self.p, self.q],
            "kind": kind.map(|k| k.as_str()),
            "weyl_max_abs": self.weyl_max_abs,
            "phi": self.phi,
        })
    }
}

fn draw_generator<R: Rng>(rng: &mut R, trial: usize) -> Result<(GeneratorType, IndefiniteInnerProduct, Endomorphism)> {
    Ok(match trial % 3 {
        0 => {
            let m = rng.random_range(3..=6);
            let p = rng.random_range(0..=m);
            let g = IndefiniteInnerProduct::diagonal(p, m - p)?;
            let plus: Vec<bool> = (0..m).map(|_| rng.random_bool(0.5)).collect();
            let phi = involution(rng, &g, &plus);
            (GeneratorType::Involution, g, phi)
        }
        1 => {
            let n = rng.random_range(2..=3);
            let g = IndefiniteInnerProduct::diagonal(n, n)?;
            let phi = para_involution(rng, &g);
            (GeneratorType::ParaInvolution, g, phi)
        }
        _ => {
            let m = rng.random_range(4..=6);
            let p = rng.random_range(1..m);
            let g = IndefiniteInnerProduct::diagonal(p, m - p)?;
            let rank = rng.random_range(1..=p.min(m - p));
            let phi = nilpotent_generator(rng, &g, rank);
            (GeneratorType::Nilpotent, g, phi)
        }
    })
}

fn run_trial(cfg: &ProbeConfig, trial: usize) -> Result<Trial> {
    let mut rng = stream_rng(cfg.seed, EXPLORE_STREAM + trial as u64);
    let (generator, g, phi) = draw_generator(&mut rng, trial)?;
    let sig = g.signature();
    let a = CurvatureTensor::build_a_phi(Arc::new(g), &phi)?;
    let w = a.weyl_projection();
    let weyl_max_abs = w.max_abs();
    let sub = ProbeConfig {
        seed: rng.random(),
        structured: false,
        parallel: false,
        ..cfg.clone()
    };
    let mut probes = BTreeMap::new();
    for property in [Property::Osserman, Property::Ip] {
        for kind in [CausalKind::Spacelike, CausalKind::Timelike] {
            let available = match (property, kind) {
                (Property::Osserman, CausalKind::Spacelike) => sig.q >= 1,
                (Property::Osserman, CausalKind::Timelike) => sig.p >= 1,
                (Property::Ip, CausalKind::Spacelike) => sig.q >= 2,
                (Property::Ip, CausalKind::Timelike) => sig.p >= 2,
            };
            if !available {
                continue;
            }
            let v = probe(&w, property, kind, &sub)?;
            let nilpotent = v
                .records
                .iter()
                .all(|r| r.fingerprint.as_ref().is_some_and(|f| f.is_nilpotent()));
            probes.insert(format!("{property} {kind}"), (v.holds, nilpotent));
        }
    }
    Ok(Trial {
        trial,
        generator,
        p: sig.p,
        q: sig.q,
        weyl_max_abs,
        weyl_zero: weyl_max_abs <= WEYL_ZERO * (1.0 + a.max_abs()),
        probes,
        phi: phi.matrix.row_iter().map(|r| r.iter().copied().collect()).collect(),
    })
}

fn finding(candidates: usize) -> String {
    if candidates == 0 {
        "no counterexample found".into()
    } else {
        format!("{candidates} counterexample candidates logged for inspection")
    }
}

/// Runs `trials` trials and summarizes them as four reports:
/// `ip-nilpotency` (IP Weyl tensors with non-nilpotent skew operators),
/// `nilpotent-generator` (every `W(π)` nilpotent when `φ² = 0`),
/// `definite-ip` (definite IP samples are conformally flat) and
/// `conformal-osserman` (statistics for Riemannian Osserman Weyl tensors).
pub fn explore_conjectures(cfg: &ProbeConfig, trials: usize) -> Result<SuiteReport> {
    cfg.validate()?;
    let results = map_indexed(trials, cfg.parallel, |t| run_trial(cfg, t));

    let mut ip = JobReport::new(
        "ip-nilpotency",
        "no sampled Weyl tensor has the Ivanov-Petrova property with W != 0 and a non-nilpotent skew-symmetric curvature operator",
        "open problem: Ivanov-Petrova Weyl tensors in higher signature have nilpotent W(pi)",
    );
    let mut nil = JobReport::new(
        "nilpotent-generator",
        "for phi^2 = 0 every sampled W(pi) is nilpotent",
        "trichotomy by phi^2: the nilpotent case",
    );
    let mut definite = JobReport::new(
        "definite-ip",
        "in definite signature every sample with the Ivanov-Petrova property has W = 0",
        "Riemannian case of the Ivanov-Petrova argument",
    );
    let mut osserman = JobReport::new(
        "conformal-osserman",
        "statistics of Riemannian samples whose Weyl tensor is Osserman with W != 0",
        "open problem: Riemannian conformally Osserman manifolds and rank one symmetric spaces",
    );

    let mut errors = Vec::new();
    let mut by_generator: BTreeMap<&str, BTreeMap<String, usize>> = BTreeMap::new();
    let mut ip_candidates = 0usize;
    let mut nil_planes_bad = 0usize;
    let mut definite_bad = 0usize;
    let mut definite_ip = 0usize;
    let mut riemannian = 0usize;
    let mut riemannian_osserman_nonflat = 0usize;

    for (t, res) in results.into_iter().enumerate() {
        let trial = match res {
            Ok(trial) => trial,
            Err(e) => {
                errors.push(json!({ "trial": t, "error": e.to_string() }));
                continue;
            }
        };
        let stats = by_generator.entry(trial.generator.as_str()).or_default();
        *stats.entry("trials".into()).or_default() += 1;
        if trial.weyl_zero {
            *stats.entry("weyl_zero".into()).or_default() += 1;
        }
        for (key, (holds, _)) in &trial.probes {
            *stats.entry(format!("{key} {}", holds.as_str())).or_default() += 1;
        }

        for kind in [CausalKind::Spacelike, CausalKind::Timelike] {
            if let Some((Holds::True, nilpotent)) = trial.probe(Property::Ip, kind) {
                if !nilpotent && !trial.weyl_zero {
                    ip_candidates += 1;
                    if ip.witnesses.len() < MAX_LOGGED {
                        ip.witnesses.push(trial.summary(Some(kind)));
                    }
                }
                if trial.definite() {
                    definite_ip += 1;
                    if !trial.weyl_zero {
                        definite_bad += 1;
                        if definite.witnesses.len() < MAX_LOGGED {
                            definite.witnesses.push(trial.summary(Some(kind)));
                        }
                    }
                }
            }
            if trial.generator == GeneratorType::Nilpotent {
                if let Some((_, false)) = trial.probe(Property::Ip, kind) {
                    nil_planes_bad += 1;
                    if nil.witnesses.len() < MAX_LOGGED {
                        nil.witnesses.push(trial.summary(Some(kind)));
                    }
                }
            }
        }
        if trial.p == 0 {
            riemannian += 1;
            if !trial.weyl_zero
                && trial.probe(Property::Osserman, CausalKind::Spacelike).map(|p| p.0) == Some(Holds::True)
            {
                riemannian_osserman_nonflat += 1;
                if osserman.witnesses.len() < MAX_LOGGED {
                    osserman.witnesses.push(trial.summary(Some(CausalKind::Spacelike)));
                }
            }
        }
    }

    let n_ok = trials - errors.len();
    for r in [&mut ip, &mut nil, &mut definite, &mut osserman] {
        r.samples = n_ok;
        r.note("trial_errors", errors.len());
    }
    ip.note("by_generator", &by_generator);
    ip.expect("candidates", ip_candidates, 0);
    ip.note("finding", finding(ip_candidates));
    nil.expect("non_nilpotent_probes", nil_planes_bad, 0);
    definite.note("definite_ip_holding_probes", definite_ip);
    definite.expect("definite_ip_holding_with_nonzero_weyl", definite_bad, 0);
    osserman.note("riemannian_trials", riemannian);
    osserman.note("riemannian_osserman_with_nonzero_weyl", riemannian_osserman_nonflat);
    osserman.note(
        "finding",
        "sampled algebraic curvature tensors at a point only; the manifold statement is not decidable here",
    );
    osserman.verdict = Verdict::Inconclusive;
    if !errors.is_empty() {
        for r in [&mut ip, &mut nil, &mut definite] {
            if r.verdict == Verdict::Pass {
                r.verdict = Verdict::Inconclusive;
            }
        }
        ip.witnesses.extend(errors.into_iter().take(MAX_LOGGED));
    }
    Ok(SuiteReport::new("explore", cfg, vec![ip, nil, definite, osserman]))
}
