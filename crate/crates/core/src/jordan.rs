//! Comparable fingerprints of the Jordan normal form.
//!
//! A Jordan normal form is determined by its eigenvalues together with the
//! ranks of `(T - λ)^k` for every eigenvalue `λ` and every `k`. We never build
//! a Jordan basis; the fingerprint is the eigenvalue clusters plus those rank
//! chains, all measured at explicit tolerances.

use nalgebra::{Complex, DMatrix, Schur};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{spectral_norm, Endomorphism, Tolerances};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenCluster {
    /// Real part of the cluster representative.
    pub re: f64,
    /// Imaginary part of the cluster representative.
    pub im: f64,
    /// Algebraic multiplicity.
    pub multiplicity: usize,
    /// `rank((T - λ)^k)` for `k = 1..=m`.
    pub rank_chain: Vec<usize>,
}

impl EigenCluster {
    pub fn eigenvalue(&self) -> Complex<f64> {
        Complex::new(self.re, self.im)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JordanInvariants {
    pub dim: usize,
    pub clusters: Vec<EigenCluster>,
    /// `rank(T^k)` for `k = 1..=m`.
    pub overall_rank_chain: Vec<usize>,
}

impl JordanInvariants {
    pub fn spectral_radius(&self) -> f64 {
        self.clusters
            .iter()
            .map(|c| c.eigenvalue().norm())
            .fold(0.0, f64::max)
    }

    /// True when the only eigenvalue is zero.
    pub fn is_nilpotent(&self) -> bool {
        self.overall_rank_chain.last().copied().unwrap_or(0) == 0
    }

    /// Compact rank-chain label, e.g. `"2,1,0,0,0,0"`.
    pub fn chain_label(&self) -> String {
        self.overall_rank_chain
            .iter()
            .map(|r| r.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Sizes of the nilpotent Jordan blocks read off the overall rank chain
    /// (only meaningful when `is_nilpotent`), largest first.
    pub fn nilpotent_block_sizes(&self) -> Vec<usize> {
        let mut ranks = vec![self.dim];
        ranks.extend(&self.overall_rank_chain);
        // blocks of size >= k: rank(T^{k-1}) - rank(T^k)
        let at_least: Vec<usize> = ranks
            .windows(2)
            .map(|w| w[0].saturating_sub(w[1]))
            .collect();
        let mut sizes = Vec::new();
        for k in (1..=at_least.len()).rev() {
            let longer = at_least.get(k).copied().unwrap_or(0);
            let exactly = at_least[k - 1].saturating_sub(longer);
            sizes.extend(std::iter::repeat_n(k, exactly));
        }
        sizes
    }
}

fn complex_matrix(t: &DMatrix<f64>, shift: Complex<f64>) -> DMatrix<Complex<f64>> {
    let m = t.nrows();
    DMatrix::from_fn(m, m, |i, j| {
        let v = Complex::new(t[(i, j)], 0.0);
        if i == j {
            v - shift
        } else {
            v
        }
    })
}

/// Ranks of `B^k` for `k = 1..=len`, by the staircase of iterated kernels:
/// `ker B^k = {x : Bx ∈ ker B^{k-1}}`, so each step is the kernel of
/// `W^* B` with `W` an orthonormal basis of `(ker B^{k-1})^⊥`. `B` is
/// applied once per step, so every threshold is `rank_rel * σ_max(B)`
/// (floored at `zero_abs`) instead of a power of it, which keeps chains of
/// non-normal operators with spread-out eigenvalues intact.
fn chain_of<T>(b: &DMatrix<T>, tol: &Tolerances, len: usize) -> Vec<usize>
where
    T: nalgebra::ComplexField<RealField = f64>,
{
    let m = b.nrows();
    let top = crate::linalg::singular_values(b)
        .into_iter()
        .fold(0.0_f64, f64::max);
    let threshold = (tol.rank_rel * top).max(tol.zero_abs);
    let mut chain = Vec::with_capacity(len);
    // rows: the conjugated basis W^* of the current kernel's complement
    let mut complement: Option<DMatrix<T>> = None;
    while chain.len() < len {
        let mut step = DMatrix::<T>::zeros(m, m);
        match &complement {
            None => step.copy_from(b),
            Some(w_adj) => step.view_mut((0, 0), (w_adj.nrows(), m)).copy_from(&(w_adj * b)),
        }
        let svd = step.svd(false, true);
        let v_adj = svd.v_t.expect("right singular vectors requested");
        let keep: Vec<usize> = (0..m).filter(|&i| svd.singular_values[i] > threshold).collect();
        let rank = keep.len();
        let stable = chain.last() == Some(&rank);
        chain.push(rank);
        if stable || rank == 0 {
            chain.resize(len, rank);
            break;
        }
        complement = Some(DMatrix::from_fn(rank, m, |r, c| v_adj[(keep[r], c)].clone()));
    }
    chain
}

fn shifted_chain(t: &DMatrix<f64>, shift: Complex<f64>, tol: &Tolerances) -> Vec<usize> {
    if shift.im == 0.0 {
        let m = t.nrows();
        let b = t - DMatrix::identity(m, m) * shift.re;
        chain_of(&b, tol, m)
    } else {
        chain_of(&complex_matrix(t, shift), tol, t.nrows())
    }
}

/// Nullity of `(T - μ)^k`, thresholded like the rank chains.
fn nullity_of_power(t: &DMatrix<f64>, mu: Complex<f64>, k: usize, tol: &Tolerances) -> usize {
    t.nrows() - chain_of(&complex_matrix(t, mu), tol, k)[k - 1]
}

fn mean(values: &[Complex<f64>], members: &[usize]) -> Complex<f64> {
    let sum: Complex<f64> = members.iter().map(|&i| values[i]).sum();
    sum / members.len() as f64
}

/// Groups eigenvalues into clusters.
///
/// A Jordan block of size `k` scatters its eigenvalue over a radius of about
/// `‖T‖ ε^{1/k}`, far beyond any fixed tolerance. Candidate groups of the `k`
/// nearest eigenvalues, largest `k` first, are accepted when their spread
/// fits that radius and `(T - μ)^k` has nullity `k` at their mean `μ`.
/// Remaining clusters whose centres lie within `tol.eig * (1 + ρ)` are then
/// joined by single linkage.
fn cluster_eigenvalues(
    t: &DMatrix<f64>,
    eigs: &[Complex<f64>],
    norm: f64,
    tol: &Tolerances,
) -> Vec<(Complex<f64>, usize)> {
    let n = eigs.len();
    let rho = eigs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let radius = tol.eig * (1.0 + rho);
    let roundoff = (n as f64) * f64::EPSILON;

    let mut assigned = vec![false; n];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for k in (2..=n).rev() {
        let reach = (4.0 * norm * roundoff.powf(1.0 / k as f64)).max(radius);
        for i in 0..n {
            if assigned[i] {
                continue;
            }
            let mut near: Vec<usize> = (0..n).filter(|&j| !assigned[j]).collect();
            if near.len() < k {
                break;
            }
            near.sort_by(|&a, &b| {
                (eigs[a] - eigs[i])
                    .norm()
                    .total_cmp(&(eigs[b] - eigs[i]).norm())
                    .then(a.cmp(&b))
            });
            near.truncate(k);
            let mu = mean(eigs, &near);
            let spread = near
                .iter()
                .map(|&j| (eigs[j] - mu).norm())
                .fold(0.0, f64::max);
            if spread > reach {
                continue;
            }
            if nullity_of_power(t, mu, k, tol) >= k {
                for &j in &near {
                    assigned[j] = true;
                }
                groups.push(near);
            }
        }
    }
    groups.extend((0..n).filter(|&i| !assigned[i]).map(|i| vec![i]));

    // single linkage on the centres at the clustering tolerance
    loop {
        let centres: Vec<Complex<f64>> = groups.iter().map(|g| mean(eigs, g)).collect();
        let pair = (0..groups.len())
            .flat_map(|a| (a + 1..groups.len()).map(move |b| (a, b)))
            .find(|&(a, b)| (centres[a] - centres[b]).norm() <= radius);
        match pair {
            Some((a, b)) => {
                let moved = groups.remove(b);
                groups[a].extend(moved);
            }
            None => break,
        }
    }

    groups
        .into_iter()
        .map(|g| {
            let mut mu = mean(eigs, &g);
            let spread = g
                .iter()
                .map(|&i| (eigs[i] - mu).norm())
                .fold(0.0, f64::max);
            if mu.im.abs() <= radius.max(spread) {
                mu.im = 0.0;
            }
            // a centre indistinguishable from 0 is reported as 0
            if mu.re.abs() <= spread.max(16.0 * roundoff * norm) {
                mu.re = 0.0;
            }
            (mu, g.len())
        })
        .collect()
}

/// Eigenvalues from a real Schur form of `T + cI`. The QR deflation test is
/// relative to the diagonal, which never fires on (nearly) nilpotent
/// operators; shifting by a multiple of `‖T‖` restores it.
fn eigenvalues(t: &DMatrix<f64>, norm: f64) -> Result<Vec<Complex<f64>>> {
    let m = t.nrows();
    for c in [norm, -norm, 0.5 * norm, 0.0] {
        let shifted = t + DMatrix::<f64>::identity(m, m) * c;
        let Some(schur) = Schur::try_new(shifted, f64::EPSILON, 10_000) else {
            continue;
        };
        let eigs: Vec<Complex<f64>> = schur
            .complex_eigenvalues()
            .iter()
            .map(|z| z - Complex::new(c, 0.0))
            .collect();
        if eigs.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Ok(eigs);
        }
    }
    Err(Error::EigenSolver)
}

/// Computes the Jordan fingerprint of `t`.
pub fn jordan_invariants(t: &Endomorphism, tol: &Tolerances) -> Result<JordanInvariants> {
    jordan_invariants_of(&t.matrix, tol)
}

pub fn jordan_invariants_of(t: &DMatrix<f64>, tol: &Tolerances) -> Result<JordanInvariants> {
    let m = t.nrows();
    if t.iter().any(|v| !v.is_finite()) {
        return Err(Error::EigenSolver);
    }
    let norm = spectral_norm(t);
    if norm <= tol.zero_abs {
        return Ok(JordanInvariants {
            dim: m,
            clusters: vec![EigenCluster {
                re: 0.0,
                im: 0.0,
                multiplicity: m,
                rank_chain: vec![0; m],
            }],
            overall_rank_chain: vec![0; m],
        });
    }
    let eigs = eigenvalues(t, norm)?;

    let mut clusters: Vec<EigenCluster> = cluster_eigenvalues(t, &eigs, norm, tol)
        .into_iter()
        .map(|(mu, mult)| EigenCluster {
            re: mu.re,
            im: mu.im,
            multiplicity: mult,
            rank_chain: shifted_chain(t, mu, tol),
        })
        .collect();
    clusters.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));

    Ok(JordanInvariants {
        dim: m,
        clusters,
        overall_rank_chain: chain_of(t, tol, m),
    })
}

/// Same Jordan structure: equal overall chains, and a one-to-one matching of
/// clusters with equal multiplicities and rank chains whose eigenvalues agree
/// within `tol * (1 + spectral radius)`.
pub fn jordan_equal(a: &JordanInvariants, b: &JordanInvariants, tol: f64) -> bool {
    if a.dim != b.dim
        || a.clusters.len() != b.clusters.len()
        || a.overall_rank_chain != b.overall_rank_chain
    {
        return false;
    }
    let scale = 1.0 + a.spectral_radius().max(b.spectral_radius());
    let mut used = vec![false; b.clusters.len()];
    for ca in &a.clusters {
        let found = b
            .clusters
            .iter()
            .enumerate()
            .filter(|(j, cb)| {
                !used[*j]
                    && cb.multiplicity == ca.multiplicity
                    && cb.rank_chain == ca.rank_chain
                    && (cb.eigenvalue() - ca.eigenvalue()).norm() <= tol * scale
            })
            .min_by(|(_, x), (_, y)| {
                let dx = (x.eigenvalue() - ca.eigenvalue()).norm();
                let dy = (y.eigenvalue() - ca.eigenvalue()).norm();
                dx.total_cmp(&dy)
            })
            .map(|(j, _)| j);
        match found {
            Some(j) => used[j] = true,
            None => return false,
        }
    }
    true
}
