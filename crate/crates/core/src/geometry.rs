//! Metric fields on coordinate charts and their curvature at a point.
//!
//! Metric components are written once, generically over [`Scalar`], and
//! evaluated either in plain `f64` or in [`Jet2`] to obtain exact first and
//! second derivatives. The Levi-Civita connection and the all-lowered Riemann
//! tensor follow from those derivatives, with the sign convention in which the
//! round sphere has `R(e_1,e_2,e_2,e_1) > 0`.
//!
//! Coordinate ordering: `(x_1..x_p, y_1..y_p)` for `g_f` and
//! `(u_1..u_s, t_1..t_s, w_1..w_s)` for `g_F`.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::curvature::CurvatureTensor;
use crate::error::{Error, Result};
use crate::jet::{Jet2, Scalar};
use crate::linalg::{IndefiniteInnerProduct, Signature};
use crate::poly::Polynomial;
use crate::random::stream_rng;

/// Points with `|det g| < DET_FLOOR` are rejected by the point sampler.
pub const DET_FLOOR: f64 = 1e-8;

/// Positive conformal factor `α` on the chart, as a function of the generic
/// chart coordinates `x1..xm`.
#[derive(Debug, Clone, PartialEq)]
pub enum ScaleField {
    /// `α = exp(P)`
    Exp(Polynomial),
    /// `α = P`, which must stay positive where it is evaluated
    Poly(Polynomial),
}

impl ScaleField {
    pub fn eval<S: Scalar>(&self, x: &[S]) -> Result<S> {
        match self {
            ScaleField::Exp(p) => Ok(p.eval(x).exp()),
            ScaleField::Poly(p) => {
                let v = p.eval(x);
                if !(v.value() > 0.0) {
                    return Err(Error::NonPositiveScale(v.value()));
                }
                Ok(v)
            }
        }
    }

    pub fn value_at(&self, x: &[f64]) -> Result<f64> {
        self.eval(x)
    }
}

impl fmt::Display for ScaleField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScaleField::Exp(p) => write!(f, "exp({p})"),
            ScaleField::Poly(p) => write!(f, "{p}"),
        }
    }
}

/// Names `x1..xm` of generic chart coordinates.
pub fn chart_names(m: usize) -> Vec<String> {
    (1..=m).map(|i| format!("x{i}")).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum MetricField {
    /// Constant diagonal metric with `p` timelike directions.
    Flat { signature: Signature },
    /// `g = 4 (1 + K⟨x,x⟩)^{-2} η` with `η = diag(-I_p, I_q)`: constant
    /// sectional curvature `K` on the chart.
    ConstantCurvature { k: f64, signature: Signature },
    /// Neutral metric on `R^{2p}`: `g(∂x_i,∂x_j) = ∂_i f ∂_j f`,
    /// `g(∂x_i,∂y_j) = δ_ij`, `g(∂y_i,∂y_j) = 0`.
    Gf {
        p: usize,
        f: Polynomial,
        grad: Vec<Polynomial>,
    },
    /// Signature `(2s,s)` metric on `R^{3s}` with coordinates `(u,t,w)`:
    /// `g(∂u_i,∂u_j) = -2δ_ij (F(u) + Σ u_k t_k)`, `g(∂u_i,∂w_j) = δ_ij`,
    /// `g(∂t_i,∂t_j) = -δ_ij`, all other pairings zero, `F = Σ f_i(u_i)`.
    GF { s: usize, fs: Vec<Polynomial> },
    /// `α · base`.
    Rescaled {
        base: Box<MetricField>,
        alpha: ScaleField,
    },
}

impl MetricField {
    pub fn flat(p: usize, q: usize) -> Result<Self> {
        Ok(MetricField::Flat {
            signature: Signature::new(p, q)?,
        })
    }

    pub fn constant_curvature(k: f64, p: usize, q: usize) -> Result<Self> {
        Ok(MetricField::ConstantCurvature {
            k,
            signature: Signature::new(p, q)?,
        })
    }

    /// `f` must be a polynomial in `x1..xp`.
    pub fn gf(p: usize, f: Polynomial) -> Result<Self> {
        if p < 2 {
            return Err(Error::InvalidSignature(format!("g_f needs p >= 2, got {p}")));
        }
        if f.nvars() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                found: f.nvars(),
            });
        }
        let grad = (0..p).map(|i| f.derivative(i)).collect();
        Ok(MetricField::Gf { p, f, grad })
    }

    /// Each `f_i` must be a polynomial in one variable.
    pub fn g_capital_f(s: usize, fs: Vec<Polynomial>) -> Result<Self> {
        if s < 2 {
            return Err(Error::InvalidSignature(format!("g_F needs s >= 2, got {s}")));
        }
        if fs.len() != s {
            return Err(Error::DimensionMismatch {
                expected: s,
                found: fs.len(),
            });
        }
        if let Some(bad) = fs.iter().find(|f| f.nvars() != 1) {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: bad.nvars(),
            });
        }
        Ok(MetricField::GF { s, fs })
    }

    pub fn rescale(self, alpha: ScaleField) -> Result<Self> {
        let m = self.dim();
        let nv = match &alpha {
            ScaleField::Exp(p) | ScaleField::Poly(p) => p.nvars(),
        };
        if nv != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: nv,
            });
        }
        Ok(MetricField::Rescaled {
            base: Box::new(self),
            alpha,
        })
    }

    pub fn dim(&self) -> usize {
        self.signature().dim()
    }

    pub fn signature(&self) -> Signature {
        match self {
            MetricField::Flat { signature } | MetricField::ConstantCurvature { signature, .. } => {
                *signature
            }
            MetricField::Gf { p, .. } => Signature { p: *p, q: *p },
            MetricField::GF { s, .. } => Signature { p: 2 * s, q: *s },
            MetricField::Rescaled { base, .. } => base.signature(),
        }
    }

    /// Half-width of the coordinate box used for sampling points.
    pub fn sample_radius(&self) -> f64 {
        match self {
            // keeps 1 + K⟨x,x⟩ well away from zero for |K| <= 1 and m <= 8
            MetricField::ConstantCurvature { k, .. } => 0.3 / k.abs().max(1.0).sqrt(),
            MetricField::Rescaled { base, .. } => base.sample_radius(),
            _ => 1.0,
        }
    }

    /// The conformal factor at `x`, or 1 for unscaled fields.
    pub fn scale_at(&self, x: &[f64]) -> Result<f64> {
        match self {
            MetricField::Rescaled { base, alpha } => Ok(alpha.value_at(x)? * base.scale_at(x)?),
            _ => Ok(1.0),
        }
    }

    /// Metric components `g_ab` in row-major order.
    pub fn components<S: Scalar>(&self, x: &[S]) -> Result<Vec<S>> {
        let m = self.dim();
        if x.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: x.len(),
            });
        }
        let zero = x[0].lift(0.0);
        let mut g = vec![zero.clone(); m * m];
        match self {
            MetricField::Flat { signature } => {
                for i in 0..m {
                    g[i * m + i] = zero.lift(if i < signature.p { -1.0 } else { 1.0 });
                }
            }
            MetricField::ConstantCurvature { k, signature } => {
                let eta = |i: usize| if i < signature.p { -1.0 } else { 1.0 };
                let mut r2 = zero.clone();
                for (i, xi) in x.iter().enumerate() {
                    r2 = r2 + (xi.clone() * xi.clone()).scale(eta(i));
                }
                let denom = zero.lift(1.0) + r2.scale(*k);
                let conf = denom.powi(2).recip()?.scale(4.0);
                for i in 0..m {
                    g[i * m + i] = conf.scale(eta(i));
                }
            }
            MetricField::Gf { p, grad, .. } => {
                let xs = &x[..*p];
                let df: Vec<S> = grad.iter().map(|d| d.eval(xs)).collect();
                for i in 0..*p {
                    for j in 0..*p {
                        g[i * m + j] = df[i].clone() * df[j].clone();
                    }
                    g[i * m + p + i] = zero.lift(1.0);
                    g[(p + i) * m + i] = zero.lift(1.0);
                }
            }
            MetricField::GF { s, fs } => {
                let s = *s;
                let (u, rest) = x.split_at(s);
                let t = &rest[..s];
                let mut acc = zero.clone();
                for (f, ui) in fs.iter().zip(u) {
                    acc = acc + f.eval(std::slice::from_ref(ui));
                }
                for (ui, ti) in u.iter().zip(t) {
                    acc = acc + ui.clone() * ti.clone();
                }
                let diag = acc.scale(-2.0);
                for i in 0..s {
                    g[i * m + i] = diag.clone();
                    g[i * m + 2 * s + i] = zero.lift(1.0);
                    g[(2 * s + i) * m + i] = zero.lift(1.0);
                    g[(s + i) * m + s + i] = zero.lift(-1.0);
                }
            }
            MetricField::Rescaled { base, alpha } => {
                let a = alpha.eval(x)?;
                return Ok(base
                    .components(x)?
                    .into_iter()
                    .map(|c| a.clone() * c)
                    .collect());
            }
        }
        Ok(g)
    }

    pub fn gram(&self, point: &[f64]) -> Result<DMatrix<f64>> {
        let m = self.dim();
        let c = self.components(point)?;
        Ok(DMatrix::from_row_slice(m, m, &c))
    }

    /// The inner product on the tangent space at `point`, checked against
    /// the declared signature.
    pub fn inner_product(&self, point: &[f64]) -> Result<IndefiniteInnerProduct> {
        IndefiniteInnerProduct::with_signature(self.gram(point)?, self.signature())
    }

    /// Metric values with exact first and second coordinate derivatives.
    pub fn jets(&self, point: &[f64]) -> Result<MetricJets> {
        let m = self.dim();
        let jets = self.components(&Jet2::seed(point))?;
        let mut out = MetricJets {
            m,
            g: DMatrix::zeros(m, m),
            dg: vec![0.0; m * m * m],
            ddg: vec![0.0; m * m * m * m],
        };
        for a in 0..m {
            for b in 0..m {
                let j = &jets[a * m + b];
                out.g[(a, b)] = j.value;
                for i in 0..m {
                    out.dg[(a * m + b) * m + i] = j.grad[i];
                    for k in 0..m {
                        out.ddg[((a * m + b) * m + i) * m + k] = j.hess[(i, k)];
                    }
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Display for MetricField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricField::Flat { signature } => {
                write!(f, "flat:m={}", signature.dim())?;
                if signature.p > 0 {
                    write!(f, ",p={}", signature.p)?;
                }
                Ok(())
            }
            MetricField::ConstantCurvature { k, signature } => {
                write!(f, "constcurv:K={k},m={}", signature.dim())?;
                if signature.p > 0 {
                    write!(f, ",p={}", signature.p)?;
                }
                Ok(())
            }
            MetricField::Gf { p, f: poly, .. } => write!(f, "gf:p={p},f={poly}"),
            MetricField::GF { s, fs } => {
                let list: Vec<String> = fs.iter().map(|p| p.to_string()).collect();
                write!(f, "gF:s={s},f={}", list.join(";"))
            }
            MetricField::Rescaled { base, alpha } => write!(f, "rescale:alpha={alpha}@{base}"),
        }
    }
}

/// `g_ab`, `∂_i g_ab` and `∂_i ∂_k g_ab` at a point.
#[derive(Debug, Clone)]
pub struct MetricJets {
    m: usize,
    pub g: DMatrix<f64>,
    dg: Vec<f64>,
    ddg: Vec<f64>,
}

impl MetricJets {
    pub fn dim(&self) -> usize {
        self.m
    }

    /// `∂_i g_ab`
    pub fn dg(&self, a: usize, b: usize, i: usize) -> f64 {
        self.dg[(a * self.m + b) * self.m + i]
    }

    /// `∂_i ∂_k g_ab`
    pub fn ddg(&self, a: usize, b: usize, i: usize, k: usize) -> f64 {
        self.ddg[((a * self.m + b) * self.m + i) * self.m + k]
    }
}

/// Christoffel symbols `Γ^k_ij`, stored as `[k][i][j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffel {
    m: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[(k * self.m + i) * self.m + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a, v| a.max(v.abs()))
    }
}

/// `Γ_{l,jk} = ½(∂_j g_kl + ∂_k g_jl - ∂_l g_jk)`
fn first_kind(j: &MetricJets, l: usize, a: usize, b: usize) -> f64 {
    0.5 * (j.dg(b, l, a) + j.dg(a, l, b) - j.dg(a, b, l))
}

fn christoffel_from(jets: &MetricJets, gram_inv: &DMatrix<f64>) -> Christoffel {
    let m = jets.m;
    let mut first = vec![0.0; m * m * m];
    for l in 0..m {
        for i in 0..m {
            for j in 0..m {
                first[(l * m + i) * m + j] = first_kind(jets, l, i, j);
            }
        }
    }
    let mut data = vec![0.0; m * m * m];
    for k in 0..m {
        for i in 0..m {
            for j in 0..m {
                data[(k * m + i) * m + j] = (0..m)
                    .map(|l| gram_inv[(k, l)] * first[(l * m + i) * m + j])
                    .sum();
            }
        }
    }
    Christoffel { m, data }
}

pub fn christoffel(field: &MetricField, point: &[f64]) -> Result<Christoffel> {
    let jets = field.jets(point)?;
    let g = IndefiniteInnerProduct::new(jets.g.clone())?;
    Ok(christoffel_from(&jets, g.gram_inv()))
}

/// Curvature data at one point of a chart.
#[derive(Debug, Clone)]
pub struct PointFrame {
    pub point: DVector<f64>,
    pub space: Arc<IndefiniteInnerProduct>,
    pub christoffel: Christoffel,
    pub riemann: CurvatureTensor,
    pub weyl: CurvatureTensor,
}

impl PointFrame {
    pub fn gram(&self) -> &DMatrix<f64> {
        self.space.gram()
    }

    pub fn gram_inv(&self) -> &DMatrix<f64> {
        self.space.gram_inv()
    }
}

/// Levi-Civita connection, Riemann tensor and Weyl tensor at `point`.
///
/// `R_ijkl = g(R(∂_i,∂_j)∂_k, ∂_l)` expanded as
/// `∂_iΓ_{l,jk} - ∂_i g_ln Γ^n_jk + Γ_{l,in} Γ^n_jk - (i ↔ j)`.
pub fn riemann_at(field: &MetricField, point: &[f64]) -> Result<PointFrame> {
    let jets = field.jets(point)?;
    let space = Arc::new(IndefiniteInnerProduct::with_signature(
        jets.g.clone(),
        field.signature(),
    )?);
    let m = jets.m;
    let gamma = christoffel_from(&jets, space.gram_inv());
    let mut first = vec![0.0; m * m * m];
    for l in 0..m {
        for a in 0..m {
            for b in 0..m {
                first[(l * m + a) * m + b] = first_kind(&jets, l, a, b);
            }
        }
    }
    let d_first = |i: usize, l: usize, j: usize, k: usize| {
        0.5 * (jets.ddg(k, l, i, j) + jets.ddg(j, l, i, k) - jets.ddg(j, k, i, l))
    };
    let half = |i: usize, j: usize, k: usize, l: usize| {
        let mut s = d_first(i, l, j, k);
        for n in 0..m {
            let g_up = gamma.get(n, j, k);
            s += (first[(l * m + i) * m + n] - jets.dg(l, n, i)) * g_up;
        }
        s
    };
    let riemann = CurvatureTensor::from_fn(space.clone(), |i, j, k, l| {
        half(i, j, k, l) - half(j, i, k, l)
    });
    let weyl = riemann.weyl_projection();
    Ok(PointFrame {
        point: DVector::from_column_slice(point),
        space,
        christoffel: gamma,
        riemann,
        weyl,
    })
}

/// Stream offset keeping point draws independent of vector and plane draws.
pub const POINT_STREAM: u64 = 1 << 48;

/// `n` chart points drawn uniformly from the family's coordinate box. Points
/// where the metric is nearly singular or has the wrong signature are
/// redrawn from the same stream.
pub fn sample_points(field: &MetricField, n: usize, seed: u64) -> Result<Vec<DVector<f64>>> {
    let m = field.dim();
    let r = field.sample_radius();
    (0..n)
        .map(|i| {
            let mut rng = stream_rng(seed, POINT_STREAM + i as u64);
            for _ in 0..10_000 {
                let x: Vec<f64> = (0..m).map(|_| rng.random_range(-r..=r)).collect();
                let Ok(g) = field.gram(&x) else { continue };
                if g.determinant().abs() < DET_FLOOR {
                    continue;
                }
                if field.inner_product(&x).is_ok() {
                    return Ok(DVector::from_vec(x));
                }
            }
            Err(Error::Degenerate(format!(
                "no admissible chart point found for {field}"
            )))
        })
        .collect()
}
