//! Second-order jets: truncated Taylor expansions carrying a value, gradient
//! and Hessian, used to differentiate closed-form metrics exactly.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Arithmetic shared by plain `f64` evaluation and jet evaluation, so each
/// metric is written once.
pub trait Scalar:
    Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    /// A constant of the same shape as `self`.
    fn lift(&self, c: f64) -> Self;
    fn value(&self) -> f64;
    fn scale(&self, c: f64) -> Self;
    fn exp(&self) -> Self;
    fn recip(&self) -> Result<Self>;

    fn powi(&self, n: u32) -> Self {
        let mut acc = self.lift(1.0);
        for _ in 0..n {
            acc = acc * self.clone();
        }
        acc
    }

    fn checked_div(&self, other: &Self) -> Result<Self> {
        Ok(self.clone() * other.recip()?)
    }
}

impl Scalar for f64 {
    fn lift(&self, c: f64) -> Self {
        c
    }

    fn value(&self) -> f64 {
        *self
    }

    fn scale(&self, c: f64) -> Self {
        self * c
    }

    fn exp(&self) -> Self {
        f64::exp(*self)
    }

    fn recip(&self) -> Result<Self> {
        if *self == 0.0 {
            return Err(Error::ZeroJetDivision);
        }
        Ok(1.0 / self)
    }

    fn powi(&self, n: u32) -> Self {
        f64::powi(*self, n as i32)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Jet2 {
    pub value: f64,
    pub grad: DVector<f64>,
    pub hess: DMatrix<f64>,
}

impl Jet2 {
    pub fn constant(c: f64, n: usize) -> Self {
        Jet2 {
            value: c,
            grad: DVector::zeros(n),
            hess: DMatrix::zeros(n, n),
        }
    }

    /// The coordinate function `x_i` expanded at a point where `x_i = a`.
    pub fn variable(a: f64, i: usize, n: usize) -> Self {
        let mut j = Jet2::constant(a, n);
        j.grad[i] = 1.0;
        j
    }

    /// Coordinate jets for every component of `point`.
    pub fn seed(point: &[f64]) -> Vec<Jet2> {
        let n = point.len();
        point
            .iter()
            .enumerate()
            .map(|(i, &a)| Jet2::variable(a, i, n))
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    /// `f ∘ self` for a scalar function with `f(v), f'(v), f''(v)` given at
    /// `v = self.value`.
    pub fn compose(&self, f0: f64, f1: f64, f2: f64) -> Jet2 {
        Jet2 {
            value: f0,
            grad: &self.grad * f1,
            hess: &self.hess * f1 + (&self.grad * self.grad.transpose()) * f2,
        }
    }
}

impl Add for Jet2 {
    type Output = Jet2;

    fn add(self, rhs: Jet2) -> Jet2 {
        Jet2 {
            value: self.value + rhs.value,
            grad: self.grad + rhs.grad,
            hess: self.hess + rhs.hess,
        }
    }
}

impl Sub for Jet2 {
    type Output = Jet2;

    fn sub(self, rhs: Jet2) -> Jet2 {
        Jet2 {
            value: self.value - rhs.value,
            grad: self.grad - rhs.grad,
            hess: self.hess - rhs.hess,
        }
    }
}

impl Neg for Jet2 {
    type Output = Jet2;

    fn neg(self) -> Jet2 {
        Jet2 {
            value: -self.value,
            grad: -self.grad,
            hess: -self.hess,
        }
    }
}

impl Mul for Jet2 {
    type Output = Jet2;

    // (fg)'' = f''g + f'g'^T + g'f'^T + fg''
    fn mul(self, rhs: Jet2) -> Jet2 {
        let cross = &self.grad * rhs.grad.transpose();
        Jet2 {
            value: self.value * rhs.value,
            grad: &self.grad * rhs.value + &rhs.grad * self.value,
            hess: &self.hess * rhs.value + &rhs.hess * self.value + &cross + cross.transpose(),
        }
    }
}

impl Scalar for Jet2 {
    fn lift(&self, c: f64) -> Self {
        Jet2::constant(c, self.dim())
    }

    fn value(&self) -> f64 {
        self.value
    }

    fn scale(&self, c: f64) -> Self {
        Jet2 {
            value: self.value * c,
            grad: &self.grad * c,
            hess: &self.hess * c,
        }
    }

    fn exp(&self) -> Self {
        let e = self.value.exp();
        self.compose(e, e, e)
    }

    fn recip(&self) -> Result<Self> {
        let v = self.value;
        if v == 0.0 {
            return Err(Error::ZeroJetDivision);
        }
        Ok(self.compose(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v)))
    }
}
