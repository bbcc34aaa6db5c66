use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Coefficients of `f(x) = 1 / (a + b cos x + c sin x)` with `a² > b² + c²`,
/// which keeps the denominator strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrigRationalIntegrand {
    a: f64,
    b: f64,
    c: f64,
}

impl TrigRationalIntegrand {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        let margin = a * a - b * b - c * c;
        if !(margin > 0.0 && a > 0.0) || !margin.is_finite() {
            return Err(Error::ValidityViolation(margin));
        }
        Ok(Self { a, b, c })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// `a² - b² - c²`.
    pub fn margin(&self) -> f64 {
        self.a * self.a - self.b * self.b - self.c * self.c
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (s, c) = x.sin_cos();
        1.0 / (self.a + self.b * c + self.c * s)
    }

    /// Same integrand with `c` negated; its antiderivative is `-F(-x)`.
    pub fn mirrored(&self) -> Self {
        Self { c: -self.c, ..*self }
    }
}

/// `F(x) = 2/√(a²-b²-c²) · atan(((a-b) tan(x/2) + c) / √(a²-b²-c²))`
/// on the principal branch `|x| < π`.
pub fn antiderivative(coeffs: &TrigRationalIntegrand, x: f64) -> Result<f64> {
    if x.is_nan() || x.abs() >= PI {
        return Err(Error::BranchOverflow(x.abs()));
    }
    let root = coeffs.margin().sqrt();
    let arg = ((coeffs.a - coeffs.b) * (x / 2.0).tan() + coeffs.c) / root;
    Ok(2.0 / root * arg.atan())
}

/// `F(hi) - F(lo)` for `-π < lo <= hi < π`.
pub fn definite_integral(coeffs: &TrigRationalIntegrand, lo: f64, hi: f64) -> Result<f64> {
    if lo > hi {
        return Err(crate::error::invalid("lo", "must not exceed hi"));
    }
    Ok(antiderivative(coeffs, hi)? - antiderivative(coeffs, lo)?)
}
