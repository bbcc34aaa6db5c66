//! Shared numerical machinery: the closed antiderivative of
//! `1 / (a + b cos x + c sin x)`, an adaptive Gauss-Kronrod integrator used
//! as its independent check, midpoint sums and bracketed bisection.

mod antiderivative;
mod quadrature;
mod roots;

pub use antiderivative::{antiderivative, definite_integral, TrigRationalIntegrand};
pub use quadrature::{
    adaptive_quadrature, adaptive_quadrature_with, riemann_midpoint_sum, QuadratureEstimate,
    QuadratureOptions,
};
pub use roots::{bisect, BisectOptions};
