use serde::{Deserialize, Serialize};

use super::{JacobiRecurrence, Model, VerblunskySequence};
use crate::error::Result;

/// Named basis families as they appear in experiment configs, e.g.
/// `{"family": "geometric-alpha", "c": 0.3, "r": 0.5}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelSpec {
    /// Orthonormal Chebyshev polynomials: `a_0 = 1/sqrt 2`, `a_j = 1/2`, `b_j = 0`.
    Chebyshev {},
    /// Constant recurrence `a_j = a`, `b_j = b`.
    NevaiAb { a: f64, b: f64 },
    /// Explicit real-line prefix with a constant tail.
    Jacobi {
        a: Vec<f64>,
        b: Vec<f64>,
        tail_a: f64,
        tail_b: f64,
    },
    /// Circle family with all Verblunsky coefficients zero (monomials).
    Lebesgue {},
    /// `α_j = c r^j`.
    GeometricAlpha { c: f64, r: f64 },
    /// `α_j = c`.
    ConstantAlpha { c: f64 },
    /// Explicit circle prefix with a constant tail.
    Verblunsky { alpha: Vec<f64>, tail: f64 },
}

impl ModelSpec {
    /// Family names accepted in configs and on the command line.
    pub const FAMILIES: [&'static str; 7] = [
        "chebyshev",
        "nevai-ab",
        "jacobi",
        "lebesgue",
        "geometric-alpha",
        "constant-alpha",
        "verblunsky",
    ];

    pub fn build(&self) -> Result<Model> {
        Ok(match self {
            ModelSpec::Chebyshev {} => Model::Oprl(JacobiRecurrence::chebyshev()),
            ModelSpec::NevaiAb { a, b } => Model::Oprl(JacobiRecurrence::constant(*a, *b)?),
            ModelSpec::Jacobi {
                a,
                b,
                tail_a,
                tail_b,
            } => Model::Oprl(JacobiRecurrence::new(a.clone(), b.clone(), *tail_a, *tail_b)?),
            ModelSpec::Lebesgue {} => Model::Opuc(VerblunskySequence::lebesgue()),
            ModelSpec::GeometricAlpha { c, r } => {
                Model::Opuc(VerblunskySequence::geometric(*c, *r)?)
            }
            ModelSpec::ConstantAlpha { c } => Model::Opuc(VerblunskySequence::constant(*c)?),
            ModelSpec::Verblunsky { alpha, tail } => {
                Model::Opuc(VerblunskySequence::new(alpha.clone(), *tail)?)
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::Chebyshev {} => "chebyshev",
            ModelSpec::NevaiAb { .. } => "nevai-ab",
            ModelSpec::Jacobi { .. } => "jacobi",
            ModelSpec::Lebesgue {} => "lebesgue",
            ModelSpec::GeometricAlpha { .. } => "geometric-alpha",
            ModelSpec::ConstantAlpha { .. } => "constant-alpha",
            ModelSpec::Verblunsky { .. } => "verblunsky",
        }
    }
}
