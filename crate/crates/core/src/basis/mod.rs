//! Orthonormal polynomial bases defined by recurrence coefficients.
//!
//! Two families are supported: polynomials orthonormal on the real line
//! (three-term Jacobi recurrence) and on the unit circle (Szegő recurrence
//! with real Verblunsky coefficients). Both are normalized so that the
//! degree-zero element is the constant 1.
//!
//! Values are carried with a shared natural-log exponent: a stored value `v`
//! with exponent `e` stands for `v * exp(e)`. The working pair is divided by
//! its magnitude whenever that magnitude leaves `[1/e, e]`, so evaluation far
//! from the orthogonality set never overflows.

mod family;
mod oprl;
mod opuc;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use family::ModelSpec;
pub use oprl::{eval_oprl, ratio_oprl, JacobiRecurrence, NevaiParams};
pub use opuc::{
    eval_opuc, leading_coeff_opuc, ratio_opuc_exterior, ratio_opuc_interior,
    ust_regularity_diagnostic, VerblunskySequence,
};

pub(crate) use oprl::OprlStepper;
pub(crate) use opuc::OpucStepper;

const UPPER_SQ: f64 = std::f64::consts::E * std::f64::consts::E;
const LOWER_SQ: f64 = 1.0 / UPPER_SQ;

/// Values and derivatives of two consecutive (or paired) basis polynomials
/// sharing one log-scale exponent.
///
/// For the real-line family `lower = p_n`, `upper = p_{n+1}`. For the circle
/// family `lower = φ_{n+1}`, `upper = φ*_{n+1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledPair {
    pub lower: Complex64,
    pub upper: Complex64,
    pub lower_deriv: Complex64,
    pub upper_deriv: Complex64,
    /// True values are the stored ones times `exp(exponent)`.
    pub exponent: f64,
}

impl ScaledPair {
    /// `[lower, upper, lower_deriv, upper_deriv]` with the exponent applied.
    /// Overflows to infinity if the true values are not representable.
    pub fn unscaled(&self) -> [Complex64; 4] {
        let s = self.exponent.exp();
        [
            self.lower * s,
            self.upper * s,
            self.lower_deriv * s,
            self.upper_deriv * s,
        ]
    }

    /// Natural log of `|lower|` including the exponent.
    pub fn ln_abs_lower(&self) -> f64 {
        self.lower.norm().ln() + self.exponent
    }

    /// Natural log of `|upper|` including the exponent.
    pub fn ln_abs_upper(&self) -> f64 {
        self.upper.norm().ln() + self.exponent
    }
}

/// A ratio of two basis polynomials and its derivative in `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioState {
    pub ratio: Complex64,
    pub ratio_deriv: Complex64,
}

/// Widths of the bands where closed forms are numerically unusable and
/// evaluation falls back to direct kernel summation.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Exclusion {
    /// Half-width of the band around the real axis excluded from the
    /// Christoffel–Darboux kernel forms.
    pub axis: f64,
    /// Half-width of the band around the real axis excluded from the
    /// ratio form of the real-line intensity.
    pub ratio_axis: f64,
    /// Half-width of the annulus around the unit circle excluded from the
    /// circle closed forms.
    pub circle: f64,
}

impl Default for Exclusion {
    fn default() -> Self {
        // At these widths each closed form still matches direct summation
        // to about 1e-9 relative for n <= 50; cancellation grows like the
        // inverse square of the distance to the seam.
        Exclusion {
            axis: 5e-2,
            ratio_axis: 1e-2,
            circle: 5e-2,
        }
    }
}

impl Exclusion {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("axis", self.axis),
            ("ratio_axis", self.ratio_axis),
            ("circle", self.circle),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!(
                    "exclusion width `{name}` must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// A basis family: real-line or unit-circle orthonormal polynomials.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Oprl(JacobiRecurrence),
    Opuc(VerblunskySequence),
}

impl From<JacobiRecurrence> for Model {
    fn from(rec: JacobiRecurrence) -> Self {
        Model::Oprl(rec)
    }
}

impl From<VerblunskySequence> for Model {
    fn from(v: VerblunskySequence) -> Self {
        Model::Opuc(v)
    }
}

/// One basis element `f_j(z)` as seen by [`Model::walk`].
#[derive(Debug, Clone, Copy)]
pub(crate) struct Term {
    pub value: Complex64,
    pub deriv: Complex64,
    /// Factor by which everything accumulated from earlier terms must be
    /// multiplied to be expressed in the scale of this term.
    pub rescale: f64,
}

impl Model {
    pub fn is_oprl(&self) -> bool {
        matches!(self, Model::Oprl(_))
    }

    /// Visit `f_0(z), ..., f_n(z)` and their derivatives in order, keeping the
    /// working magnitudes bounded. Returns the log scale of the last term.
    pub(crate) fn walk<F: FnMut(usize, Term)>(
        &self,
        n: usize,
        z: Complex64,
        mut visit: F,
    ) -> Result<f64> {
        match self {
            Model::Oprl(rec) => {
                let mut st = OprlStepper::new(rec, z);
                visit(0, st.term(1.0));
                for j in 1..=n {
                    let rescale = st.step()?;
                    visit(j, st.term(rescale));
                }
                Ok(st.exponent)
            }
            Model::Opuc(v) => {
                let mut st = OpucStepper::new(v, z);
                visit(0, st.term(1.0));
                for j in 1..=n {
                    let rescale = st.step()?;
                    visit(j, st.term(rescale));
                }
                Ok(st.exponent)
            }
        }
    }
}

/// Divide the given values by their common magnitude when it has drifted
/// outside `[1/e, e]`. Returns the multiplicative factor applied (1 if none).
#[inline]
pub(crate) fn renormalize(
    values: &mut [&mut Complex64; 4],
    exponent: &mut f64,
    step: usize,
    z: Complex64,
) -> Result<f64> {
    let m_sq = values[0].norm_sqr().max(values[1].norm_sqr());
    if (LOWER_SQ..=UPPER_SQ).contains(&m_sq) {
        return Ok(1.0);
    }
    if !m_sq.is_finite() || m_sq == 0.0 {
        // norm_sqr can overflow while the entries are still finite.
        let m = values[0].norm().max(values[1].norm());
        if !m.is_finite() || m == 0.0 {
            return Err(Error::Overflow { step, z });
        }
        return Ok(apply_scale(values, exponent, m));
    }
    Ok(apply_scale(values, exponent, m_sq.sqrt()))
}

#[inline]
fn apply_scale(values: &mut [&mut Complex64; 4], exponent: &mut f64, m: f64) -> f64 {
    let inv = 1.0 / m;
    for v in values.iter_mut() {
        **v *= inv;
    }
    *exponent += m.ln();
    inv
}
