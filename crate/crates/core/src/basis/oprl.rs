use num_complex::Complex64;

use super::{renormalize, RatioState, ScaledPair, Term};
use crate::error::{Error, Result};

/// Recurrence coefficients of orthonormal polynomials on the real line,
///
/// ```text
/// z p_j(z) = a_j p_{j+1}(z) + b_j p_j(z) + a_{j-1} p_{j-1}(z),   p_{-1} = 0, p_0 = 1,
/// ```
///
/// stored as a finite prefix followed by a constant tail `(tail_a, tail_b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiRecurrence {
    a: Vec<f64>,
    b: Vec<f64>,
    tail_a: f64,
    tail_b: f64,
}

/// Limits `a_j -> a`, `b_j -> b` of a Nevai-class recurrence.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct NevaiParams {
    pub a: f64,
    pub b: f64,
}

impl NevaiParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && a >= 0.0 && b.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "Nevai parameters need a >= 0 and finite b, got a = {a}, b = {b}"
            )));
        }
        Ok(NevaiParams { a, b })
    }
}

impl JacobiRecurrence {
    pub fn new(a: Vec<f64>, b: Vec<f64>, tail_a: f64, tail_b: f64) -> Result<Self> {
        if let Some(bad) = a.iter().chain([&tail_a]).find(|x| !(x.is_finite() && **x > 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "off-diagonal coefficients must be finite and positive, found {bad}"
            )));
        }
        if let Some(bad) = b.iter().chain([&tail_b]).find(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "diagonal coefficients must be finite, found {bad}"
            )));
        }
        Ok(JacobiRecurrence {
            a,
            b,
            tail_a,
            tail_b,
        })
    }

    /// `a_j = a`, `b_j = b` for every `j`.
    pub fn constant(a: f64, b: f64) -> Result<Self> {
        Self::new(Vec::new(), Vec::new(), a, b)
    }

    /// Orthonormal Chebyshev polynomials of the first kind,
    /// `p_0 = 1`, `p_j = sqrt(2) T_j`.
    pub fn chebyshev() -> Self {
        JacobiRecurrence {
            a: vec![std::f64::consts::FRAC_1_SQRT_2],
            b: Vec::new(),
            tail_a: 0.5,
            tail_b: 0.0,
        }
    }

    #[inline]
    pub fn a(&self, j: usize) -> f64 {
        self.a.get(j).copied().unwrap_or(self.tail_a)
    }

    #[inline]
    pub fn b(&self, j: usize) -> f64 {
        self.b.get(j).copied().unwrap_or(self.tail_b)
    }

    /// Limits of the coefficients (the constant tail).
    pub fn limit(&self) -> NevaiParams {
        NevaiParams {
            a: self.tail_a,
            b: self.tail_b,
        }
    }

    /// A radius enclosing the support of the orthogonality measure.
    pub fn support_radius(&self) -> f64 {
        let n = self.a.len().max(self.b.len()) + 1;
        (0..=n)
            .map(|j| {
                let prev = if j == 0 { 0.0 } else { self.a(j - 1) };
                self.b(j).abs() + self.a(j) + prev
            })
            .fold(0.0, f64::max)
    }
}

/// Forward three-term recurrence carrying values and derivatives.
pub(crate) struct OprlStepper<'a> {
    rec: &'a JacobiRecurrence,
    z: Complex64,
    /// Index of `cur`.
    j: usize,
    prev: Complex64,
    cur: Complex64,
    dprev: Complex64,
    dcur: Complex64,
    pub exponent: f64,
}

impl<'a> OprlStepper<'a> {
    pub fn new(rec: &'a JacobiRecurrence, z: Complex64) -> Self {
        OprlStepper {
            rec,
            z,
            j: 0,
            prev: Complex64::new(0.0, 0.0),
            cur: Complex64::new(1.0, 0.0),
            dprev: Complex64::new(0.0, 0.0),
            dcur: Complex64::new(0.0, 0.0),
            exponent: 0.0,
        }
    }

    /// Advance from `p_j` to `p_{j+1}`; returns the rescale factor applied.
    #[inline]
    pub fn step(&mut self) -> Result<f64> {
        let j = self.j;
        let a = self.rec.a(j);
        let a_prev = if j == 0 { 0.0 } else { self.rec.a(j - 1) };
        let shift = self.z - self.rec.b(j);
        let next = (shift * self.cur - a_prev * self.prev) / a;
        let dnext = (self.cur + shift * self.dcur - a_prev * self.dprev) / a;
        self.prev = self.cur;
        self.dprev = self.dcur;
        self.cur = next;
        self.dcur = dnext;
        self.j += 1;
        renormalize(
            &mut [
                &mut self.prev,
                &mut self.cur,
                &mut self.dprev,
                &mut self.dcur,
            ],
            &mut self.exponent,
            self.j,
            self.z,
        )
    }

    #[inline]
    pub fn term(&self, rescale: f64) -> Term {
        Term {
            value: self.cur,
            deriv: self.dcur,
            rescale,
        }
    }
}

/// `(p_n(z), p_{n+1}(z))` and their derivatives, scaled.
pub fn eval_oprl(rec: &JacobiRecurrence, n: usize, z: Complex64) -> Result<ScaledPair> {
    let mut st = OprlStepper::new(rec, z);
    for _ in 0..=n {
        st.step()?;
    }
    let pair = ScaledPair {
        lower: st.prev,
        upper: st.cur,
        lower_deriv: st.dprev,
        upper_deriv: st.dcur,
        exponent: st.exponent,
    };
    check_finite(&pair, n, z)?;
    Ok(pair)
}

fn check_finite(pair: &ScaledPair, step: usize, z: Complex64) -> Result<()> {
    let ok = [pair.lower, pair.upper, pair.lower_deriv, pair.upper_deriv]
        .iter()
        .all(|v| v.re.is_finite() && v.im.is_finite())
        && pair.exponent.is_finite();
    if ok {
        Ok(())
    } else {
        Err(Error::Overflow { step, z })
    }
}

/// Relative size below which a ratio `p_{j+1}/p_j` is treated as a zero of
/// `p_{j+1}`.
const POLE_THRESHOLD: f64 = 1e-13;

/// `a_n(z) = p_{n+1}(z) / p_n(z)` and its derivative, from the ratio form of
/// the recurrence
///
/// ```text
/// r_j = (z - b_j - a_{j-1} / r_{j-1}) / a_j,   r_j' = (1 + a_{j-1} r_{j-1}' / r_{j-1}^2) / a_j.
/// ```
///
/// The imaginary part is propagated separately through
/// `Im r_j = (Im z + a_{j-1} Im r_{j-1} / |r_{j-1}|^2) / a_j`, a sum of
/// same-signed terms, so it keeps full relative accuracy close to the axis.
pub fn ratio_oprl(rec: &JacobiRecurrence, n: usize, z: Complex64) -> Result<RatioState> {
    let y = z.im;
    let mut r = Complex64::new(0.0, 0.0);
    let mut dr = Complex64::new(0.0, 0.0);
    let mut im = 0.0;
    for j in 0..=n {
        let a = rec.a(j);
        let shift = z - rec.b(j);
        let (next, dnext, im_next, scale) = if j == 0 {
            (shift / a, Complex64::new(1.0 / a, 0.0), y / a, shift.norm() / a)
        } else {
            let a_prev = rec.a(j - 1);
            let inv = r.inv();
            let inv_sq = inv * inv;
            let r_norm_sq = r.norm_sqr();
            (
                (shift - a_prev * inv) / a,
                (1.0 + a_prev * dr * inv_sq) / a,
                (y + a_prev * im / r_norm_sq) / a,
                (shift.norm() + a_prev * inv.norm()) / a,
            )
        };
        r = Complex64::new(next.re, im_next);
        dr = dnext;
        im = im_next;
        // r_j is the denominator of the next step; only r_0..r_{n-1} matter.
        if j < n && !(r.norm() > POLE_THRESHOLD * scale) {
            return Err(Error::PoleProximity { z });
        }
    }
    if !(r.re.is_finite() && r.im.is_finite() && dr.re.is_finite() && dr.im.is_finite()) {
        return Err(Error::PoleProximity { z });
    }
    Ok(RatioState {
        ratio: r,
        ratio_deriv: dr,
    })
}
