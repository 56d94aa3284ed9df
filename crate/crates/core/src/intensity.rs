//! Expected zero density of `P_n = Σ η_j f_j` with i.i.d. standard complex
//! Gaussian `η_j`.
//!
//! Three equivalent forms are provided. The general kernel form
//!
//! ```text
//! ρ_n(z) = (K11 K - |K01|^2) / (π K^2)
//! ```
//!
//! is valid everywhere. The real-line ratio form
//! `ρ_n = (1 - h_n^2) / (4π y^2)` with `h_n^2 = y^2 |a_n'|^2 / (Im a_n)^2`,
//! `a_n = p_{n+1}/p_n`, and the circle ratio forms
//! `ρ_n = (1 - |k_n|^2) / (π (1 - |z|^2)^2)` with
//! `k_n = (1 - |z|^2) b_n' / (1 - |b_n|^2)` (and the exterior analogue with
//! `c_n = 1/b_n`) need only a single ratio and its derivative, and fall back
//! to the kernel form inside their exclusion bands.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::basis::{
    ratio_opuc_exterior, ratio_opuc_interior, ratio_oprl, Exclusion, JacobiRecurrence, Model,
    NevaiParams, VerblunskySequence,
};
use crate::error::{Error, Result};
use crate::kernels::{kernel_direct, KernelDiagonal};

/// Relative slack under which a negative determinant is treated as rounding.
const CLAMP_SLACK: f64 = 1e-12;

/// `ρ_n` from diagonal kernels. The shared scale cancels.
pub fn rho_general(kd: &KernelDiagonal) -> Result<f64> {
    if !(kd.k > 0.0) || !kd.k.is_finite() {
        return Err(Error::DegenerateKernel { k: kd.k });
    }
    let ratio11 = kd.k11 / kd.k;
    let det = ratio11 - (kd.k01 / kd.k).norm_sqr();
    if det >= 0.0 {
        Ok(det / PI)
    } else if det >= -CLAMP_SLACK * ratio11 {
        Ok(0.0)
    } else {
        Err(Error::NegativeIntensity { value: det })
    }
}

/// `ρ_n` by direct kernel summation; valid at every `z`.
pub fn rho_direct(model: &Model, n: usize, z: Complex64) -> Result<f64> {
    rho_general(&kernel_direct(model, n, z)?)
}

/// Real-line ratio form, falling back to direct summation within
/// `excl.ratio_axis` of the real axis or next to a zero of `p_n`.
pub fn rho_oprl(rec: &JacobiRecurrence, n: usize, z: Complex64, excl: &Exclusion) -> Result<f64> {
    if n == 0 {
        return Ok(0.0);
    }
    let y = z.im;
    let fallback = || rho_direct(&Model::Oprl(rec.clone()), n, z);
    if !(y.abs() > excl.ratio_axis) {
        return fallback();
    }
    let st = match ratio_oprl(rec, n, z) {
        Ok(st) => st,
        Err(Error::PoleProximity { .. }) => return fallback(),
        Err(e) => return Err(e),
    };
    // h_n only enters squared, so its sign is never needed.
    let h_sq = (y * st.ratio_deriv.norm() / st.ratio.im).powi(2);
    let one_minus = 1.0 - h_sq;
    if one_minus >= 0.0 {
        Ok(one_minus / (4.0 * PI * y * y))
    } else if one_minus >= -CLAMP_SLACK {
        Ok(0.0)
    } else {
        fallback()
    }
}

/// Circle ratio forms: `b_n` inside the disk, `c_n` outside, direct
/// summation within `excl.circle` of the unit circle.
pub fn rho_opuc(v: &VerblunskySequence, n: usize, z: Complex64, excl: &Exclusion) -> Result<f64> {
    if n == 0 {
        return Ok(0.0);
    }
    let r = z.norm();
    let st = if r < 1.0 - excl.circle {
        ratio_opuc_interior(v, n, z, excl.circle)?
    } else if r > 1.0 + excl.circle {
        ratio_opuc_exterior(v, n, z, excl.circle)?
    } else {
        return rho_direct(&Model::Opuc(v.clone()), n, z);
    };
    let d = 1.0 - z.norm_sqr();
    let m = st.ratio.norm();
    let k = d * st.ratio_deriv / ((1.0 - m) * (1.0 + m));
    let one_minus = 1.0 - k.norm_sqr();
    if one_minus >= 0.0 {
        Ok(one_minus / (PI * d * d))
    } else if one_minus >= -CLAMP_SLACK {
        Ok(0.0)
    } else {
        rho_direct(&Model::Opuc(v.clone()), n, z)
    }
}

/// The preferred evaluation path for `model`.
pub fn rho(model: &Model, n: usize, z: Complex64, excl: &Exclusion) -> Result<f64> {
    match model {
        Model::Oprl(rec) => rho_oprl(rec, n, z, excl),
        Model::Opuc(v) => rho_opuc(v, n, z, excl),
    }
}

/// Branch of `sqrt((z-b)^2 - 4a^2)` asymptotic to `z - b` at infinity.
fn exterior_sqrt(p: &NevaiParams, z: Complex64) -> Complex64 {
    let w = z - p.b;
    let mut s = (w * w - 4.0 * p.a * p.a).sqrt();
    let align = (s * w.conj()).re;
    if align < 0.0 || (align == 0.0 && s.im * w.im < 0.0) {
        s = -s;
    }
    s
}

/// Distance from `z` to the limiting support `[b - 2a, b + 2a]`.
pub fn support_distance(p: &NevaiParams, z: Complex64) -> f64 {
    let lo = p.b - 2.0 * p.a;
    let hi = p.b + 2.0 * p.a;
    let x = z.re.clamp(lo, hi);
    Complex64::new(z.re - x, z.im).norm()
}

/// Distance below which a limit evaluation is flagged as near the support.
pub const NEAR_SUPPORT: f64 = 1e-6;

/// Limiting density for a Nevai-class real-line family,
///
/// ```text
/// 1/(4π y^2) - |z - b + s|^2 / (4π |s^2| Im(z + s)^2),   s = sqrt((z-b)^2 - 4a^2).
/// ```
///
/// Singular on the whole real axis, so real `z` are rejected along with the
/// support segment.
pub fn rho_limit_oprl(p: &NevaiParams, z: Complex64) -> Result<f64> {
    if support_distance(p, z) == 0.0 {
        return Err(Error::Domain {
            form: "real-line limiting density",
            z,
            reason: "z lies on the limiting support",
        });
    }
    let y = z.im;
    if y == 0.0 {
        return Err(Error::Domain {
            form: "real-line limiting density",
            z,
            reason: "closed form is singular on the real axis",
        });
    }
    let s = exterior_sqrt(p, z);
    let w = z - p.b;
    let first = 1.0 / (4.0 * PI * y * y);
    let second = (w + s).norm_sqr() / (4.0 * PI * s.norm_sqr() * (z + s).im.powi(2));
    Ok((first - second).max(0.0))
}

/// Limiting density `1 / (π (1 - |z|^2)^2)` for Nevai-class circle families.
pub fn rho_limit_opuc(z: Complex64) -> Result<f64> {
    let d = 1.0 - z.norm_sqr();
    if d == 0.0 {
        return Err(Error::Domain {
            form: "circle limiting density",
            z,
            reason: "undefined on the unit circle",
        });
    }
    Ok(1.0 / (PI * d * d))
}

/// `H(τ) = (e^τ - 1)/τ`, with `H(0) = 1`.
pub fn h_value(tau: f64) -> f64 {
    if tau == 0.0 {
        1.0
    } else {
        tau.exp_m1() / tau
    }
}

/// Below this `|τ|` the series for `H'/H` replaces the quotient.
const SERIES_SWITCH: f64 = 1e-4;

/// `H'(τ)/H(τ) = 1/(1 - e^{-τ}) - 1/τ`, increasing from 0 to 1.
pub fn h_ratio(tau: f64) -> f64 {
    if tau.abs() < SERIES_SWITCH {
        // 1/(1-e^{-τ}) = 1/τ + 1/2 + τ/12 - τ^3/720 + τ^5/30240 - ...
        let t2 = tau * tau;
        0.5 + tau * (1.0 / 12.0 - t2 * (1.0 / 720.0 - t2 / 30240.0))
    } else {
        -1.0 / (-tau).exp_m1() - 1.0 / tau
    }
}

/// Limit of `(1/n) E[N(Ω(S, τ1, τ2))]` for an arc `S` of length `arc_length`:
/// `(|S| / 2π) (H'/H(τ2) - H'/H(τ1))`.
pub fn band_limit_rhs(arc_length: f64, tau1: f64, tau2: f64) -> Result<f64> {
    if !(tau1 < tau2) {
        return Err(Error::InvalidArgument(format!(
            "band needs tau1 < tau2, got {tau1} >= {tau2}"
        )));
    }
    if !(arc_length > 0.0 && arc_length < 2.0 * PI) {
        return Err(Error::InvalidArgument(format!(
            "arc length must lie in (0, 2π), got {arc_length}"
        )));
    }
    Ok(arc_length / (2.0 * PI) * (h_ratio(tau2) - h_ratio(tau1)))
}
