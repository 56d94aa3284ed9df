//! Diagonal reproducing kernels `K_n(z,z)`, `K_n^{(0,1)}(z,z)`,
//! `K_n^{(1,1)}(z,z)` and `K_n(z, z̄)`.
//!
//! Two independent routes are kept: direct summation over the basis (valid
//! everywhere) and the Christoffel–Darboux closed forms built from the
//! top pair of polynomials alone (invalid on the real axis for the
//! real-line family and on the unit circle for the circle family).

use num_complex::Complex64;

use crate::basis::{eval_oprl, eval_opuc, JacobiRecurrence, Model, VerblunskySequence};
use crate::error::{Error, Result};

/// Kernel values on the diagonal, stored in a common scale: the true values
/// are the stored ones times `exp(2 * exponent)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelDiagonal {
    /// `Σ |f_j(z)|^2`
    pub k: f64,
    /// `Σ f_j(z) conj(f_j'(z))`
    pub k01: Complex64,
    /// `Σ |f_j'(z)|^2`
    pub k11: f64,
    /// `Σ f_j(z)^2 = K_n(z, z̄)`; not produced by the circle closed form.
    pub kzzbar: Option<Complex64>,
    pub exponent: f64,
}

impl KernelDiagonal {
    /// Express `self` in the scale of `exponent`.
    pub fn rescaled_to(&self, exponent: f64) -> KernelDiagonal {
        let f = (2.0 * (self.exponent - exponent)).exp();
        KernelDiagonal {
            k: self.k * f,
            k01: self.k01 * f,
            k11: self.k11 * f,
            kzzbar: self.kzzbar.map(|v| v * f),
            exponent,
        }
    }

    /// `k11 k - |k01|^2` normalized by `k11 k`; nonnegative up to rounding.
    pub fn gram_defect(&self) -> f64 {
        let prod = self.k11 * self.k;
        if prod == 0.0 {
            return 0.0;
        }
        (prod - self.k01.norm_sqr()) / prod
    }
}

/// Direct summation of the kernels over `f_0, ..., f_n`.
pub fn kernel_direct(model: &Model, n: usize, z: Complex64) -> Result<KernelDiagonal> {
    let mut k = 0.0;
    let mut k11 = 0.0;
    let mut k01 = Complex64::new(0.0, 0.0);
    let mut kzz = Complex64::new(0.0, 0.0);
    let exponent = model.walk(n, z, |_, t| {
        if t.rescale != 1.0 {
            let s = t.rescale * t.rescale;
            k *= s;
            k11 *= s;
            k01 *= s;
            kzz *= s;
        }
        k += t.value.norm_sqr();
        k11 += t.deriv.norm_sqr();
        k01 += t.value * t.deriv.conj();
        kzz += t.value * t.value;
    })?;
    Ok(KernelDiagonal {
        k,
        k01,
        k11,
        kzzbar: Some(kzz),
        exponent,
    })
}

/// Christoffel–Darboux forms for the real-line family, using
/// `k_n / k_{n+1} = a_n`:
///
/// ```text
/// K      = a_n Im(p_{n+1} conj p_n) / y
/// K01    = a_n (p_{n+1} conj p_n' - p_n conj p_{n+1}') / (2iy) + K / (2iy)
/// K11    = a_n Im(p_{n+1}' conj p_n') / y - (K01 - conj K01) / (2iy)
/// K(z,z̄) = a_n (p_{n+1}' p_n - p_n' p_{n+1})
/// ```
pub fn kernel_cd_oprl(
    rec: &JacobiRecurrence,
    n: usize,
    z: Complex64,
    axis: f64,
) -> Result<KernelDiagonal> {
    let y = z.im;
    if !(y.abs() > axis) {
        return Err(Error::Domain {
            form: "real-line Christoffel-Darboux kernel",
            z,
            reason: "inside the real-axis exclusion band",
        });
    }
    let pair = eval_oprl(rec, n, z)?;
    let (p, q, dp, dq) = (pair.lower, pair.upper, pair.lower_deriv, pair.upper_deriv);
    let a = rec.a(n);
    let two_iy = Complex64::new(0.0, 2.0 * y);
    let k = a * (q * p.conj()).im / y;
    let k01 = (a * (q * dp.conj() - p * dq.conj()) + k) / two_iy;
    let k11 = a * (dq * dp.conj()).im / y - ((k01 - k01.conj()) / two_iy).re;
    let kzzbar = a * (dq * p - dp * q);
    Ok(KernelDiagonal {
        k,
        k01,
        k11,
        kzzbar: Some(kzzbar),
        exponent: pair.exponent,
    })
}

/// Christoffel–Darboux forms for the circle family, with `d = 1 - |z|^2`:
///
/// ```text
/// K   = (|φ*_{n+1}|^2 - |φ_{n+1}|^2) / d
/// K01 = (conj(φ*'_{n+1}) φ*_{n+1} - conj(φ'_{n+1}) φ_{n+1}) / d + z K / d
/// K11 = (|φ*'_{n+1}|^2 - |φ'_{n+1}|^2) / d + (z̄ K01 + z conj K01 + K) / d
/// ```
pub fn kernel_cd_opuc(
    v: &VerblunskySequence,
    n: usize,
    z: Complex64,
    circle: f64,
) -> Result<KernelDiagonal> {
    if !((z.norm() - 1.0).abs() > circle) {
        return Err(Error::Domain {
            form: "circle Christoffel-Darboux kernel",
            z,
            reason: "inside the unit-circle exclusion annulus",
        });
    }
    let pair = eval_opuc(v, n, z)?;
    let (phi, phis, dphi, dphis) = (pair.lower, pair.upper, pair.lower_deriv, pair.upper_deriv);
    let d = 1.0 - z.norm_sqr();
    let k = (phis.norm_sqr() - phi.norm_sqr()) / d;
    let k01 = (dphis.conj() * phis - dphi.conj() * phi + z * k) / d;
    let k11 = (dphis.norm_sqr() - dphi.norm_sqr()) / d
        + ((z.conj() * k01 + z * k01.conj()).re + k) / d;
    Ok(KernelDiagonal {
        k,
        k01,
        k11,
        kzzbar: None,
        exponent: pair.exponent,
    })
}

/// Closed-form kernels where valid, direct summation otherwise.
pub fn kernel_auto(
    model: &Model,
    n: usize,
    z: Complex64,
    excl: &crate::basis::Exclusion,
) -> Result<KernelDiagonal> {
    let cd = match model {
        Model::Oprl(rec) => kernel_cd_oprl(rec, n, z, excl.axis),
        Model::Opuc(v) => kernel_cd_opuc(v, n, z, excl.circle),
    };
    match cd {
        Err(Error::Domain { .. }) => kernel_direct(model, n, z),
        other => other,
    }
}
