use num_complex::Complex64;

use super::{renormalize, RatioState, ScaledPair, Term};
use crate::error::{Error, Result};

/// Real Verblunsky coefficients `α_j ∈ (-1, 1)` of orthonormal polynomials on
/// the unit circle,
///
/// ```text
/// φ_{j+1}(z)  = (z φ_j(z) - α_j φ*_j(z)) / sqrt(1 - α_j^2)
/// φ*_{j+1}(z) = (φ*_j(z) - α_j z φ_j(z)) / sqrt(1 - α_j^2),   φ_0 = φ*_0 = 1.
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct VerblunskySequence {
    rule: AlphaRule,
}

#[derive(Debug, Clone, PartialEq)]
enum AlphaRule {
    /// Explicit prefix, then a constant tail.
    Prefix { alpha: Vec<f64>, tail: f64 },
    /// `α_j = c r^j`.
    Geometric { c: f64, r: f64 },
}

fn check_alpha(x: f64) -> Result<()> {
    if x.is_finite() && x.abs() < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "Verblunsky coefficients must lie in (-1, 1), found {x}"
        )))
    }
}

impl VerblunskySequence {
    pub fn new(alpha: Vec<f64>, tail: f64) -> Result<Self> {
        for &x in alpha.iter().chain([&tail]) {
            check_alpha(x)?;
        }
        Ok(VerblunskySequence {
            rule: AlphaRule::Prefix { alpha, tail },
        })
    }

    /// All coefficients zero: the monomials `φ_j = z^j` (normalized arclength).
    pub fn lebesgue() -> Self {
        VerblunskySequence {
            rule: AlphaRule::Prefix {
                alpha: Vec::new(),
                tail: 0.0,
            },
        }
    }

    /// `α_j = c` for every `j`.
    pub fn constant(c: f64) -> Result<Self> {
        Self::new(Vec::new(), c)
    }

    /// `α_j = c r^j` with `|c| < 1` and `|r| <= 1`.
    pub fn geometric(c: f64, r: f64) -> Result<Self> {
        check_alpha(c)?;
        if !(r.is_finite() && r.abs() <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "geometric ratio must satisfy |r| <= 1, got {r}"
            )));
        }
        Ok(VerblunskySequence {
            rule: AlphaRule::Geometric { c, r },
        })
    }

    #[inline]
    pub fn alpha(&self, j: usize) -> f64 {
        match &self.rule {
            AlphaRule::Prefix { alpha, tail } => alpha.get(j).copied().unwrap_or(*tail),
            AlphaRule::Geometric { c, r } => c * r.powi(j.min(i32::MAX as usize) as i32),
        }
    }

    /// Whether `α_j -> 0`.
    pub fn is_nevai(&self) -> bool {
        match &self.rule {
            AlphaRule::Prefix { tail, .. } => *tail == 0.0,
            AlphaRule::Geometric { c, r } => *c == 0.0 || r.abs() < 1.0,
        }
    }
}

/// Forward Szegő recurrence carrying `φ_j`, `φ*_j` and their derivatives.
pub(crate) struct OpucStepper<'a> {
    v: &'a VerblunskySequence,
    z: Complex64,
    j: usize,
    phi: Complex64,
    phis: Complex64,
    dphi: Complex64,
    dphis: Complex64,
    pub exponent: f64,
}

impl<'a> OpucStepper<'a> {
    pub fn new(v: &'a VerblunskySequence, z: Complex64) -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        OpucStepper {
            v,
            z,
            j: 0,
            phi: one,
            phis: one,
            dphi: zero,
            dphis: zero,
            exponent: 0.0,
        }
    }

    #[inline]
    pub fn step(&mut self) -> Result<f64> {
        let alpha = self.v.alpha(self.j);
        let inv_rho = 1.0 / (1.0 - alpha * alpha).sqrt();
        let z = self.z;
        let zphi = z * self.phi;
        let dzphi = self.phi + z * self.dphi;
        let phi = (zphi - alpha * self.phis) * inv_rho;
        let phis = (self.phis - alpha * zphi) * inv_rho;
        let dphi = (dzphi - alpha * self.dphis) * inv_rho;
        let dphis = (self.dphis - alpha * dzphi) * inv_rho;
        self.phi = phi;
        self.phis = phis;
        self.dphi = dphi;
        self.dphis = dphis;
        self.j += 1;
        renormalize(
            &mut [
                &mut self.phi,
                &mut self.phis,
                &mut self.dphi,
                &mut self.dphis,
            ],
            &mut self.exponent,
            self.j,
            self.z,
        )
    }

    #[inline]
    pub fn term(&self, rescale: f64) -> Term {
        Term {
            value: self.phi,
            deriv: self.dphi,
            rescale,
        }
    }
}

/// `(φ_{n+1}(z), φ*_{n+1}(z))` and their derivatives, scaled.
pub fn eval_opuc(v: &VerblunskySequence, n: usize, z: Complex64) -> Result<ScaledPair> {
    let mut st = OpucStepper::new(v, z);
    for _ in 0..=n {
        st.step()?;
    }
    let pair = ScaledPair {
        lower: st.phi,
        upper: st.phis,
        lower_deriv: st.dphi,
        upper_deriv: st.dphis,
        exponent: st.exponent,
    };
    let finite = [pair.lower, pair.upper, pair.lower_deriv, pair.upper_deriv]
        .iter()
        .all(|c| c.re.is_finite() && c.im.is_finite());
    if !finite || !pair.exponent.is_finite() {
        return Err(Error::Overflow { step: n + 1, z });
    }
    Ok(pair)
}

/// `b_n(z) = φ_{n+1}(z) / φ*_{n+1}(z)` for `|z| < 1 - circle`, via the Möbius
/// form `u_{j+1} = (z u_j - α_j) / (1 - α_j z u_j)`, `u_0 = 1`.
pub fn ratio_opuc_interior(
    v: &VerblunskySequence,
    n: usize,
    z: Complex64,
    circle: f64,
) -> Result<RatioState> {
    if !(z.norm() < 1.0 - circle) {
        return Err(Error::Domain {
            form: "interior circle ratio",
            z,
            reason: "requires |z| < 1 - circle exclusion",
        });
    }
    let mut u = Complex64::new(1.0, 0.0);
    let mut du = Complex64::new(0.0, 0.0);
    for j in 0..=n {
        let alpha = v.alpha(j);
        let zu = z * u;
        let dzu = u + z * du;
        let den = 1.0 - alpha * zu;
        u = (zu - alpha) / den;
        du = dzu * (1.0 - alpha * alpha) / (den * den);
    }
    Ok(RatioState {
        ratio: u,
        ratio_deriv: du,
    })
}

/// `c_n(z) = φ*_{n+1}(z) / φ_{n+1}(z)` for `|z| > 1 + circle`, via
/// `d_{j+1} = (d_j - α_j z) / (z - α_j d_j)`, `d_0 = 1`.
pub fn ratio_opuc_exterior(
    v: &VerblunskySequence,
    n: usize,
    z: Complex64,
    circle: f64,
) -> Result<RatioState> {
    if !(z.norm() > 1.0 + circle) {
        return Err(Error::Domain {
            form: "exterior circle ratio",
            z,
            reason: "requires |z| > 1 + circle exclusion",
        });
    }
    let mut d = Complex64::new(1.0, 0.0);
    let mut dd = Complex64::new(0.0, 0.0);
    for j in 0..=n {
        let alpha = v.alpha(j);
        let den = z - alpha * d;
        let next = (d - alpha * z) / den;
        dd = (z * dd - d) * (1.0 - alpha * alpha) / (den * den);
        d = next;
    }
    if !(d.re.is_finite() && d.im.is_finite() && dd.re.is_finite() && dd.im.is_finite()) {
        return Err(Error::Overflow { step: n + 1, z });
    }
    Ok(RatioState {
        ratio: d,
        ratio_deriv: dd,
    })
}

/// `κ_n = Π_{j=0}^{n} (1 - α_j^2)^{-1/2}`, the leading coefficient of
/// `φ_{n+1}`, evaluated in log space.
pub fn leading_coeff_opuc(v: &VerblunskySequence, n: usize) -> f64 {
    ln_leading_coeff(v, n).exp()
}

fn ln_leading_coeff(v: &VerblunskySequence, n: usize) -> f64 {
    -0.5 * (0..=n).map(|j| (-v.alpha(j).powi(2)).ln_1p()).sum::<f64>()
}

/// `log(κ_n) / n`; tends to zero for measures regular in the
/// Ullman–Stahl–Totik sense.
pub fn ust_regularity_diagnostic(v: &VerblunskySequence, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "regularity diagnostic needs n >= 1".into(),
        ));
    }
    Ok(ln_leading_coeff(v, n) / n as f64)
}
