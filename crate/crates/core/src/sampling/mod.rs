//! Random polynomials `P_n = Σ η_j f_j` with i.i.d. standard complex Gaussian
//! coefficients, their evaluation, and zero counting.
//!
//! Every sample owns its own ChaCha stream selected by `(master_seed, index)`,
//! so the instance drawn for a given index does not depend on how samples
//! are spread over threads.

mod count;
mod monte_carlo;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use std::sync::Arc;

use crate::basis::Model;
use crate::error::Result;

pub use crate::region::{BoundaryPiece, Region};
pub use count::{count_zeros, CountOptions, ZeroCount};
pub use monte_carlo::{
    mc_expected_zeros, real_axis_mass_probe, MCEstimate, McOptions, MIN_SAMPLES,
};

/// Identifies one independent random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamSeed {
    pub master: u64,
    pub index: u64,
}

impl StreamSeed {
    pub fn new(master: u64, index: u64) -> Self {
        StreamSeed { master, index }
    }

    pub fn rng(self) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.master);
        rng.set_stream(self.index);
        rng
    }
}

/// One draw of the random polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomPolyInstance {
    pub model: Arc<Model>,
    pub eta: Vec<Complex64>,
}

impl RandomPolyInstance {
    pub fn new(model: impl Into<Arc<Model>>, eta: Vec<Complex64>) -> Self {
        RandomPolyInstance {
            model: model.into(),
            eta,
        }
    }

    /// Degree bound `n`; `eta` has `n + 1` entries.
    pub fn degree(&self) -> usize {
        self.eta.len().saturating_sub(1)
    }

    /// The same basis with every coefficient multiplied by `c`.
    pub fn scaled(&self, c: Complex64) -> Self {
        RandomPolyInstance {
            model: Arc::clone(&self.model),
            eta: self.eta.iter().map(|e| e * c).collect(),
        }
    }
}

/// Draw `η_0, ..., η_n`, real part before imaginary part for each `j`.
pub fn sample_instance(model: impl Into<Arc<Model>>, n: usize, seed: StreamSeed) -> RandomPolyInstance {
    let mut rng = seed.rng();
    let eta = (0..=n)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im)
        })
        .collect();
    RandomPolyInstance::new(model, eta)
}

/// `P(z)` and `P'(z)` sharing one log scale: true values are the stored ones
/// times `exp(exponent)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceValue {
    pub value: Complex64,
    pub deriv: Complex64,
    pub exponent: f64,
}

impl InstanceValue {
    /// `P'/P`, independent of the scale.
    pub fn log_derivative(&self) -> Complex64 {
        self.deriv / self.value
    }

    pub fn unscaled(&self) -> (Complex64, Complex64) {
        let s = self.exponent.exp();
        (self.value * s, self.deriv * s)
    }
}

/// Accumulate `Σ η_j f_j(z)` and `Σ η_j f_j'(z)` alongside the basis
/// recurrence.
pub fn eval_instance(inst: &RandomPolyInstance, z: Complex64) -> Result<InstanceValue> {
    let mut value = Complex64::new(0.0, 0.0);
    let mut deriv = Complex64::new(0.0, 0.0);
    let eta = &inst.eta;
    let exponent = inst.model.walk(inst.degree(), z, |j, t| {
        if t.rescale != 1.0 {
            value *= t.rescale;
            deriv *= t.rescale;
        }
        value += eta[j] * t.value;
        deriv += eta[j] * t.deriv;
    })?;
    Ok(InstanceValue {
        value,
        deriv,
        exponent,
    })
}
