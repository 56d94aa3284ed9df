use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, TAU};

use super::{eval_instance, RandomPolyInstance};
use crate::error::{Error, Result};
use crate::region::{BoundaryPiece, Region};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CountOptions {
    /// Largest accepted `|z_{k+1} - z_k| · max|P'/P|` along the boundary.
    pub log_step: f64,
    /// Evaluations allowed per boundary walk.
    pub max_evals: usize,
    pub max_retries: usize,
    /// Relative dilation applied before each retry.
    pub jitter: f64,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            log_step: 0.75,
            max_evals: 1_000_000,
            max_retries: 5,
            jitter: 1e-7,
        }
    }
}

impl CountOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.log_step > 0.0 && self.log_step <= 1.5) {
            return Err(Error::InvalidArgument(format!(
                "log_step must lie in (0, 1.5], got {}",
                self.log_step
            )));
        }
        if !(self.jitter > 0.0 && self.jitter < 1e-2) {
            return Err(Error::InvalidArgument(format!(
                "jitter must lie in (0, 1e-2), got {}",
                self.jitter
            )));
        }
        if self.max_evals < 16 {
            return Err(Error::InvalidArgument("max_evals must be at least 16".into()));
        }
        Ok(())
    }
}

/// Outcome of one successful count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroCount {
    pub count: usize,
    /// Dilated re-walks needed before the winding number was clean.
    pub retries: usize,
    /// Polynomial evaluations over all walks.
    pub evals: usize,
}

/// Largest rounding residual of `phase / 2π` accepted as an integer.
const RESIDUAL: f64 = 0.05;
/// Smallest parameter step before the walk gives up on a piece.
const MIN_STEP: f64 = 1e-14;

/// Number of zeros of `inst` inside `region` by the argument principle.
pub fn count_zeros(
    inst: &RandomPolyInstance,
    region: &Region,
    opts: &CountOptions,
) -> Result<ZeroCount> {
    opts.validate()?;
    region.validate()?;
    if region.is_empty() {
        return Ok(ZeroCount {
            count: 0,
            retries: 0,
            evals: 0,
        });
    }
    let mut evals = 0;
    let mut current = *region;
    for retries in 0..=opts.max_retries {
        if retries > 0 {
            current = current.dilated(opts.jitter);
        }
        if let Some(winding) = winding_number(inst, &current.boundary(), opts, &mut evals)? {
            return Ok(ZeroCount {
                count: winding,
                retries,
                evals,
            });
        }
    }
    Err(Error::BoundaryZero {
        retries: opts.max_retries,
    })
}

struct Sample {
    z: Complex64,
    value: Complex64,
    log_deriv: f64,
}

fn sample(inst: &RandomPolyInstance, z: Complex64, evals: &mut usize) -> Result<Option<Sample>> {
    *evals += 1;
    let v = eval_instance(inst, z)?;
    if v.value == Complex64::new(0.0, 0.0) {
        return Ok(None);
    }
    let log_deriv = v.log_derivative().norm();
    if !log_deriv.is_finite() {
        return Ok(None);
    }
    Ok(Some(Sample {
        z,
        value: v.value,
        log_deriv,
    }))
}

/// `None` when the walk cannot certify a winding number: a zero is too close
/// to the boundary, the budget ran out, or the phase total is not near an
/// integer.
fn winding_number(
    inst: &RandomPolyInstance,
    pieces: &[BoundaryPiece],
    opts: &CountOptions,
    evals: &mut usize,
) -> Result<Option<usize>> {
    let budget = *evals + opts.max_evals;
    let Some(first) = pieces.first() else {
        return Ok(Some(0));
    };
    let Some(mut prev) = sample(inst, first.point(0.0), evals)? else {
        return Ok(None);
    };
    let mut phase = 0.0;
    for piece in pieces {
        let mut t = 0.0;
        let mut h = 1.0 / 16.0;
        // Close the small gap between consecutive pieces' endpoints.
        let Some(start) = sample(inst, piece.point(0.0), evals)? else {
            return Ok(None);
        };
        phase += (start.value * prev.value.conj()).arg();
        prev = start;
        while t < 1.0 {
            if *evals > budget {
                return Ok(None);
            }
            let t1 = if t + h >= 1.0 - 1e-15 { 1.0 } else { t + h };
            let Some(next) = sample(inst, piece.point(t1), evals)? else {
                return Ok(None);
            };
            let dphi = (next.value * prev.value.conj()).arg();
            let reach = (next.z - prev.z).norm() * prev.log_deriv.max(next.log_deriv);
            if dphi.abs() < FRAC_PI_2 && reach <= opts.log_step {
                phase += dphi;
                prev = next;
                t = t1;
                h *= 2.0;
            } else {
                h *= 0.5;
                if h < MIN_STEP {
                    return Ok(None);
                }
            }
        }
    }
    let w = phase / TAU;
    let k = w.round();
    if (w - k).abs() >= RESIDUAL || k < 0.0 {
        return Ok(None);
    }
    Ok(Some(k as usize))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{JacobiRecurrence, Model, VerblunskySequence};
    use crate::sampling::{sample_instance, StreamSeed};
    use proptest::prelude::*;
    use std::sync::Arc;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn lebesgue() -> Arc<Model> {
        Arc::new(Model::Opuc(VerblunskySequence::lebesgue()))
    }

    fn chebyshev() -> Arc<Model> {
        Arc::new(Model::Oprl(JacobiRecurrence::chebyshev()))
    }

    /// Monomial coefficients (ascending) of `Σ η_j p_j` for the Chebyshev
    /// basis, from the recurrence applied to coefficient vectors.
    fn chebyshev_monomial(eta: &[Complex64]) -> Vec<Complex64> {
        let rec = JacobiRecurrence::chebyshev();
        let n = eta.len();
        let mut prev = vec![0.0; n + 1];
        let mut cur = vec![0.0; n + 1];
        cur[0] = 1.0;
        let mut out = vec![c(0.0, 0.0); n];
        for (j, e) in eta.iter().enumerate() {
            for k in 0..n {
                out[k] += e * cur[k];
            }
            let (a, b) = (rec.a(j), rec.b(j));
            let ap = if j == 0 { 0.0 } else { rec.a(j - 1) };
            let mut next = vec![0.0; n + 1];
            for k in 0..n {
                next[k + 1] += cur[k] / a;
                next[k] += (-b * cur[k] - ap * prev[k]) / a;
            }
            prev = cur;
            cur = next;
        }
        out
    }

    /// Aberth–Ehrlich simultaneous iteration for the roots of a polynomial
    /// given by ascending monomial coefficients.
    fn roots(coeffs: &[Complex64]) -> Vec<Complex64> {
        let n = coeffs.len() - 1;
        let eval = |z: Complex64| {
            let mut p = c(0.0, 0.0);
            let mut dp = c(0.0, 0.0);
            for a in coeffs.iter().rev() {
                dp = dp * z + p;
                p = p * z + a;
            }
            (p, dp)
        };
        let radius = 1.0
            + coeffs[..n]
                .iter()
                .map(|a| (a / coeffs[n]).norm())
                .fold(0.0, f64::max);
        let mut z: Vec<Complex64> = (0..n)
            .map(|k| Complex64::from_polar(0.5 * radius, 0.4 + TAU * k as f64 / n as f64))
            .collect();
        for _ in 0..500 {
            let mut moved = 0.0f64;
            for i in 0..n {
                let (p, dp) = eval(z[i]);
                if p.norm() == 0.0 {
                    continue;
                }
                let ratio = p / dp;
                let sum: Complex64 = (0..n).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
                let step = ratio / (1.0 - ratio * sum);
                z[i] -= step;
                moved = moved.max(step.norm());
            }
            if moved < 1e-15 * radius {
                break;
            }
        }
        z
    }

    fn opts() -> CountOptions {
        CountOptions::default()
    }

    #[test]
    fn simple_fixtures() {
        let p = RandomPolyInstance::new(lebesgue(), vec![c(1.0, 0.0), c(1.0, 0.0)]);
        let disk = Region::disk(c(0.0, 0.0), 2.0);
        assert_eq!(count_zeros(&p, &disk, &opts()).unwrap().count, 1);

        let mut eta = vec![c(0.0, 0.0); 7];
        eta[0] = c(1.0, 0.0);
        eta[6] = c(1.0, 0.0);
        let p = RandomPolyInstance::new(lebesgue(), eta);
        assert_eq!(count_zeros(&p, &disk, &opts()).unwrap().count, 6);
        let small = Region::disk(c(0.0, 0.0), 0.5);
        assert_eq!(count_zeros(&p, &small, &opts()).unwrap().count, 0);
    }

    #[test]
    fn zero_on_boundary_is_retried() {
        // Root at -1 lies exactly on the unit circle and on the rectangle edge.
        let p = RandomPolyInstance::new(lebesgue(), vec![c(1.0, 0.0), c(1.0, 0.0)]);
        let r = count_zeros(&p, &Region::rectangle(c(0.0, 0.0), 1.0, 1.0), &opts()).unwrap();
        assert_eq!(r.count, 1);
        assert!(r.retries >= 1);
    }

    #[test]
    fn cauchy_bound_encloses_everything() {
        for (k, model) in [lebesgue(), chebyshev()].into_iter().enumerate() {
            for i in 0..20u64 {
                let n = 1 + (i as usize % 20);
                let inst = sample_instance(Arc::clone(&model), n, StreamSeed::new(99, 100 * k as u64 + i));
                let coeffs = if k == 0 {
                    inst.eta.clone()
                } else {
                    chebyshev_monomial(&inst.eta)
                };
                let lead = coeffs[n].norm();
                let bound = 10.0
                    * (1.0 + coeffs[..n].iter().map(|a| a.norm()).fold(0.0, f64::max) / lead);
                let r = Region::rectangle(c(0.0, 0.0), bound, bound);
                assert_eq!(count_zeros(&inst, &r, &opts()).unwrap().count, n);
            }
        }
    }

    #[test]
    fn matches_root_oracle() {
        for (k, model) in [lebesgue(), chebyshev()].into_iter().enumerate() {
            for i in 0..30u64 {
                let inst = sample_instance(Arc::clone(&model), 8, StreamSeed::new(5, 1000 * k as u64 + i));
                let coeffs = if k == 0 {
                    inst.eta.clone()
                } else {
                    chebyshev_monomial(&inst.eta)
                };
                let zs = roots(&coeffs);
                let regions = [
                    Region::disk(c(0.0, 0.0), 1.0),
                    Region::rectangle(c(0.2, 0.3), 0.7, 0.4),
                    Region::annular_sector(0.3, 2.5, 0.6, 1.3),
                ];
                for region in regions {
                    let expected = zs.iter().filter(|z| region.contains(**z)).count();
                    let got = count_zeros(&inst, &region, &opts()).unwrap().count;
                    assert_eq!(got, expected, "{region:?} roots {zs:?}");
                }
            }
        }
    }

    #[test]
    fn oracle_conversion_agrees_with_evaluation() {
        let inst = sample_instance(chebyshev(), 6, StreamSeed::new(2, 2));
        let coeffs = chebyshev_monomial(&inst.eta);
        let z = c(0.4, -0.3);
        let direct: Complex64 = coeffs.iter().rev().fold(c(0.0, 0.0), |acc, a| acc * z + a);
        let v = super::super::eval_instance(&inst, z).unwrap().unscaled().0;
        assert!((direct - v).norm() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn additive_over_quadrants(seed in 0u64..1_000_000, n in 1usize..20, family in 0usize..2, sector in any::<bool>()) {
            let model = if family == 0 { lebesgue() } else { chebyshev() };
            let inst = sample_instance(model, n, StreamSeed::new(seed, 0));
            let region = if sector {
                Region::annular_sector(0.2, 2.2, 0.7, 1.2)
            } else {
                Region::rectangle(c(0.1, -0.2), 1.1, 0.9)
            };
            let whole = count_zeros(&inst, &region, &opts()).unwrap().count;
            let parts: usize = region
                .quadrants()
                .unwrap()
                .iter()
                .map(|q| count_zeros(&inst, q, &opts()).unwrap().count)
                .sum();
            prop_assert_eq!(whole, parts);
        }

        #[test]
        fn phase_invariant(seed in 0u64..1_000_000, theta in 0.0f64..TAU, n in 1usize..15) {
            let inst = sample_instance(chebyshev(), n, StreamSeed::new(seed, 1));
            let rotated = inst.scaled(Complex64::from_polar(1.0, theta));
            let region = Region::rectangle(c(0.0, 0.1), 1.2, 0.5);
            prop_assert_eq!(
                count_zeros(&inst, &region, &opts()).unwrap().count,
                count_zeros(&rotated, &region, &opts()).unwrap().count
            );
        }

        #[test]
        fn degree_conserved(seed in 0u64..1_000_000, n in 1usize..=20, family in 0usize..3) {
            let model = match family {
                0 => lebesgue(),
                1 => chebyshev(),
                _ => Arc::new(Model::Opuc(VerblunskySequence::geometric(0.5, 0.8).unwrap())),
            };
            let inst = sample_instance(model, n, StreamSeed::new(seed, 2));
            let big = Region::disk(c(0.0, 0.0), 1e6);
            prop_assert_eq!(count_zeros(&inst, &big, &opts()).unwrap().count, n);
        }
    }
}
