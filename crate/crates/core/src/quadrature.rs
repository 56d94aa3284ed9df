//! Adaptive two-dimensional quadrature of intensities over regions.
//!
//! Each cell carries a 15×15 tensor Gauss–Kronrod rule with the 7×7 Gauss
//! rule embedded; `|K15 - G7|` is the cell error. Cells with the largest
//! error are quadrisected until the summed error is below the absolute
//! tolerance. Sector-shaped regions and disks are integrated in polar
//! coordinates, rectangles in Cartesian ones, and the exterior of a disk
//! through `z = R0 e^{iφ} / s`, `s ∈ (0, 1]`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::basis::{Exclusion, Model, VerblunskySequence};
use crate::error::{Error, Result};
use crate::intensity::{rho, rho_direct};
use crate::region::Region;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub cells: usize,
}

impl QuadratureResult {
    pub const ZERO: QuadratureResult = QuadratureResult {
        value: 0.0,
        error_estimate: 0.0,
        cells: 0,
    };

    fn plus(self, other: QuadratureResult) -> QuadratureResult {
        QuadratureResult {
            value: self.value + other.value,
            error_estimate: self.error_estimate + other.error_estimate,
            cells: self.cells + other.cells,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadOptions {
    /// Absolute error target.
    pub tol: f64,
    /// Maximum number of leaf cells before giving up.
    pub max_cells: usize,
    pub exclusion: Exclusion,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            tol: 1e-8,
            max_cells: 20_000,
            exclusion: Exclusion::default(),
        }
    }
}

impl QuadOptions {
    pub fn with_tol(tol: f64) -> Self {
        QuadOptions {
            tol,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "quadrature tolerance must be positive, got {}",
                self.tol
            )));
        }
        if self.max_cells == 0 {
            return Err(Error::InvalidArgument("max_cells must be positive".into()));
        }
        self.exclusion.validate()
    }
}

// Kronrod abscissae on [0, 1], descending; odd indices are the Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// `(node, kronrod weight, gauss weight)` for the 15 points on `[-1, 1]`.
fn rule() -> [(f64, f64, f64); 15] {
    let mut out = [(0.0, 0.0, 0.0); 15];
    for (k, slot) in out.iter_mut().enumerate() {
        let m = k.min(14 - k);
        let x = if k < 7 { -XGK[m] } else { XGK[m] };
        let wg = if m % 2 == 1 { WG[(m - 1) / 2] } else { 0.0 };
        *slot = (x, WGK[m], wg);
    }
    out
}

/// How parameter space `(u, v)` maps to the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Map {
    /// `z = u + iv`.
    Cartesian,
    /// `z = center + u e^{iv}`, Jacobian `u`.
    Polar(Complex64),
    /// `z = r0 e^{iv} / u`, Jacobian `r0^2 / u^3`.
    Inverted(f64),
}

impl Map {
    #[inline]
    fn point(self, u: f64, v: f64) -> (Complex64, f64) {
        match self {
            Map::Cartesian => (Complex64::new(u, v), 1.0),
            Map::Polar(c) => (c + Complex64::from_polar(u, v), u),
            Map::Inverted(r0) => (Complex64::from_polar(r0 / u, v), r0 * r0 / (u * u * u)),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    map: Map,
    u: [f64; 2],
    v: [f64; 2],
}

#[derive(Debug, Clone, Copy)]
struct Evaluated {
    cell: Cell,
    value: f64,
    error: f64,
}

impl Cell {
    fn evaluate<F>(self, f: &F) -> Result<Evaluated>
    where
        F: Fn(Complex64) -> Result<f64> + Sync,
    {
        let nodes = rule();
        let (hu, hv) = (0.5 * (self.u[1] - self.u[0]), 0.5 * (self.v[1] - self.v[0]));
        let (cu, cv) = (0.5 * (self.u[1] + self.u[0]), 0.5 * (self.v[1] + self.v[0]));
        let mut kron = 0.0;
        let mut gauss = 0.0;
        for &(xu, wku, wgu) in &nodes {
            let u = cu + hu * xu;
            let mut row_k = 0.0;
            let mut row_g = 0.0;
            for &(xv, wkv, wgv) in &nodes {
                let (z, jac) = self.map.point(u, cv + hv * xv);
                let val = f(z)? * jac;
                row_k += wkv * val;
                row_g += wgv * val;
            }
            kron += wku * row_k;
            gauss += wgu * row_g;
        }
        let area = hu * hv;
        let value = kron * area;
        let error = ((kron - gauss) * area).abs();
        if !value.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "integrand is not finite on cell {:?}",
                self
            )));
        }
        Ok(Evaluated {
            cell: self,
            value,
            error,
        })
    }

    fn quadrisect(self) -> [Cell; 4] {
        let um = 0.5 * (self.u[0] + self.u[1]);
        let vm = 0.5 * (self.v[0] + self.v[1]);
        let mk = |u: [f64; 2], v: [f64; 2]| Cell { map: self.map, u, v };
        [
            mk([self.u[0], um], [self.v[0], vm]),
            mk([um, self.u[1]], [self.v[0], vm]),
            mk([self.u[0], um], [vm, self.v[1]]),
            mk([um, self.u[1]], [vm, self.v[1]]),
        ]
    }
}

/// Heap key: largest error first, then lowest id.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Key {
    error: f64,
    id: usize,
}

impl Eq for Key {}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.id.cmp(&self.id))
    }
}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Cells refined together per round. Fixed so results do not depend on the
/// number of worker threads.
const BATCH: usize = 8;

fn adaptive<F>(initial: Vec<Cell>, f: &F, opts: &QuadOptions) -> Result<QuadratureResult>
where
    F: Fn(Complex64) -> Result<f64> + Sync,
{
    opts.validate()?;
    let initial: Vec<Cell> = initial
        .into_iter()
        .filter(|c| c.u[1] > c.u[0] && c.v[1] > c.v[0])
        .collect();
    if initial.is_empty() {
        return Ok(QuadratureResult::ZERO);
    }
    let mut leaves: Vec<Option<Evaluated>> = initial
        .par_iter()
        .map(|c| c.evaluate(f))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .map(Some)
        .collect();
    let mut heap: BinaryHeap<Key> = leaves
        .iter()
        .enumerate()
        .map(|(id, e)| Key {
            error: e.as_ref().map_or(0.0, |e| e.error),
            id,
        })
        .collect();
    let mut live = leaves.len();

    let summarize = |leaves: &[Option<Evaluated>], live: usize| {
        let mut value = Neumaier::default();
        let mut error = Neumaier::default();
        for e in leaves.iter().flatten() {
            value.add(e.value);
            error.add(e.error);
        }
        QuadratureResult {
            value: value.sum(),
            error_estimate: error.sum(),
            cells: live,
        }
    };

    loop {
        let current = summarize(&leaves, live);
        if current.error_estimate <= opts.tol {
            return Ok(current);
        }
        if live + 3 * BATCH > opts.max_cells {
            return Err(Error::BudgetExceeded { best: current });
        }
        let mut parents = Vec::with_capacity(BATCH);
        while parents.len() < BATCH {
            match heap.pop() {
                Some(key) => parents.push(key.id),
                None => break,
            }
        }
        let children: Vec<Cell> = parents
            .iter()
            .flat_map(|&id| leaves[id].expect("heap holds live cells").cell.quadrisect())
            .collect();
        let evaluated = children
            .par_iter()
            .map(|c| c.evaluate(f))
            .collect::<Result<Vec<_>>>()?;
        live = live - parents.len() + evaluated.len();
        for id in parents {
            leaves[id] = None;
        }
        for e in evaluated {
            let id = leaves.len();
            heap.push(Key { error: e.error, id });
            leaves.push(Some(e));
        }
    }
}

#[derive(Debug, Default, Clone, Copy)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn sum(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Split `[lo, hi]` at each interior point of `cuts`.
fn split_interval(lo: f64, hi: f64, cuts: &[f64]) -> Vec<[f64; 2]> {
    let mut pts = vec![lo];
    pts.extend(cuts.iter().copied().filter(|&c| c > lo && c < hi));
    pts.push(hi);
    pts.sort_by(f64::total_cmp);
    pts.windows(2).map(|w| [w[0], w[1]]).collect()
}

/// Angular cuts at multiples of π/2 inside `[t1, t2]`, which include the
/// real axis directions.
fn angle_cuts(t1: f64, t2: f64) -> Vec<f64> {
    let k0 = (t1 / FRAC_PI_2).floor() as i64;
    let k1 = (t2 / FRAC_PI_2).ceil() as i64;
    (k0..=k1).map(|k| k as f64 * FRAC_PI_2).collect()
}

fn initial_cells(region: &Region) -> Vec<Cell> {
    let mut cells = Vec::new();
    match *region {
        Region::Rectangle {
            center,
            half_widths: [hx, hy],
        } => {
            let u = [center.re - hx, center.re + hx];
            for v in split_interval(center.im - hy, center.im + hy, &[0.0]) {
                cells.push(Cell {
                    map: Map::Cartesian,
                    u,
                    v,
                });
            }
        }
        Region::Disk { center, radius } => {
            let rcuts = if center == Complex64::new(0.0, 0.0) {
                vec![1.0]
            } else {
                vec![]
            };
            for u in split_interval(0.0, radius, &rcuts) {
                for v in split_interval(0.0, TAU, &angle_cuts(0.0, TAU)) {
                    cells.push(Cell {
                        map: Map::Polar(center),
                        u,
                        v,
                    });
                }
            }
        }
        _ => {
            let (t1, t2, r1, r2) = region.polar_extent();
            for u in split_interval(r1, r2, &[1.0]) {
                for v in split_interval(t1, t2, &angle_cuts(t1, t2)) {
                    cells.push(Cell {
                        map: Map::Polar(Complex64::new(0.0, 0.0)),
                        u,
                        v,
                    });
                }
            }
        }
    }
    cells
}

/// `∫_region f dA`.
pub fn integrate<F>(region: &Region, f: F, opts: &QuadOptions) -> Result<QuadratureResult>
where
    F: Fn(Complex64) -> Result<f64> + Sync,
{
    region.validate()?;
    adaptive(initial_cells(region), &f, opts)
}

/// `∫_{|z| > r0} f dA` through `z = r0 e^{iφ} / s`. `f` must decay faster
/// than `|z|^{-2}`.
pub fn integrate_exterior<F>(r0: f64, f: F, opts: &QuadOptions) -> Result<QuadratureResult>
where
    F: Fn(Complex64) -> Result<f64> + Sync,
{
    if !(r0.is_finite() && r0 > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "exterior radius must be positive, got {r0}"
        )));
    }
    let cells = split_interval(0.0, TAU, &angle_cuts(0.0, TAU))
        .into_iter()
        .map(|v| Cell {
            map: Map::Inverted(r0),
            u: [0.0, 1.0],
            v,
        })
        .collect();
    adaptive(cells, &f, opts)
}

/// Expected number of zeros of `P_n` in `region`, `∫ ρ_n dA`.
pub fn integrate_rho(
    model: &Model,
    n: usize,
    region: &Region,
    opts: &QuadOptions,
) -> Result<QuadratureResult> {
    let excl = opts.exclusion;
    integrate(region, |z| rho(model, n, z, &excl), opts)
}

/// Interior and exterior parts of the total mass of `ρ_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TotalMass {
    /// Radius separating the two parts.
    pub radius: f64,
    pub interior: QuadratureResult,
    pub exterior: QuadratureResult,
}

impl TotalMass {
    pub fn total(&self) -> QuadratureResult {
        self.interior.plus(self.exterior)
    }
}

/// `∫_ℂ ρ_n dA`, which equals `n`. The tolerance is split evenly between
/// the disk of radius `R0` and its exterior.
pub fn total_mass_parts(model: &Model, n: usize, opts: &QuadOptions) -> Result<TotalMass> {
    if n == 0 {
        return Err(Error::InvalidArgument("total mass needs n >= 1".into()));
    }
    let radius = match model {
        Model::Oprl(rec) => rec.support_radius().max(1.0),
        Model::Opuc(_) => 1.0,
    };
    let half = QuadOptions {
        tol: 0.5 * opts.tol,
        ..*opts
    };
    let excl = opts.exclusion;
    let f = |z| rho(model, n, z, &excl);
    let interior = integrate(&Region::disk(Complex64::new(0.0, 0.0), radius), f, &half)?;
    let exterior = integrate_exterior(radius, f, &half)?;
    Ok(TotalMass {
        radius,
        interior,
        exterior,
    })
}

pub fn total_mass(model: &Model, n: usize, opts: &QuadOptions) -> Result<QuadratureResult> {
    Ok(total_mass_parts(model, n, opts)?.total())
}

/// Expected zero count in the band `Ω(S, τ1, τ2)`, and the same per degree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandMass {
    pub mass: QuadratureResult,
    pub per_degree: f64,
}

/// Band mass by direct kernel summation, the only path valid on the whole
/// band.
pub fn band_mass(
    v: &VerblunskySequence,
    n: usize,
    theta: (f64, f64),
    tau: (f64, f64),
    opts: &QuadOptions,
) -> Result<BandMass> {
    if n == 0 {
        return Err(Error::InvalidArgument("band mass needs n >= 1".into()));
    }
    if theta.1 - theta.0 > TAU || tau.0 > tau.1 {
        return Err(Error::InvalidArgument(format!(
            "band needs theta1 <= theta2 <= theta1 + 2π and tau1 <= tau2, got {theta:?}, {tau:?}"
        )));
    }
    if tau.0 < -2.0 * n as f64 {
        return Err(Error::InvalidArgument(format!(
            "tau1 = {} puts the inner radius below zero at n = {n}",
            tau.0
        )));
    }
    let region = Region::band(theta.0, theta.1, tau.0, tau.1, n);
    let model = Model::Opuc(v.clone());
    let mass = integrate(&region, |z| rho_direct(&model, n, z), opts)?;
    Ok(BandMass {
        mass,
        per_degree: mass.value / n as f64,
    })
}

/// `2π ∫_0^r ρ(s) s ds` for a radial density, used by tests and examples.
pub fn radial_mass<F>(r: f64, f: F, opts: &QuadOptions) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let region = Region::annular_sector(0.0, PI, 0.0, r);
    let half = integrate(&region, |z| f(z.norm()), opts)?;
    Ok(QuadratureResult {
        value: 2.0 * half.value,
        error_estimate: 2.0 * half.error_estimate,
        cells: half.cells,
    })
}
