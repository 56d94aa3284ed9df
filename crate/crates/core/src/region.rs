//! Planar regions used both for zero counting and for quadrature.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

/// A bounded region of the plane with piecewise smooth boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Region {
    /// Axis-aligned rectangle `center ± half_widths`.
    Rectangle {
        center: Complex64,
        half_widths: [f64; 2],
    },
    Disk { center: Complex64, radius: f64 },
    /// `{r e^{iθ} : r1 <= r <= r2, theta1 <= θ <= theta2}`.
    AnnularSector {
        theta1: f64,
        theta2: f64,
        r1: f64,
        r2: f64,
    },
    /// Annular sector with radii `1 + tau/(2n)` around an arc of the unit
    /// circle.
    Band {
        theta1: f64,
        theta2: f64,
        tau1: f64,
        tau2: f64,
        n: usize,
    },
}

/// One smooth piece of a positively oriented boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryPiece {
    Segment { from: Complex64, to: Complex64 },
    Arc {
        center: Complex64,
        radius: f64,
        from: f64,
        to: f64,
    },
}

impl BoundaryPiece {
    /// Point at parameter `t ∈ [0, 1]`.
    #[inline]
    pub fn point(&self, t: f64) -> Complex64 {
        match *self {
            BoundaryPiece::Segment { from, to } => from + (to - from) * t,
            BoundaryPiece::Arc {
                center,
                radius,
                from,
                to,
            } => center + Complex64::from_polar(radius, from + (to - from) * t),
        }
    }

    pub fn length(&self) -> f64 {
        match *self {
            BoundaryPiece::Segment { from, to } => (to - from).norm(),
            BoundaryPiece::Arc {
                radius, from, to, ..
            } => radius * (to - from).abs(),
        }
    }
}

impl Region {
    pub fn rectangle(center: Complex64, half_x: f64, half_y: f64) -> Self {
        Region::Rectangle {
            center,
            half_widths: [half_x, half_y],
        }
    }

    pub fn disk(center: Complex64, radius: f64) -> Self {
        Region::Disk { center, radius }
    }

    pub fn annular_sector(theta1: f64, theta2: f64, r1: f64, r2: f64) -> Self {
        Region::AnnularSector {
            theta1,
            theta2,
            r1,
            r2,
        }
    }

    pub fn band(theta1: f64, theta2: f64, tau1: f64, tau2: f64, n: usize) -> Self {
        Region::Band {
            theta1,
            theta2,
            tau1,
            tau2,
            n,
        }
    }

    /// Check finiteness and orientation. Empty regions (zero width) are
    /// allowed; they have no interior and integrate to zero.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        match *self {
            Region::Rectangle {
                center,
                half_widths: [hx, hy],
            } => {
                if !(finite(center) && hx.is_finite() && hy.is_finite() && hx >= 0.0 && hy >= 0.0)
                {
                    return bad(format!(
                        "rectangle needs finite center and half widths >= 0, got {center}, [{hx}, {hy}]"
                    ));
                }
            }
            Region::Disk { center, radius } => {
                if !(finite(center) && radius.is_finite() && radius >= 0.0) {
                    return bad(format!(
                        "disk needs finite center and radius >= 0, got {center}, {radius}"
                    ));
                }
            }
            Region::AnnularSector { .. } | Region::Band { .. } => {
                if let Region::Band { n, .. } = *self {
                    if n == 0 {
                        return bad("band region needs n >= 1".into());
                    }
                }
                let (t1, t2, r1, r2) = self.polar_extent();
                if !(t1.is_finite() && t2.is_finite() && t1 <= t2 && t2 - t1 <= TAU) {
                    return bad(format!(
                        "angular range must satisfy theta1 <= theta2 <= theta1 + 2π, got [{t1}, {t2}]"
                    ));
                }
                if !(r1.is_finite() && r2.is_finite() && 0.0 <= r1 && r1 <= r2) {
                    return bad(format!("radii must satisfy 0 <= r1 <= r2, got [{r1}, {r2}]"));
                }
            }
        }
        Ok(())
    }

    /// `(theta1, theta2, r1, r2)` for the sector-shaped kinds.
    pub fn polar_extent(&self) -> (f64, f64, f64, f64) {
        match *self {
            Region::AnnularSector {
                theta1,
                theta2,
                r1,
                r2,
            } => (theta1, theta2, r1, r2),
            Region::Band {
                theta1,
                theta2,
                tau1,
                tau2,
                n,
            } => {
                let two_n = 2.0 * n as f64;
                (theta1, theta2, 1.0 + tau1 / two_n, 1.0 + tau2 / two_n)
            }
            Region::Disk { radius, .. } => (0.0, TAU, 0.0, radius),
            Region::Rectangle { .. } => (0.0, 0.0, 0.0, 0.0),
        }
    }

    pub fn area(&self) -> f64 {
        match *self {
            Region::Rectangle {
                half_widths: [hx, hy],
                ..
            } => 4.0 * hx * hy,
            _ => {
                let (t1, t2, r1, r2) = self.polar_extent();
                0.5 * (t2 - t1) * (r2 * r2 - r1 * r1)
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        !(self.area() > 0.0)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        match *self {
            Region::Rectangle {
                center,
                half_widths: [hx, hy],
            } => (z.re - center.re).abs() <= hx && (z.im - center.im).abs() <= hy,
            Region::Disk { center, radius } => (z - center).norm() <= radius,
            _ => {
                let (t1, t2, r1, r2) = self.polar_extent();
                let r = z.norm();
                if r < r1 || r > r2 {
                    return false;
                }
                if t2 - t1 >= TAU {
                    return true;
                }
                let offset = (z.arg() - t1).rem_euclid(TAU);
                offset <= t2 - t1
            }
        }
    }

    /// Positively oriented boundary pieces. Degenerate pieces (zero length)
    /// are omitted.
    pub fn boundary(&self) -> Vec<BoundaryPiece> {
        let mut out = Vec::with_capacity(4);
        match *self {
            Region::Rectangle {
                center,
                half_widths: [hx, hy],
            } => {
                let c = [
                    center + Complex64::new(-hx, -hy),
                    center + Complex64::new(hx, -hy),
                    center + Complex64::new(hx, hy),
                    center + Complex64::new(-hx, hy),
                ];
                for k in 0..4 {
                    out.push(BoundaryPiece::Segment {
                        from: c[k],
                        to: c[(k + 1) % 4],
                    });
                }
            }
            Region::Disk { center, radius } => out.push(BoundaryPiece::Arc {
                center,
                radius,
                from: 0.0,
                to: TAU,
            }),
            _ => {
                let (t1, t2, r1, r2) = self.polar_extent();
                let zero = Complex64::new(0.0, 0.0);
                let full = t2 - t1 >= TAU;
                out.push(BoundaryPiece::Arc {
                    center: zero,
                    radius: r2,
                    from: t1,
                    to: t2,
                });
                if !full {
                    out.push(BoundaryPiece::Segment {
                        from: Complex64::from_polar(r2, t2),
                        to: Complex64::from_polar(r1, t2),
                    });
                }
                if r1 > 0.0 {
                    out.push(BoundaryPiece::Arc {
                        center: zero,
                        radius: r1,
                        from: t2,
                        to: t1,
                    });
                }
                if !full {
                    out.push(BoundaryPiece::Segment {
                        from: Complex64::from_polar(r1, t1),
                        to: Complex64::from_polar(r2, t1),
                    });
                }
            }
        }
        out.retain(|p| p.length() > 0.0);
        out
    }

    /// The region grown by the relative amount `eps` in every direction,
    /// used to move a boundary off a zero.
    pub fn dilated(&self, eps: f64) -> Region {
        let grow = 1.0 + eps;
        match *self {
            Region::Rectangle {
                center,
                half_widths: [hx, hy],
            } => Region::Rectangle {
                center,
                half_widths: [hx * grow, hy * grow],
            },
            Region::Disk { center, radius } => Region::Disk {
                center,
                radius: radius * grow,
            },
            _ => {
                let (t1, t2, r1, r2) = self.polar_extent();
                let (t1, t2) = if t2 - t1 >= TAU {
                    (t1, t2)
                } else {
                    let dt = (eps * (t2 - t1)).min(0.5 * (TAU - (t2 - t1)));
                    (t1 - dt, t2 + dt)
                };
                Region::AnnularSector {
                    theta1: t1,
                    theta2: t2,
                    r1: r1 * (1.0 - eps),
                    r2: r2 * grow,
                }
            }
        }
    }

    /// A 2×2 partition whose pieces share boundaries exactly; `None` for
    /// disks, which are not closed under this kind of split.
    pub fn quadrants(&self) -> Option<[Region; 4]> {
        match *self {
            Region::Rectangle {
                center,
                half_widths: [hx, hy],
            } => {
                let (qx, qy) = (0.5 * hx, 0.5 * hy);
                let mk = |sx: f64, sy: f64| Region::Rectangle {
                    center: center + Complex64::new(sx * qx, sy * qy),
                    half_widths: [qx, qy],
                };
                Some([mk(-1.0, -1.0), mk(1.0, -1.0), mk(1.0, 1.0), mk(-1.0, 1.0)])
            }
            Region::Disk { .. } => None,
            _ => {
                let (t1, t2, r1, r2) = self.polar_extent();
                let (tm, rm) = (0.5 * (t1 + t2), 0.5 * (r1 + r2));
                Some([
                    Region::annular_sector(t1, tm, r1, rm),
                    Region::annular_sector(tm, t2, r1, rm),
                    Region::annular_sector(t1, tm, rm, r2),
                    Region::annular_sector(tm, t2, rm, r2),
                ])
            }
        }
    }

    /// Whether the closure of the region meets the real axis.
    pub fn meets_real_axis(&self) -> bool {
        match *self {
            Region::Rectangle {
                center,
                half_widths: [_, hy],
            } => (center.im).abs() <= hy,
            Region::Disk { center, radius } => center.im.abs() <= radius,
            _ => {
                let (t1, t2, r1, _) = self.polar_extent();
                if r1 == 0.0 || t2 - t1 >= PI {
                    return true;
                }
                let k = (t1 / PI).ceil();
                k * PI <= t2
            }
        }
    }
}

fn finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn band_radii() {
        let r = Region::band(0.5, 1.0, -2.0, 2.0, 100);
        let (_, _, r1, r2) = r.polar_extent();
        assert!((r1 - 0.99).abs() < 1e-15 && (r2 - 1.01).abs() < 1e-15);
        assert!(r.contains(Complex64::from_polar(1.0, 0.75)));
        assert!(!r.contains(Complex64::from_polar(1.02, 0.75)));
    }

    #[test]
    fn boundary_is_closed_and_oriented() {
        let regions = [
            Region::rectangle(c(1.0, -1.0), 2.0, 0.5),
            Region::annular_sector(0.3, 2.0, 0.5, 1.5),
            Region::annular_sector(-1.0, 1.0, 0.0, 1.5),
        ];
        for r in regions {
            let pieces = r.boundary();
            for w in 0..pieces.len() {
                let end = pieces[w].point(1.0);
                let next = pieces[(w + 1) % pieces.len()].point(0.0);
                assert!((end - next).norm() < 1e-12, "{r:?}");
            }
            // Shoelace area of a fine polygon matches the region area.
            let mut area = 0.0;
            for p in &pieces {
                for k in 0..2000 {
                    let a = p.point(k as f64 / 2000.0);
                    let b = p.point((k + 1) as f64 / 2000.0);
                    area += 0.5 * (a.re * b.im - a.im * b.re);
                }
            }
            assert!((area - r.area()).abs() < 1e-4 * r.area(), "{r:?}: {area}");
        }
    }

    #[test]
    fn quadrants_cover_area() {
        let r = Region::annular_sector(0.2, 1.4, 0.5, 2.0);
        let q = r.quadrants().unwrap();
        let total: f64 = q.iter().map(Region::area).sum();
        assert!((total - r.area()).abs() < 1e-14);
    }

    #[test]
    fn serde_shape() {
        let r: Region =
            serde_json::from_str(r#"{"kind":"disk","center":[0.0,0.0],"radius":1.0}"#).unwrap();
        assert_eq!(r, Region::disk(c(0.0, 0.0), 1.0));
        assert!(serde_json::from_str::<Region>(r#"{"kind":"disk","radius":1.0}"#).is_err());
        assert!(Region::annular_sector(1.0, 0.0, 0.5, 1.0).validate().is_err());
        assert!(Region::band(0.1, 1.0, -1.0, 1.0, 0).validate().is_err());
    }

    #[test]
    fn real_axis_detection() {
        assert!(Region::rectangle(c(0.0, 0.5), 1.0, 0.5).meets_real_axis());
        assert!(!Region::rectangle(c(0.0, 0.6), 1.0, 0.5).meets_real_axis());
        assert!(!Region::annular_sector(0.2, 1.0, 0.5, 1.0).meets_real_axis());
        assert!(Region::annular_sector(3.0, 3.5, 0.5, 1.0).meets_real_axis());
    }
}
