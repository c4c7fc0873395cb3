//! Profile curve of the dumbbell: two unit spheres joined by a scaled catenoid.
//!
//! The upper half is traced by a parameter `q` in `[0, 3]`:
//! `[0, 1]` is the sphere arc from the top pole down to radius `BLEND_OUTER`,
//! `[1, 2]` a quintic blend written as a graph `z(r)` over `[BLEND_INNER, BLEND_OUTER]`,
//! `[2, 3]` the catenoid `(neck cosh t, neck t)` down to the waist at `z = 0`.
//! The lower half is the mirror image. The profile is C2.

/// Radius where the catenoid hands over to the blend.
pub const BLEND_INNER: f64 = 0.3;
/// Radius where the blend hands over to the sphere.
pub const BLEND_OUTER: f64 = 0.6;

/// Position, first and second derivative of the profile in a local parameter.
#[derive(Debug, Clone, Copy)]
pub struct ProfileJet {
    pub r: f64,
    pub z: f64,
    pub dr: f64,
    pub dz: f64,
    pub ddr: f64,
    pub ddz: f64,
}

impl ProfileJet {
    pub fn speed(&self) -> f64 {
        self.dr.hypot(self.dz)
    }

    /// Meridian and parallel principal curvatures (consistent sign).
    pub fn principal_curvatures(&self) -> (f64, f64) {
        let s = self.speed();
        let meridian = (self.dr * self.ddz - self.dz * self.ddr) / (s * s * s);
        let parallel = self.dz / (self.r * s);
        (meridian, parallel)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DumbbellProfile {
    pub neck: f64,
    catenoid_end: f64,
    sphere_center: f64,
    sphere_start: f64,
}

impl DumbbellProfile {
    /// Requires `0 < neck < BLEND_INNER`.
    pub fn new(neck: f64) -> Option<Self> {
        if !(neck > 0.0 && neck < BLEND_INNER) {
            return None;
        }
        let catenoid_end = (BLEND_INNER / neck).acosh();
        let sphere_center = neck * catenoid_end + (1.0 - BLEND_INNER * BLEND_INNER).sqrt();
        Some(Self {
            neck,
            catenoid_end,
            sphere_center,
            sphere_start: BLEND_OUTER.asin(),
        })
    }

    /// Height of the top pole above the waist.
    pub fn half_height(&self) -> f64 {
        self.sphere_center + 1.0
    }

    fn catenoid_height(&self, r: f64) -> (f64, f64, f64) {
        let n = self.neck;
        let root = (r * r - n * n).sqrt();
        (n * (r / n).acosh(), n / root, -n * r / (root * root * root))
    }

    fn sphere_height(&self, r: f64) -> (f64, f64, f64) {
        let root = (1.0 - r * r).sqrt();
        (self.sphere_center - root, r / root, 1.0 / (root * root * root))
    }

    /// Jet at upper-half parameter `q` in `[0, 3]`, in the local parameter of
    /// the piece containing `q` (angle, radius, catenoid parameter).
    pub fn jet(&self, q: f64) -> ProfileJet {
        let q = q.clamp(0.0, 3.0);
        if q <= 1.0 {
            let a = std::f64::consts::PI + q * (self.sphere_start - std::f64::consts::PI);
            ProfileJet {
                r: a.sin(),
                z: self.sphere_center - a.cos(),
                dr: a.cos(),
                dz: a.sin(),
                ddr: -a.sin(),
                ddz: a.cos(),
            }
        } else if q <= 2.0 {
            let r = BLEND_OUTER + (q - 1.0) * (BLEND_INNER - BLEND_OUTER);
            let width = BLEND_OUTER - BLEND_INNER;
            let x = (r - BLEND_INNER) / width;
            let w = x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
            let dw = 30.0 * x * x * (1.0 - x) * (1.0 - x) / width;
            let ddw = 60.0 * x * (1.0 - 3.0 * x + 2.0 * x * x) / (width * width);
            let (zc, dzc, ddzc) = self.catenoid_height(r);
            let (zs, dzs, ddzs) = self.sphere_height(r);
            let (d, dd, ddd) = (zs - zc, dzs - dzc, ddzs - ddzc);
            ProfileJet {
                r,
                z: zc + w * d,
                dr: 1.0,
                dz: dzc + dw * d + w * dd,
                ddr: 0.0,
                ddz: ddzc + ddw * d + 2.0 * dw * dd + w * ddd,
            }
        } else {
            let t = (3.0 - q) * self.catenoid_end;
            let n = self.neck;
            ProfileJet {
                r: n * t.cosh(),
                z: n * t,
                dr: n * t.sinh(),
                dz: n,
                ddr: n * t.cosh(),
                ddz: 0.0,
            }
        }
    }

    /// Derivative of the local piece parameter with respect to `q`.
    pub fn local_rate(&self, q: f64) -> f64 {
        if q <= 1.0 {
            std::f64::consts::PI - self.sphere_start
        } else if q <= 2.0 {
            BLEND_OUTER - BLEND_INNER
        } else {
            self.catenoid_end
        }
    }

    /// `(r, z)` at chart coordinate `s` in `[0, 1]`; `s = 0.5` is the waist.
    pub fn point(&self, s: f64) -> (f64, f64) {
        let (q, sign) = chart_to_profile(s);
        let j = self.jet(q);
        (j.r, sign * j.z)
    }

    /// Chart coordinate `s` of the profile point `(r, z)`.
    pub fn chart_of(&self, r: f64, z: f64) -> f64 {
        let (height, sign) = (z.abs(), z.signum());
        let q = if height >= self.jet(1.0).z {
            // Sphere arc: invert the angle directly, well conditioned at the pole.
            let a = r.atan2(self.sphere_center - height);
            (a - std::f64::consts::PI) / (self.sphere_start - std::f64::consts::PI)
        } else {
            // Height decreases strictly along the blend and the catenoid.
            let (mut lo, mut hi) = (1.0, 3.0);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if self.jet(mid).z > height {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        if sign >= 0.0 {
            q / 6.0
        } else {
            1.0 - q / 6.0
        }
    }

    /// Absolute mean curvature (trace) and Gaussian curvature at chart `s`.
    pub fn curvatures(&self, s: f64) -> (f64, f64) {
        let (q, _) = chart_to_profile(s);
        let (km, kp) = self.jet(q).principal_curvatures();
        ((km + kp).abs(), km * kp)
    }

    /// Area by composite Gauss-Legendre quadrature of `2 pi r |profile'|`.
    pub fn area(&self) -> f64 {
        let half = (0..3)
            .map(|piece| {
                gauss_legendre(piece as f64, piece as f64 + 1.0, 200, |q| {
                    let j = self.jet(q);
                    2.0 * std::f64::consts::PI * j.r * j.speed() * self.local_rate(q)
                })
            })
            .sum::<f64>();
        2.0 * half
    }

    /// Max of `|H|` over a dense sample of each piece.
    pub fn max_mean_curvature(&self) -> f64 {
        let n = 4000;
        (0..=3 * n)
            .map(|i| {
                let (km, kp) = self.jet(i as f64 / n as f64).principal_curvatures();
                (km + kp).abs()
            })
            .filter(|h| h.is_finite())
            .fold(0.0, f64::max)
    }
}

/// Upper-half parameter and height sign for chart coordinate `s`.
pub fn chart_to_profile(s: f64) -> (f64, f64) {
    let s = s.clamp(0.0, 1.0);
    if s <= 0.5 {
        (6.0 * s, 1.0)
    } else {
        (6.0 * (1.0 - s), -1.0)
    }
}

/// Composite 5-point Gauss-Legendre rule on `[a, b]` with `panels` panels.
pub fn gauss_legendre(a: f64, b: f64, panels: usize, f: impl Fn(f64) -> f64) -> f64 {
    const NODES: [f64; 5] = [
        -0.906_179_845_938_664,
        -0.538_469_310_105_683,
        0.0,
        0.538_469_310_105_683,
        0.906_179_845_938_664,
    ];
    const WEIGHTS: [f64; 5] = [
        0.236_926_885_056_189,
        0.478_628_670_499_366,
        0.568_888_888_888_889,
        0.478_628_670_499_366,
        0.236_926_885_056_189,
    ];
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for (x, w) in NODES.iter().zip(WEIGHTS) {
            total += w * f(mid + 0.5 * h * x);
        }
    }
    0.5 * h * total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pieces_meet_continuously() {
        for neck in [0.2, 0.1, 0.05, 0.025] {
            let p = DumbbellProfile::new(neck).unwrap();
            for q in [1.0, 2.0] {
                let a = p.jet(q - 1e-9);
                let b = p.jet(q + 1e-9);
                assert!((a.r - b.r).abs() < 1e-7 && (a.z - b.z).abs() < 1e-7, "q={q}");
                let (ka, kb) = (a.principal_curvatures(), b.principal_curvatures());
                assert!((ka.0 + ka.1 - kb.0 - kb.1).abs() < 1e-4, "q={q}");
            }
            assert!(p.jet(3.0).z.abs() < 1e-15);
            assert!((p.jet(3.0).r - neck).abs() < 1e-15);
        }
    }

    #[test]
    fn sphere_and_neck_curvatures() {
        let p = DumbbellProfile::new(0.1).unwrap();
        let (h, k) = p.curvatures(0.05);
        assert!((h - 2.0).abs() < 1e-12 && (k - 1.0).abs() < 1e-12);
        let (h, k) = p.curvatures(0.5);
        assert!(h < 1e-12);
        assert!((k + 1.0 / 0.01).abs() < 1e-9);
    }

    #[test]
    fn profile_height_is_monotone() {
        for neck in [0.2, 0.1, 0.05, 0.025] {
            let p = DumbbellProfile::new(neck).unwrap();
            let mut last = f64::INFINITY;
            for i in 0..=3000 {
                let z = p.jet(i as f64 / 1000.0).z;
                assert!(z < last + 1e-12);
                last = z;
            }
        }
    }
}
