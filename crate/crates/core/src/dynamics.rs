//! Numerics for `F(z) = z^n + a/z^n + b`.
//!
//! `F` has `2n` critical points (the roots of `z^{2n} = a`) but only two
//! critical values `v± = b ± 2√a`. Orbits of the critical values decide the
//! global dynamics; this module iterates them, detects attracting cycles and
//! estimates their multipliers.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MapParams {
    n: u32,
    a: Complex64,
    b: Complex64,
}

impl MapParams {
    pub fn new(n: u32, a: Complex64, b: Complex64) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParams(format!(
                "n must be at least 3, got {n}"
            )));
        }
        if a == Complex64::new(0.0, 0.0) {
            return Err(Error::InvalidParams("a must be nonzero".into()));
        }
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidParams("a and b must be finite".into()));
        }
        Ok(Self { n, a, b })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    /// `F(z)`, or `None` at the pole `z = 0`.
    #[inline]
    pub fn eval(&self, z: Complex64) -> Option<Complex64> {
        if z.re == 0.0 && z.im == 0.0 {
            return None;
        }
        let zn = z.powu(self.n);
        Some(zn + self.a / zn + self.b)
    }

    /// `F(z)` with double-double intermediates, so the result is within a
    /// couple of ulps of the exact value at the given `z`. Used to test exact
    /// identities where plain `powu` drifts by several ulps at `|z|^n ~ 1e5`.
    pub fn eval_compensated(&self, z: Complex64) -> Option<Complex64> {
        self.eval_dd(Cdd::from(z)).map(Cdd::round)
    }

    fn eval_dd(&self, z: Cdd) -> Option<Cdd> {
        if z.re.hi == 0.0 && z.im.hi == 0.0 {
            return None;
        }
        let zn = z.powu(self.n);
        Some(zn.add(&Cdd::from(self.a).div(&zn)).add(&Cdd::from(self.b)))
    }

    /// `F'(z) = n z^{n-1} - n a / z^{n+1}`.
    #[inline]
    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let n = self.n as f64;
        let zn1 = z.powu(self.n - 1);
        n * zn1 - n * self.a / (zn1 * z * z)
    }

    /// `(v+, v-)` using the principal square root of `a`.
    pub fn critical_values(&self) -> (Complex64, Complex64) {
        let s = self.a.sqrt();
        (self.b + 2.0 * s, self.b - 2.0 * s)
    }

    /// The `2n` roots of `z^{2n} = a`, in order of increasing argument offset.
    pub fn critical_points(&self) -> Vec<Complex64> {
        let m = 2 * self.n;
        let r = self.a.norm().powf(1.0 / m as f64);
        let theta = self.a.arg();
        (0..m)
            .map(|k| Complex64::from_polar(r, (theta + TAU * k as f64) / m as f64))
            .collect()
    }
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Clone, Copy, Debug)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    fn new(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    fn renorm(s: f64, e: f64) -> Self {
        let hi = s + e;
        Dd {
            hi,
            lo: e - (hi - s),
        }
    }

    fn add(self, o: Dd) -> Dd {
        let s = self.hi + o.hi;
        let bb = s - self.hi;
        let e = (self.hi - (s - bb)) + (o.hi - bb) + self.lo + o.lo;
        Dd::renorm(s, e)
    }

    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p) + self.hi * o.lo + self.lo * o.hi;
        Dd::renorm(p, e)
    }

    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.add(o.mul(Dd::new(q1)).neg());
        let q2 = r.hi / o.hi;
        let r = r.add(o.mul(Dd::new(q2)).neg());
        Dd::renorm(q1, q2).add(Dd::new(r.hi / o.hi))
    }
}

#[derive(Clone, Copy, Debug)]
struct Cdd {
    re: Dd,
    im: Dd,
}

impl From<Complex64> for Cdd {
    fn from(z: Complex64) -> Self {
        Cdd {
            re: Dd::new(z.re),
            im: Dd::new(z.im),
        }
    }
}

impl Cdd {
    fn one() -> Self {
        Cdd::from(Complex64::new(1.0, 0.0))
    }

    fn round(self) -> Complex64 {
        Complex64::new(self.re.hi + self.re.lo, self.im.hi + self.im.lo)
    }

    fn powu(&self, n: u32) -> Cdd {
        (0..n).fold(Cdd::one(), |acc, _| acc.mul(self))
    }

    fn sub(&self, o: &Cdd) -> Cdd {
        Cdd {
            re: self.re.add(o.re.neg()),
            im: self.im.add(o.im.neg()),
        }
    }

    /// `e^{2πik/n}` to double-double accuracy: one Newton step on
    /// `w^n = 1` from the f64 value.
    fn root_of_unity(k: u32, n: u32) -> Cdd {
        let w = Cdd::from(Complex64::from_polar(1.0, TAU * k as f64 / n as f64));
        let f = w.powu(n).sub(&Cdd::one());
        let df = w.powu(n - 1).mul(&Cdd::from(Complex64::new(n as f64, 0.0)));
        w.sub(&f.div(&df))
    }

    fn add(&self, o: &Cdd) -> Cdd {
        Cdd {
            re: self.re.add(o.re),
            im: self.im.add(o.im),
        }
    }

    fn mul(&self, o: &Cdd) -> Cdd {
        Cdd {
            re: self.re.mul(o.re).add(self.im.mul(o.im).neg()),
            im: self.re.mul(o.im).add(self.im.mul(o.re)),
        }
    }

    fn div(&self, o: &Cdd) -> Cdd {
        let norm = o.re.mul(o.re).add(o.im.mul(o.im));
        let conj = Cdd {
            re: o.re,
            im: o.im.neg(),
        };
        let num = self.mul(&conj);
        Cdd {
            re: num.re.div(norm),
            im: num.im.div(norm),
        }
    }
}

pub fn eval_f(p: &MapParams, z: Complex64) -> Option<Complex64> {
    p.eval(z)
}

pub fn critical_values(p: &MapParams) -> (Complex64, Complex64) {
    p.critical_values()
}

pub fn critical_points(p: &MapParams) -> Vec<Complex64> {
    p.critical_points()
}

#[derive(Clone, Copy, Debug)]
pub struct OrbitConfig {
    pub max_iter: usize,
    pub escape_radius: f64,
    /// Recurrence tolerance for cycle detection.
    pub tol: f64,
    pub max_period: usize,
}

impl Default for OrbitConfig {
    fn default() -> Self {
        Self {
            max_iter: 100_000,
            escape_radius: 1e6,
            tol: 1e-8,
            max_period: 64,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrbitStatus {
    /// `|z_k| > escape_radius` first at step `k` (or `z_{k-1} = 0`).
    Escaped(usize),
    Bounded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cycle {
    pub period: usize,
    pub multiplier: Complex64,
    /// One period of the orbit, ending with the last iterate.
    pub points: Vec<Complex64>,
}

impl Cycle {
    pub fn is_attracting(&self) -> bool {
        self.multiplier.norm() < 1.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrbitResult {
    pub status: OrbitStatus,
    pub cycle: Option<Cycle>,
    /// Last iterate computed.
    pub last: Complex64,
    pub iterations: usize,
}

impl OrbitResult {
    pub fn is_bounded(&self) -> bool {
        self.status == OrbitStatus::Bounded
    }

    pub fn cycle_period(&self) -> Option<usize> {
        self.cycle.as_ref().map(|c| c.period)
    }

    pub fn multiplier(&self) -> Option<Complex64> {
        self.cycle.as_ref().map(|c| c.multiplier)
    }

    pub fn representative_point(&self) -> Option<Complex64> {
        self.cycle.as_ref().and_then(|c| c.points.last().copied())
    }
}

/// Iterate `F` from `z0`. Escape is checked before each step; a bounded
/// orbit's last `4 * max_period` iterates are scanned for a cycle.
pub fn iterate_orbit(p: &MapParams, z0: Complex64, cfg: &OrbitConfig) -> OrbitResult {
    let tail_len = 4 * cfg.max_period.max(1);
    let mut tail = std::collections::VecDeque::with_capacity(tail_len + 1);
    let mut z = z0;
    for k in 0..cfg.max_iter {
        if z.norm().is_nan() || z.norm() > cfg.escape_radius {
            return OrbitResult {
                status: OrbitStatus::Escaped(k),
                cycle: None,
                last: z,
                iterations: k,
            };
        }
        tail.push_back(z);
        if tail.len() > tail_len {
            tail.pop_front();
        }
        z = match p.eval(z) {
            Some(w) => w,
            None => {
                return OrbitResult {
                    status: OrbitStatus::Escaped(k + 1),
                    cycle: None,
                    last: Complex64::new(f64::INFINITY, 0.0),
                    iterations: k + 1,
                }
            }
        };
    }
    if z.norm().is_nan() || z.norm() > cfg.escape_radius {
        return OrbitResult {
            status: OrbitStatus::Escaped(cfg.max_iter),
            cycle: None,
            last: z,
            iterations: cfg.max_iter,
        };
    }
    tail.push_back(z);
    let tail: Vec<Complex64> = tail.into_iter().collect();
    OrbitResult {
        status: OrbitStatus::Bounded,
        cycle: detect_attracting_cycle(p, &tail, cfg.tol, cfg.max_period),
        last: z,
        iterations: cfg.max_iter,
    }
}

/// Smallest period `q <= max_period` with `|z_{k+q} - z_k| < tol` across the
/// final stretch of `tail`, and the multiplier of that cycle.
///
/// The multiplier is reported whatever its modulus; check
/// [`Cycle::is_attracting`].
pub fn detect_attracting_cycle(
    p: &MapParams,
    tail: &[Complex64],
    tol: f64,
    max_period: usize,
) -> Option<Cycle> {
    let len = tail.len();
    for q in 1..=max_period {
        if 2 * q > len {
            break;
        }
        let stretch = max_period.min(len - q);
        let recurs = (len - q - stretch..len - q).all(|k| (tail[k + q] - tail[k]).norm() < tol);
        if recurs {
            let points = tail[len - q..].to_vec();
            let multiplier = points.iter().map(|&z| p.derivative(z)).product();
            return Some(Cycle {
                period: q,
                multiplier,
                points,
            });
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq)]
pub struct MapReport {
    pub v_plus: OrbitResult,
    pub v_minus: OrbitResult,
    pub same_cycle: bool,
}

/// Run both critical-value orbits. `same_cycle` holds when both settle on
/// cycles whose point sets agree within `sqrt(tol)`.
pub fn classify_map(p: &MapParams, cfg: &OrbitConfig) -> MapReport {
    let (vp, vm) = p.critical_values();
    let v_plus = iterate_orbit(p, vp, cfg);
    let v_minus = iterate_orbit(p, vm, cfg);
    let same_cycle = match (&v_plus.cycle, &v_minus.cycle) {
        (Some(c1), Some(c2)) if c1.period == c2.period => {
            let close = cfg.tol.sqrt();
            c1.points
                .iter()
                .all(|z| c2.points.iter().any(|w| (z - w).norm() < close))
        }
        _ => false,
    };
    MapReport {
        v_plus,
        v_minus,
        same_cycle,
    }
}

/// Largest `|F(z e^{2πik/n}) - F(z)|` over seeded random `z` with
/// `|z| ∈ [0.1, 10]` and `k = 1..n-1`.
pub fn symmetry_residual(p: &MapParams, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rotations: Vec<Cdd> = (1..p.n).map(|k| Cdd::root_of_unity(k, p.n)).collect();
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let r = rng.random_range(0.1..=10.0);
        let theta = rng.random_range(0.0..TAU);
        let z = Cdd::from(Complex64::from_polar(r, theta));
        let fz = p.eval_dd(z).expect("|z| >= 0.1").round();
        for w in &rotations {
            let fw = p.eval_dd(z.mul(w)).expect("|z| >= 0.1").round();
            worst = worst.max((fw - fz).norm());
        }
    }
    worst
}
