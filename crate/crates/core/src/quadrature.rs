//! Adaptive Gauss-Kronrod quadrature with error control.
//!
//! Globally adaptive bisection on a 21-point Kronrod / 10-point Gauss pair,
//! with user breakpoints and an algebraic map for semi-infinite ranges.
//! Error estimates follow the QUADPACK heuristic.

use std::collections::BinaryHeap;

use crate::error::{invalid, Error, Result};
use crate::parallel::map_indexed;

/// Kronrod abscissae on [-1, 1], positive half; the last entry is the centre.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_478_400,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Gauss weights for the odd-indexed Kronrod nodes XGK[1], XGK[3], ...
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Absolute-plus-relative accuracy target: converged when
/// `error <= max(abs, rel * |value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel }
    }

    pub const fn absolute(abs: f64) -> Self {
        Self { abs, rel: 0.0 }
    }

    pub const fn relative(rel: f64) -> Self {
        Self { abs: 0.0, rel }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }

    fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x >= 0.0;
        if !ok(self.abs) || !ok(self.rel) || (self.abs == 0.0 && self.rel == 0.0) {
            return Err(invalid(
                "tolerance",
                format!("need finite non-negative abs/rel, not both zero; got {self:?}"),
            ));
        }
        Ok(())
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::new(0.0, 1e-10)
    }
}

/// Value of a definite integral with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
enum Map {
    Identity,
    /// x = a + t / (1 - t), t in [0, 1)
    SemiInfinite { a: f64 },
}

impl Map {
    #[inline]
    fn apply(self, t: f64) -> (f64, f64) {
        match self {
            Map::Identity => (t, 1.0),
            Map::SemiInfinite { a } => {
                let s = 1.0 - t;
                (a + t / s, 1.0 / (s * s))
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    map: Map,
    value: f64,
    error: f64,
    /// The error estimate is the roundoff floor; bisection cannot help.
    at_floor: bool,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Adaptive integrator configuration.
#[derive(Debug, Clone, Copy)]
pub struct Adaptive {
    pub tolerance: Tolerance,
    pub max_segments: usize,
    /// Evaluate the 21 nodes of each rule application concurrently. Useful
    /// when a single integrand evaluation is itself an integral.
    pub parallel_nodes: bool,
}

impl Adaptive {
    pub fn new(tolerance: Tolerance) -> Self {
        Self {
            tolerance,
            max_segments: 4000,
            parallel_nodes: false,
        }
    }

    pub fn with_max_segments(mut self, n: usize) -> Self {
        self.max_segments = n;
        self
    }

    pub fn with_parallel_nodes(mut self, on: bool) -> Self {
        self.parallel_nodes = on;
        self
    }

    /// Integral of `f` over the finite interval `[a, b]`.
    pub fn integrate<F>(&self, f: F, a: f64, b: f64) -> Result<Integral>
    where
        F: Fn(f64) -> f64 + Sync,
    {
        self.integrate_pieces(&f, &[a, b], false)
    }

    /// Integral over `[breaks[0], breaks[last]]`, with the interior points
    /// used as initial subdivision points.
    pub fn integrate_with_breaks<F>(&self, f: F, breaks: &[f64]) -> Result<Integral>
    where
        F: Fn(f64) -> f64 + Sync,
    {
        self.integrate_pieces(&f, breaks, false)
    }

    /// Integral of `f` over `[a, ∞)`.
    pub fn integrate_to_infinity<F>(&self, f: F, a: f64) -> Result<Integral>
    where
        F: Fn(f64) -> f64 + Sync,
    {
        self.integrate_pieces(&f, &[a], true)
    }

    /// Integral over `[breaks[0], ∞)` with finite pieces between the breaks
    /// and a mapped tail beyond the last one.
    pub fn integrate_with_breaks_to_infinity<F>(&self, f: F, breaks: &[f64]) -> Result<Integral>
    where
        F: Fn(f64) -> f64 + Sync,
    {
        self.integrate_pieces(&f, breaks, true)
    }

    fn integrate_pieces<F>(&self, f: &F, breaks: &[f64], open_tail: bool) -> Result<Integral>
    where
        F: Fn(f64) -> f64 + Sync,
    {
        self.tolerance.validate()?;
        if breaks.is_empty() || (!open_tail && breaks.len() < 2) {
            return Err(invalid("breaks", "need at least one finite interval"));
        }
        if breaks.iter().any(|x| !x.is_finite()) {
            return Err(invalid("breaks", "breakpoints must be finite"));
        }
        if breaks.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("breaks", "breakpoints must be strictly increasing"));
        }

        let mut evaluations = 0usize;
        let mut heap = BinaryHeap::new();
        for w in breaks.windows(2) {
            heap.push(self.rule(f, w[0], w[1], Map::Identity, &mut evaluations));
        }
        if open_tail {
            let a = *breaks.last().unwrap();
            heap.push(self.rule(f, 0.0, 1.0, Map::SemiInfinite { a }, &mut evaluations));
        }

        // Segments too narrow to bisect further are retired here.
        let mut retired_value = 0.0;
        let mut retired_error = 0.0;
        let mut roundoff_error = 0.0;
        let (mut run_value, mut run_error) = totals(&heap, 0.0, 0.0);

        loop {
            if !run_value.is_finite() || !run_error.is_finite() {
                return Err(Error::Convergence {
                    achieved: f64::INFINITY,
                    requested: self.tolerance.target(0.0),
                });
            }
            let target = self.tolerance.target(run_value);
            if run_error <= target {
                let (value, error) = totals(&heap, retired_value, retired_error);
                return Ok(Integral {
                    value,
                    error,
                    evaluations,
                });
            }
            if heap.len() + 1 > self.max_segments {
                return Err(Error::Convergence {
                    achieved: run_error,
                    requested: target,
                });
            }
            let Some(worst) = heap.pop() else {
                // Only segments at the roundoff floor remain: that is the
                // best attainable answer, reported with its honest error.
                if retired_error - roundoff_error <= target {
                    let (value, error) = totals(&heap, retired_value, retired_error);
                    return Ok(Integral {
                        value,
                        error,
                        evaluations,
                    });
                }
                return Err(Error::Convergence {
                    achieved: run_error,
                    requested: target,
                });
            };
            if worst.at_floor {
                retired_value += worst.value;
                retired_error += worst.error;
                roundoff_error += worst.error;
                continue;
            }
            let mid = 0.5 * (worst.lo + worst.hi);
            let width = worst.hi - worst.lo;
            if width <= 1e3 * f64::EPSILON * worst.lo.abs().max(worst.hi.abs()).max(1e-300)
                || mid <= worst.lo
                || mid >= worst.hi
            {
                retired_value += worst.value;
                retired_error += worst.error;
                continue;
            }
            let left = self.rule(f, worst.lo, mid, worst.map, &mut evaluations);
            let right = self.rule(f, mid, worst.hi, worst.map, &mut evaluations);
            run_value += left.value + right.value - worst.value;
            run_error += left.error + right.error - worst.error;
            heap.push(left);
            heap.push(right);
            // Resynchronise occasionally against drift in the running sums.
            if evaluations % (21 * 256) == 0 {
                let (v, e) = totals(&heap, retired_value, retired_error);
                run_value = v;
                run_error = e;
            }
        }
    }

    fn rule<F>(&self, f: &F, lo: f64, hi: f64, map: Map, evaluations: &mut usize) -> Segment
    where
        F: Fn(f64) -> f64 + Sync,
    {
        let centre = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        // Node k in 0..21: k < 10 -> centre - half*XGK[k], k == 10 -> centre,
        // k > 10 -> centre + half*XGK[20-k].
        let node = |k: usize| -> f64 {
            let t = match k {
                0..=9 => centre - half * XGK[k],
                10 => centre,
                _ => centre + half * XGK[20 - k],
            };
            let (x, jac) = map.apply(t);
            let y = f(x) * jac;
            if y.is_finite() {
                y
            } else {
                f64::NAN
            }
        };
        let values: Vec<f64> = if self.parallel_nodes {
            map_indexed(21, node)
        } else {
            (0..21).map(node).collect()
        };
        *evaluations += 21;

        let fc = values[10];
        let mut res_k = fc * WGK[10];
        let mut res_g = 0.0;
        let mut res_abs = res_k.abs();
        for j in 0..10 {
            let (f1, f2) = (values[j], values[20 - j]);
            res_k += WGK[j] * (f1 + f2);
            res_abs += WGK[j] * (f1.abs() + f2.abs());
            if j % 2 == 1 {
                res_g += WG[j / 2] * (f1 + f2);
            }
        }
        let mean = 0.5 * res_k;
        let mut res_asc = WGK[10] * (fc - mean).abs();
        for j in 0..10 {
            res_asc += WGK[j] * ((values[j] - mean).abs() + (values[20 - j] - mean).abs());
        }
        let value = res_k * half;
        res_abs *= half.abs();
        res_asc *= half.abs();
        let mut error = ((res_k - res_g) * half).abs();
        if res_asc != 0.0 && error != 0.0 {
            error = res_asc * (1.0f64).min((200.0 * error / res_asc).powf(1.5));
        }
        let mut at_floor = false;
        if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
            let floor = 50.0 * f64::EPSILON * res_abs;
            at_floor = error <= floor;
            error = error.max(floor);
        }
        if value.is_nan() {
            error = f64::INFINITY;
        }
        Segment {
            lo,
            hi,
            map,
            value,
            error,
            at_floor,
        }
    }
}

fn totals(heap: &BinaryHeap<Segment>, v0: f64, e0: f64) -> (f64, f64) {
    // Sorted by position so the sum does not depend on heap layout.
    let mut segs: Vec<&Segment> = heap.iter().collect();
    segs.sort_by(|a, b| {
        (a.map_key(), a.lo)
            .partial_cmp(&(b.map_key(), b.lo))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut v = v0;
    let mut e = e0;
    for s in segs {
        v += s.value;
        e += s.error;
    }
    (v, e)
}

impl Segment {
    fn map_key(&self) -> u8 {
        match self.map {
            Map::Identity => 0,
            Map::SemiInfinite { .. } => 1,
        }
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { z } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * p - pm1) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            return (vec![0.0], vec![2.0]);
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}
