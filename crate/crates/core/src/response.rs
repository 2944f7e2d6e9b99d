//! Imaginary-time correlation functions of two harmonic oscillators.
//!
//! Reduced units (ħ = k_B = 1). The Matsubara variable is `K` and the real
//! frequency continuation is `K = iω`. For oscillators `(α₁, E₁)` and
//! `(α₂, E₂)` at inverse temperature `β` the two-particle correlation function
//! is `g̃(K) = H f(K)` with
//!
//! ```text
//! H    = E₁E₂α₁α₂ / (4 sinh(βE₁/2) sinh(βE₂/2))
//! f(K) = Σ₁ sinh(βΣ₁/2)/(K²+Σ₁²) + Σ₂ sinh(βΣ₂/2)/(K²+Σ₂²),  Σ₁,₂ = E₁ ± E₂
//! ```
//!
//! and the retarded response is `φ(t) = θ(t) H Σᵢ sinh(βΣᵢ/2) sin(Σᵢ t)`.
//! At `Σ₂ = 0` the second term of `f` is replaced by its continuous limit
//! (`β/2` at `K = 0`, zero otherwise); the δ(Σ₂) part that produces friction
//! is reported only by [`friction_strength_sharp`].

use std::f64::consts::PI;

use crate::error::{invalid, require_positive, Error, Result};
use crate::parallel::chunked_sum;
use crate::special::sinh_ratio;

/// Smallest truncation accepted by [`matsubara_convolution`].
pub const MIN_MATSUBARA_TERMS: usize = 1000;

/// Simple harmonic oscillator: static polarizability and eigenenergy ħω.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorModel {
    alpha0: f64,
    energy: f64,
}

impl OscillatorModel {
    pub fn new(alpha0: f64, energy: f64) -> Result<Self> {
        Ok(Self {
            alpha0: require_positive("alpha0", alpha0)?,
            energy: require_positive("energy", energy)?,
        })
    }

    pub fn alpha0(&self) -> f64 {
        self.alpha0
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }
}

/// Inverse temperature β = 1/T.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalState {
    beta: f64,
}

impl ThermalState {
    pub fn new(beta: f64) -> Result<Self> {
        Ok(Self {
            beta: require_positive("beta", beta)?,
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// K_n = 2πn/β.
    pub fn matsubara(&self, n: i64) -> f64 {
        2.0 * PI * n as f64 / self.beta
    }
}

/// Where a polarizability is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralArgument {
    /// Real `K` on the imaginary-time (Matsubara) axis.
    Matsubara(f64),
    /// Real frequency ω, i.e. `K = iω` and `K² = -ω²`.
    RealFrequency(f64),
}

impl SpectralArgument {
    pub fn k_squared(self) -> f64 {
        match self {
            SpectralArgument::Matsubara(k) => k * k,
            SpectralArgument::RealFrequency(w) => -w * w,
        }
    }
}

/// g̃_a(K) = α E² / (K² + E²).
pub fn oscillator_correlation(osc: &OscillatorModel, arg: SpectralArgument) -> Result<f64> {
    let e2 = osc.energy * osc.energy;
    let denom = arg.k_squared() + e2;
    if denom == 0.0 {
        let location = match arg {
            SpectralArgument::RealFrequency(w) => w,
            SpectralArgument::Matsubara(_) => osc.energy,
        };
        return Err(Error::Pole { location });
    }
    Ok(osc.alpha0 * e2 / denom)
}

/// One sinusoidal component `A sin(Ω t)` of a causal response.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponseMode {
    pub amplitude: f64,
    pub frequency: f64,
}

/// Causal response `φ(t) = θ(t) Σ A sin(Ω t)` with all `A, Ω > 0`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResponseKernel {
    pub modes: Vec<ResponseMode>,
}

impl ResponseKernel {
    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        self.modes
            .iter()
            .map(|m| m.amplitude * (m.frequency * t).sin())
            .sum()
    }

    /// One-sided transform at `K` on the Matsubara axis:
    /// `∫₀^∞ φ(t) e^{-Kt} dt = Σ A Ω / (K² + Ω²)`.
    pub fn laplace(&self, k: f64) -> f64 {
        self.modes
            .iter()
            .map(|m| m.amplitude * m.frequency / (k * k + m.frequency * m.frequency))
            .sum()
    }

    pub fn max_frequency(&self) -> f64 {
        self.modes.iter().fold(0.0, |a, m| a.max(m.frequency))
    }

    pub fn extend(&mut self, other: ResponseKernel) {
        self.modes.extend(other.modes);
    }
}

/// H and Σ₁,₂ for a pair of oscillators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairSpectrum {
    pub h: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    /// `H sinh(βΣ₁/2)` and `H sinh(β|Σ₂|/2)`, evaluated without forming the
    /// (possibly overflowing) factors separately.
    amp1: f64,
    amp2: f64,
    beta: f64,
}

impl PairSpectrum {
    pub fn new(o1: &OscillatorModel, o2: &OscillatorModel, th: &ThermalState) -> Result<Self> {
        let beta = th.beta;
        let (e1, e2) = (o1.energy, o2.energy);
        let scale = e1 * e2 * o1.alpha0 * o2.alpha0 / 4.0;
        let (b1, b2) = (0.5 * beta * e1, 0.5 * beta * e2);
        let h = h_from_parts(scale, b1, b2);
        let sigma1 = e1 + e2;
        let sigma2 = e1 - e2;
        let amp1 = scale * sinh_ratio(0.5 * beta * sigma1, b1, b2);
        let amp2 = if sigma2 == 0.0 {
            0.0
        } else {
            scale * sinh_ratio(0.5 * beta * sigma2.abs(), b1, b2)
        };
        if !h.is_finite() || !amp1.is_finite() || !amp2.is_finite() {
            return Err(Error::Overflow("H prefactor"));
        }
        Ok(Self {
            h,
            sigma1,
            sigma2,
            amp1,
            amp2,
            beta,
        })
    }

    /// H f(K) on the Matsubara axis (any real K).
    pub fn correlation(&self, k: f64) -> f64 {
        let k2 = k * k;
        let s1 = self.sigma1;
        let mut v = self.amp1 * s1 / (k2 + s1 * s1);
        if self.sigma2 == 0.0 {
            if k == 0.0 {
                v += self.h * 0.5 * self.beta;
            }
        } else {
            let s2 = self.sigma2.abs();
            v += self.amp2 * s2 / (k2 + s2 * s2);
        }
        v
    }

    /// φ̃(ω) on the real-frequency axis, `H f(iω)`.
    pub fn transform_real(&self, omega: f64) -> Result<f64> {
        let w2 = omega * omega;
        let s1 = self.sigma1;
        if w2 == s1 * s1 {
            return Err(Error::Pole { location: omega });
        }
        let mut v = self.amp1 * s1 / (s1 * s1 - w2);
        if self.sigma2 == 0.0 {
            if omega == 0.0 {
                v += self.h * 0.5 * self.beta;
            }
        } else {
            let s2 = self.sigma2.abs();
            if w2 == s2 * s2 {
                return Err(Error::Pole { location: omega });
            }
            v += self.amp2 * s2 / (s2 * s2 - w2);
        }
        Ok(v)
    }

    /// Sinusoidal modes of φ(t). A resonant pair (Σ₂ = 0) contributes only
    /// the Σ₁ mode.
    pub fn kernel(&self) -> ResponseKernel {
        let mut modes = vec![ResponseMode {
            amplitude: self.amp1,
            frequency: self.sigma1,
        }];
        if self.sigma2 != 0.0 {
            modes.push(ResponseMode {
                amplitude: self.amp2,
                frequency: self.sigma2.abs(),
            });
        }
        ResponseKernel { modes }
    }
}

fn h_from_parts(scale: f64, b1: f64, b2: f64) -> f64 {
    use crate::special::{ln_sinh, DIRECT_LIMIT};
    if b1.max(b2) <= DIRECT_LIMIT {
        scale / (b1.sinh() * b2.sinh())
    } else {
        (scale.ln() - ln_sinh(b1) - ln_sinh(b2)).exp()
    }
}

/// H = E₁E₂α₁α₂ / (4 sinh(βE₁/2) sinh(βE₂/2)).
pub fn h_prefactor(o1: &OscillatorModel, o2: &OscillatorModel, th: &ThermalState) -> Result<f64> {
    Ok(PairSpectrum::new(o1, o2, th)?.h)
}

/// Closed-form two-oscillator correlation `H f(K)`.
pub fn closed_form_correlation(
    o1: &OscillatorModel,
    o2: &OscillatorModel,
    th: &ThermalState,
    k: f64,
) -> Result<f64> {
    if !k.is_finite() {
        return Err(invalid("K", "must be finite"));
    }
    let v = PairSpectrum::new(o1, o2, th)?.correlation(k);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow("closed-form correlation"))
    }
}

/// Retarded response φ(t); zero for `t <= 0`.
pub fn response_time_domain(
    o1: &OscillatorModel,
    o2: &OscillatorModel,
    th: &ThermalState,
    t: f64,
) -> Result<f64> {
    Ok(PairSpectrum::new(o1, o2, th)?.kernel().eval(t))
}

/// `∫₀^∞ φ(u) du = φ̃(0)`, the coefficient of the secular (reversible) force.
pub fn reversible_coefficient(
    o1: &OscillatorModel,
    o2: &OscillatorModel,
    th: &ThermalState,
) -> Result<f64> {
    closed_form_correlation(o1, o2, th, 0.0)
}

/// Coefficient `H πβ/2` multiplying δ(ω₁ − ω₂) in the sharp-line friction.
/// This is a distributional strength, not a force.
pub fn friction_strength_sharp(
    o1: &OscillatorModel,
    o2: &OscillatorModel,
    th: &ThermalState,
) -> Result<f64> {
    Ok(h_prefactor(o1, o2, th)? * PI * th.beta / 2.0)
}

/// Symmetric difference `[φ̃(h) − φ̃(−h)] / 2h` on the real-frequency axis.
/// Off resonance φ̃ is even and regular at ω = 0, so this vanishes.
pub fn response_slope_at_zero(
    o1: &OscillatorModel,
    o2: &OscillatorModel,
    th: &ThermalState,
    h: f64,
) -> Result<f64> {
    let p = PairSpectrum::new(o1, o2, th)?;
    Ok((p.transform_real(h)? - p.transform_real(-h)?) / (2.0 * h))
}

/// Result of a truncated Matsubara convolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatsubaraSum {
    /// Truncated sum plus the analytic tail.
    pub value: f64,
    /// Analytic estimate of the terms beyond `|m| > n_max` (already added).
    pub tail: f64,
    /// Bound on |value − exact|: tail magnitude plus summation rounding.
    pub error_bound: f64,
    pub terms: usize,
}

/// `(1/β) Σ_m g̃₁(K_m) g̃₂(K_n − K_m)` over `|m| <= n_max`, with the
/// `O(n_max⁻³)` tail added analytically.
///
/// Fails with [`Error::Convergence`] when the error bound exceeds
/// `rel_tol · |value|`.
pub fn matsubara_convolution(
    o1: &OscillatorModel,
    o2: &OscillatorModel,
    th: &ThermalState,
    n: i64,
    n_max: usize,
    rel_tol: f64,
) -> Result<MatsubaraSum> {
    if n_max < MIN_MATSUBARA_TERMS {
        return Err(invalid(
            "n_max",
            format!("must be at least {MIN_MATSUBARA_TERMS}, got {n_max}"),
        ));
    }
    if !(rel_tol.is_finite() && rel_tol > 0.0) {
        return Err(invalid("rel_tol", format!("must be > 0, got {rel_tol}")));
    }
    let beta = th.beta;
    let step = 2.0 * PI / beta;
    let kn = step * n as f64;
    let (a1, e1s) = (o1.alpha0, o1.energy * o1.energy);
    let (a2, e2s) = (o2.alpha0, o2.energy * o2.energy);
    let nm = n_max as i64;
    let terms = 2 * n_max + 1;

    // All terms are positive on the Matsubara axis, so the sum of magnitudes
    // equals the sum itself.
    let sum = chunked_sum(terms, |i| {
        let m = i as i64 - nm;
        let k0 = step * m as f64;
        let d = kn - k0;
        (a1 * e1s / (k0 * k0 + e1s)) * (a2 * e2s / (d * d + e2s))
    });

    // Σ_{|m|>N} c / K_m⁴ ≈ 2 c (β/2π)⁴ / (3 (N + 1/2)³)
    let c = a1 * e1s * a2 * e2s;
    let half = nm as f64 + 0.5;
    let tail = 2.0 * c / step.powi(4) / (3.0 * half * half * half) / beta;
    let value = sum / beta + tail;
    let rounding = ((terms as f64).log2() + 10.0) * f64::EPSILON * sum / beta;
    let error_bound = tail.abs() + rounding;

    let requested = rel_tol * value.abs();
    if error_bound > requested {
        return Err(Error::Convergence {
            achieved: error_bound,
            requested,
        });
    }
    Ok(MatsubaraSum {
        value,
        tail,
        error_bound,
        terms,
    })
}
