//! Friction forces for a particle pair, a particle above a half-space and
//! two half-spaces, plus the energy dissipated along a prescribed path.
//!
//! Every force factorizes as `−(geometry kernel · v) × (spectral factor)`.
//! For broadened spectra the spectral factor is the overlap strength H₀.
//! For two sharp spectra the force is proportional to δ(E₁ − E₂): coincident
//! lines yield a distributional strength `H πβ/2` (reported, never turned
//! into a number), detuned lines yield an exact zero.

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::geometry::{halfspace_kernel, slab_kernel, HalfSpaceSpec, SlabPairSpec};
use crate::parallel::{map_indexed, pairwise_sum};
use crate::quadrature::Tolerance;
use crate::response::{
    friction_strength_sharp, OscillatorModel, PairSpectrum, ResponseKernel, ThermalState,
};
use crate::spectral::{overlap_strength, SpectralPolarizability};
use crate::tensor_kernel::{friction_kernel, FrictionKernelTensor, SeparationVector};

/// Relative agreement required between the two dissipation paths.
pub const DISSIPATION_CONSISTENCY: f64 = 1e-4;

/// Largest allowed `Ω_max Δt` on a trajectory grid.
pub const MAX_PHASE_STEP: f64 = 0.1;

/// Gauss nodes per broadened line when a spectrum is turned into modes.
pub const NODES_PER_LINE: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeometrySpec {
    Pair { r: SeparationVector, v: [f64; 3] },
    ParticlePlane { half: HalfSpaceSpec, v: f64 },
    Slabs { pair: SlabPairSpec, v: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrictionMode {
    /// Two sharp spectra with a coincident line: distributional.
    SharpResonant,
    /// Two sharp spectra with no coincident line: exactly zero.
    SharpDetuned,
    Broadened,
}

impl FrictionMode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::SharpResonant => "sharp-resonant",
            Self::SharpDetuned => "sharp-detuned",
            Self::Broadened => "broadened",
        }
    }
}

/// A 3-vector for the pair geometry, a scalar along the motion otherwise
/// (per unit area for slabs).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ForceValue {
    Vector([f64; 3]),
    Scalar(f64),
}

impl ForceValue {
    pub fn components(&self) -> Vec<f64> {
        match *self {
            Self::Vector(v) => v.to_vec(),
            Self::Scalar(s) => vec![s],
        }
    }

    fn scaled(&self, c: f64) -> Self {
        match *self {
            Self::Vector(v) => Self::Vector([c * v[0], c * v[1], c * v[2]]),
            Self::Scalar(s) => Self::Scalar(c * s),
        }
    }

    fn zero_like(&self) -> Self {
        match self {
            Self::Vector(_) => Self::Vector([0.0; 3]),
            Self::Scalar(_) => Self::Scalar(0.0),
        }
    }

    /// Euclidean norm.
    pub fn magnitude(&self) -> f64 {
        self.components().iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralFactor {
    /// H₀, or the δ-strength `H πβ/2` when `distributional`.
    pub value: f64,
    pub error: f64,
    pub distributional: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrictionReport {
    /// `None` for sharp-resonant results, which have no finite force.
    pub force: Option<ForceValue>,
    /// `G v` (pair), `G_h v` or `G_s v`.
    pub kernel_factor: ForceValue,
    pub spectral_factor: SpectralFactor,
    pub mode: FrictionMode,
}

impl FrictionReport {
    /// Coefficient of the δ-function for sharp-resonant results.
    pub fn delta_coefficient(&self) -> Option<ForceValue> {
        (self.mode == FrictionMode::SharpResonant)
            .then(|| self.kernel_factor.scaled(-self.spectral_factor.value))
    }
}

fn sharp_oscillators(s: &SpectralPolarizability) -> Vec<OscillatorModel> {
    match s {
        SpectralPolarizability::Lines(lines) => lines
            .iter()
            .filter(|l| l.weight > 0.0)
            .filter_map(|l| OscillatorModel::new(l.weight, l.center).ok())
            .collect(),
        SpectralPolarizability::Tabulated(_) => Vec::new(),
    }
}

fn spectral_factor(
    s1: &SpectralPolarizability,
    s2: &SpectralPolarizability,
    th: &ThermalState,
    tol: Tolerance,
) -> Result<(SpectralFactor, FrictionMode)> {
    if s1.is_sharp() && s2.is_sharp() {
        let (o1, o2) = (sharp_oscillators(s1), sharp_oscillators(s2));
        let mut strength = 0.0;
        let mut resonant = false;
        for a in &o1 {
            for b in o2.iter().filter(|b| b.energy() == a.energy()) {
                resonant = true;
                strength += friction_strength_sharp(a, b, th)?;
            }
        }
        let mode = if resonant {
            FrictionMode::SharpResonant
        } else {
            FrictionMode::SharpDetuned
        };
        return Ok((
            SpectralFactor {
                value: strength,
                error: 0.0,
                distributional: resonant,
            },
            mode,
        ));
    }
    let h = overlap_strength(s1, s2, th, tol)?;
    Ok((
        SpectralFactor {
            value: h.h0,
            error: h.quadrature_error,
            distributional: false,
        },
        FrictionMode::Broadened,
    ))
}

fn assemble(kernel: ForceValue, factor: SpectralFactor, mode: FrictionMode) -> FrictionReport {
    let force = match mode {
        FrictionMode::SharpResonant => None,
        FrictionMode::SharpDetuned => Some(kernel.zero_like()),
        FrictionMode::Broadened => Some(kernel.scaled(-factor.value)),
    };
    FrictionReport {
        force,
        kernel_factor: kernel,
        spectral_factor: factor,
        mode,
    }
}

fn require_finite_velocity(v: &[f64]) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(invalid("v", "velocity must be finite"))
    }
}

/// `F_l = −G_lq v_q × H₀`.
pub fn pair_friction(
    r: &SeparationVector,
    v: [f64; 3],
    s1: &SpectralPolarizability,
    s2: &SpectralPolarizability,
    th: &ThermalState,
    tol: Tolerance,
) -> Result<FrictionReport> {
    require_finite_velocity(&v)?;
    let g = friction_kernel(r)?;
    let (factor, mode) = spectral_factor(s1, s2, th, tol)?;
    Ok(assemble(ForceValue::Vector(g.apply(v)), factor, mode))
}

/// `F_h = −(3πρ / 2z₀⁵) v H₀`.
pub fn particle_plane_friction(
    half: &HalfSpaceSpec,
    v: f64,
    s1: &SpectralPolarizability,
    s2: &SpectralPolarizability,
    th: &ThermalState,
    tol: Tolerance,
) -> Result<FrictionReport> {
    require_finite_velocity(&[v])?;
    let k = halfspace_kernel(half)? * v;
    let (factor, mode) = spectral_factor(s1, s2, th, tol)?;
    Ok(assemble(ForceValue::Scalar(k), factor, mode))
}

/// Force per unit area, `−(3πρ₁ρ₂ / 8d⁴) v H₀`.
pub fn slab_friction(
    pair: &SlabPairSpec,
    v: f64,
    s1: &SpectralPolarizability,
    s2: &SpectralPolarizability,
    th: &ThermalState,
    tol: Tolerance,
) -> Result<FrictionReport> {
    require_finite_velocity(&[v])?;
    let k = slab_kernel(pair)? * v;
    let (factor, mode) = spectral_factor(s1, s2, th, tol)?;
    Ok(assemble(ForceValue::Scalar(k), factor, mode))
}

/// Dispatches on the geometry.
pub fn evaluate(
    geometry: &GeometrySpec,
    s1: &SpectralPolarizability,
    s2: &SpectralPolarizability,
    th: &ThermalState,
    tol: Tolerance,
) -> Result<FrictionReport> {
    match geometry {
        GeometrySpec::Pair { r, v } => pair_friction(r, *v, s1, s2, th, tol),
        GeometrySpec::ParticlePlane { half, v } => particle_plane_friction(half, *v, s1, s2, th, tol),
        GeometrySpec::Slabs { pair, v } => slab_friction(pair, *v, s1, s2, th, tol),
    }
}

/// A path `q(t)` sampled on the uniform grid `t0 + i dt`. The path must
/// vanish at both ends of the window.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    t0: f64,
    dt: f64,
    q: Vec<[f64; 3]>,
}

impl Trajectory {
    pub fn new(t0: f64, dt: f64, q: Vec<[f64; 3]>) -> Result<Self> {
        if !(t0.is_finite() && dt.is_finite() && dt > 0.0) {
            return Err(invalid("trajectory", "need finite t0 and dt > 0"));
        }
        if q.len() < 3 {
            return Err(invalid("trajectory", "need at least three samples"));
        }
        if q.iter().flatten().any(|x| !x.is_finite()) {
            return Err(invalid("trajectory", "samples must be finite"));
        }
        let peak = q.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs()));
        let ends = q[0].iter().chain(q.last().unwrap()).fold(0.0f64, |a, x| a.max(x.abs()));
        if ends > 1e-8 * peak {
            return Err(invalid(
                "trajectory",
                format!("path must vanish at both ends of the window (|q| = {ends:e} at an end)"),
            ));
        }
        Ok(Self { t0, dt, q })
    }

    /// Samples `f` at `n` points on `[t0, t1]`.
    pub fn from_fn(t0: f64, t1: f64, n: usize, f: impl Fn(f64) -> [f64; 3]) -> Result<Self> {
        if n < 3 || !(t1 > t0) {
            return Err(invalid("trajectory", "need n >= 3 and t1 > t0"));
        }
        let dt = (t1 - t0) / (n - 1) as f64;
        Self::new(t0, dt, (0..n).map(|i| f(t0 + i as f64 * dt)).collect())
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn samples(&self) -> &[[f64; 3]] {
        &self.q
    }

    /// Central differences inside, one-sided at the ends.
    fn velocity(&self) -> Vec<[f64; 3]> {
        let n = self.q.len();
        let q = &self.q;
        (0..n)
            .map(|i| {
                let (a, b, span) = match i {
                    0 => (0, 1, self.dt),
                    _ if i == n - 1 => (n - 2, n - 1, self.dt),
                    _ => (i - 1, i + 1, 2.0 * self.dt),
                };
                [0, 1, 2].map(|c| (q[b][c] - q[a][c]) / span)
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DissipationReport {
    /// Energy absorbed by the oscillators, from the frequency-domain path.
    pub energy: f64,
    pub time_domain: f64,
    pub frequency_domain: f64,
    /// Time-domain integrand `−q̇_l G_lq (φ ∗ q_q)` on the grid.
    pub power: Vec<f64>,
}

/// Response modes of the pair, with broadened spectra sampled as sharp lines.
fn pair_kernel(
    s1: &SpectralPolarizability,
    s2: &SpectralPolarizability,
    th: &ThermalState,
) -> Result<ResponseKernel> {
    let l1 = s1.discretize(NODES_PER_LINE);
    let l2 = s2.discretize(NODES_PER_LINE);
    let mut kernel = ResponseKernel::default();
    for &(a1, e1) in &l1 {
        let o1 = OscillatorModel::new(a1, e1)?;
        for &(a2, e2) in &l2 {
            let o2 = OscillatorModel::new(a2, e2)?;
            kernel.extend(PairSpectrum::new(&o1, &o2, th)?.kernel());
        }
    }
    Ok(kernel)
}

/// Energy dissipated along `traj` with the response kernel `G_lq(r₀) φ(t)`.
///
/// The time-domain path convolves on the grid with the trapezoid rule. The
/// frequency-domain path uses `W = Σ_modes (A Ω / 2) Re[q̂*(Ω) · G q̂(Ω)]`
/// for `φ = Σ A sin(Ω t)`, with `q̂` a trapezoid Fourier transform. The two
/// must agree within [`DISSIPATION_CONSISTENCY`]. The returned energy is
/// the work absorbed by the oscillators (non-negative for a passive pair).
pub fn dissipated_energy(
    traj: &Trajectory,
    r0: &SeparationVector,
    s1: &SpectralPolarizability,
    s2: &SpectralPolarizability,
    th: &ThermalState,
) -> Result<DissipationReport> {
    let g = friction_kernel(r0)?;
    let kernel = pair_kernel(s1, s2, th)?;
    let fastest = kernel.max_frequency();
    if fastest * traj.dt > MAX_PHASE_STEP {
        return Err(Error::Resolution {
            frequency: fastest,
            step: traj.dt,
            limit: MAX_PHASE_STEP,
        });
    }
    let power = time_domain_power(traj, &g, &kernel);
    let time_domain = traj.dt * pairwise_sum(&power);
    let frequency_domain = frequency_domain_energy(traj, &g, &kernel);
    let scale = time_domain.abs().max(frequency_domain.abs());
    if scale > 0.0 {
        let discrepancy = (time_domain - frequency_domain).abs() / scale;
        if !(discrepancy <= DISSIPATION_CONSISTENCY) {
            return Err(Error::InternalConsistency {
                check: "dissipated energy, time vs frequency domain",
                discrepancy,
            });
        }
    }
    if !frequency_domain.is_finite() {
        return Err(Error::Overflow("dissipated energy"));
    }
    Ok(DissipationReport {
        energy: frequency_domain,
        time_domain,
        frequency_domain,
        power,
    })
}

fn time_domain_power(traj: &Trajectory, g: &FrictionKernelTensor, kernel: &ResponseKernel) -> Vec<f64> {
    let n = traj.len();
    let dt = traj.dt;
    let q = &traj.q;
    let phi: Vec<f64> = map_indexed(n, |k| kernel.eval(k as f64 * dt));
    let qdot = traj.velocity();
    // The path vanishes before the window, so the history starts at t0.
    map_indexed(n, |i| {
        let mut y = [0.0f64; 3];
        for j in 0..=i {
            let w = if j == 0 || j == i { 0.5 } else { 1.0 };
            let p = w * phi[i - j];
            for c in 0..3 {
                y[c] += p * q[j][c];
            }
        }
        let y = y.map(|c| c * dt);
        -g.bilinear(qdot[i], y)
    })
}

fn frequency_domain_energy(traj: &Trajectory, g: &FrictionKernelTensor, kernel: &ResponseKernel) -> f64 {
    let n = traj.len();
    let terms = map_indexed(kernel.modes.len(), |m| {
        let mode = kernel.modes[m];
        let mut qhat = [Complex64::new(0.0, 0.0); 3];
        for i in 0..n {
            let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            let phase = Complex64::from_polar(w * traj.dt, mode.frequency * traj.time(i));
            for c in 0..3 {
                qhat[c] += phase * traj.q[i][c];
            }
        }
        let mut quad = 0.0;
        for l in 0..3 {
            for k in 0..3 {
                quad += g.get(l, k) * (qhat[l].conj() * qhat[k]).re;
            }
        }
        0.5 * mode.amplitude * mode.frequency * quad
    });
    pairwise_sum(&terms)
}
