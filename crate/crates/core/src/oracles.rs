//! Independent cross-checks of the closed forms, run by the `verify`
//! command and by the test suites.
//!
//! Each check compares a fast evaluation with a slower route that shares as
//! little code as possible: finite differences, direct Matsubara sums,
//! cubature, numerical Laplace transforms and a second dissipation path.

use std::f64::consts::PI;

use crate::error::Result;
use crate::friction::{dissipated_energy, Trajectory, DISSIPATION_CONSISTENCY};
use crate::geometry::{
    halfspace_cubature_oracle, lateral_integral, plane_cubature, slab_cubature_oracle,
    PlaneComponent,
};
use crate::parallel::map_indexed;
use crate::quadrature::{gauss_legendre, Tolerance};
use crate::response::{
    closed_form_correlation, matsubara_convolution, response_time_domain, OscillatorModel,
    ThermalState,
};
use crate::spectral::{polarizability_from_spectrum, verify_measure_identity, SpectralPolarizability};
use crate::tensor_kernel::{coupling_gradient, finite_difference_gradient, friction_kernel, SeparationVector};

/// Outcome of one check: the worst discrepancy seen and the bound it must
/// stay under.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub discrepancy: f64,
    pub bound: f64,
    pub detail: String,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.discrepancy <= self.bound
    }

    fn from_result(name: &'static str, bound: f64, r: Result<(f64, String)>) -> Self {
        match r {
            Ok((discrepancy, detail)) => Self {
                name,
                discrepancy,
                bound,
                detail,
            },
            Err(e) => Self {
                name,
                discrepancy: f64::INFINITY,
                bound,
                detail: format!("error: {e}"),
            },
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(a.abs())
    }
}

/// Deterministic quasi-random points on a shell of radii in [0.5, 5].
pub fn sample_separations(n: usize) -> Vec<SeparationVector> {
    // Weyl sequence in (u, v, w) mapped to radius and direction.
    let (a1, a2, a3) = (0.754_877_666_246_692_8, 0.569_840_290_998_053_2, 0.430_159_709_001_946_8);
    (0..n)
        .map(|i| {
            let k = i as f64 + 1.0;
            let (u, v, w) = ((k * a1).fract(), (k * a2).fract(), (k * a3).fract());
            let r = 0.5 * 10f64.powf(w);
            let cos_t = 2.0 * u - 1.0;
            let sin_t = (1.0 - cos_t * cos_t).sqrt();
            let phi = 2.0 * PI * v;
            SeparationVector::new([r * sin_t * phi.cos(), r * sin_t * phi.sin(), r * cos_t])
                .expect("radius >= 0.5")
        })
        .collect()
}

/// Finite differences of ψ against the closed-form gradient at `h = 1e-4 r`.
pub fn tensor_gradient_check(n: usize) -> CheckOutcome {
    let pts = sample_separations(n);
    let worst = map_indexed(pts.len(), |i| {
        let r = &pts[i];
        let exact = coupling_gradient(r);
        finite_difference_gradient(r, 1e-4 * r.norm())
            .map(|fd| fd.max_abs_diff(&exact) / exact.max_abs())
            .unwrap_or(f64::INFINITY)
    })
    .into_iter()
    .fold(0.0, f64::max);
    CheckOutcome {
        name: "tensor: finite-difference gradient",
        discrepancy: worst,
        bound: 1e-6,
        detail: format!("{n} separations"),
    }
}

/// Closed-form G against the contraction of T, and G positive semidefinite.
pub fn tensor_kernel_check(n: usize) -> CheckOutcome {
    let pts = sample_separations(n);
    let worst = map_indexed(pts.len(), |i| {
        let r = &pts[i];
        match friction_kernel(r) {
            Ok(g) => {
                let c = coupling_gradient(r).contract();
                let mut d = 0.0f64;
                for l in 0..3 {
                    for q in 0..3 {
                        d = d.max((g.get(l, q) - c.get(l, q)).abs());
                    }
                }
                // aᵀGa > 0 for a few directions including r itself
                let x = r.components();
                let psd = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], x]
                    .iter()
                    .all(|a| g.bilinear(*a, *a) > 0.0);
                if psd {
                    d / g.max_abs()
                } else {
                    f64::INFINITY
                }
            }
            Err(_) => f64::INFINITY,
        }
    })
    .into_iter()
    .fold(0.0, f64::max);
    CheckOutcome {
        name: "tensor: closed form vs contraction",
        discrepancy: worst,
        bound: 1e-12,
        detail: format!("{n} separations"),
    }
}

/// Direct Matsubara convolution against `H f(K_n)`, n = 0..=10.
pub fn matsubara_check(params: &[(f64, f64, f64, f64, f64)], n_max: usize) -> CheckOutcome {
    let r = (|| {
        let mut worst = 0.0f64;
        for &(a1, e1, a2, e2, beta) in params {
            let (o1, o2) = (OscillatorModel::new(a1, e1)?, OscillatorModel::new(a2, e2)?);
            let th = ThermalState::new(beta)?;
            for n in 0..=10 {
                let sum = matsubara_convolution(&o1, &o2, &th, n, n_max, 1e-8)?;
                let exact = closed_form_correlation(&o1, &o2, &th, th.matsubara(n))?;
                worst = worst.max(rel(sum.value, exact));
            }
        }
        Ok((worst, format!("{} parameter sets, n_max = {n_max}", params.len())))
    })();
    CheckOutcome::from_result("response: Matsubara sum vs closed form", 1e-8, r)
}

/// `∫₀^∞ φ(t) e^{−ηt} dt` by Gauss-Legendre panels.
pub fn numerical_laplace(phi: impl Fn(f64) -> f64 + Sync, eta: f64, fastest: f64) -> f64 {
    let (x, w) = gauss_legendre(20);
    // Panels a quarter period wide until e^{-ηt} < 1e-18.
    let width = (0.5 * PI / fastest.max(eta)).min(1.0 / eta);
    let end = 42.0 / eta;
    let panels = (end / width).ceil() as usize;
    let parts = map_indexed(panels, |p| {
        let (a, b) = (p as f64 * width, (p + 1) as f64 * width);
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        x.iter()
            .zip(&w)
            .map(|(&xi, &wi)| {
                let t = c + h * xi;
                wi * phi(t) * (-eta * t).exp()
            })
            .sum::<f64>()
            * h
    });
    crate::parallel::pairwise_sum(&parts)
}

/// Laplace transform of the reconstructed φ(t) against the closed-form
/// correlation at 20 real K = η in [0.1, 10].
pub fn transform_identity_check(params: &[(f64, f64, f64, f64, f64)]) -> CheckOutcome {
    let r = (|| {
        let mut worst = 0.0f64;
        for &(a1, e1, a2, e2, beta) in params {
            let (o1, o2) = (OscillatorModel::new(a1, e1)?, OscillatorModel::new(a2, e2)?);
            let th = ThermalState::new(beta)?;
            for i in 0..20 {
                let eta = 0.1 * 100f64.powf(i as f64 / 19.0);
                let num = numerical_laplace(
                    |t| response_time_domain(&o1, &o2, &th, t).unwrap_or(f64::NAN),
                    eta,
                    e1 + e2,
                );
                let exact = closed_form_correlation(&o1, &o2, &th, eta)?;
                worst = worst.max(rel(num, exact));
            }
        }
        Ok((worst, format!("{} parameter sets x 20 values of K", params.len())))
    })();
    CheckOutcome::from_result("response: transform of phi(t) vs closed form", 1e-4, r)
}

/// Plane, half-space and slab cubature against the closed forms.
pub fn geometry_check(tol: f64) -> Vec<CheckOutcome> {
    let plane = plane_cubature(1.0, PlaneComponent::Xx, tol).and_then(|c| {
        let avg = plane_cubature(1.0, PlaneComponent::InPlaneAverage, tol)?;
        let d = rel(c.value, lateral_integral(1.0)?).max(rel(avg.value, c.value));
        Ok((d, format!("plane integral {:.12}", c.value)))
    });
    let half = halfspace_cubature_oracle(1.0, tol)
        .map(|c| (rel(c.value, 1.5 * PI), format!("half-space {:.12} +- {:.1e}", c.value, c.error())));
    let slab = slab_cubature_oracle(1.0, tol)
        .map(|c| (rel(c.value, 3.0 * PI / 8.0), format!("slab {:.12} +- {:.1e}", c.value, c.error())));
    vec![
        CheckOutcome::from_result("geometry: plane cubature", 1e-6, plane),
        CheckOutcome::from_result("geometry: half-space cubature", 1e-6, half),
        CheckOutcome::from_result("geometry: slab cubature", 1e-6, slab),
    ]
}

/// Measure identity ratio at γ = 1e-3 E.
pub fn measure_identity_check(energies: &[f64]) -> CheckOutcome {
    let r = (|| {
        let mut worst = 0.0f64;
        for &e in energies {
            worst = worst.max((verify_measure_identity(e, 1e-3 * e)? - 1.0).abs());
        }
        Ok((worst, format!("E in {energies:?}")))
    })();
    CheckOutcome::from_result("spectral: measure identity", 1e-2, r)
}

/// Lorentzian spectral integral against the damped-oscillator polarizability
/// `α E² / (E² + K² + γK)`.
pub fn lorentzian_check() -> CheckOutcome {
    let r = (|| {
        let (a, e, g) = (1.0, 1.0, 0.02);
        let s = SpectralPolarizability::lorentzian(a, e, g)?;
        let mut worst = 0.0f64;
        for &k in &[0.0, 0.3, 1.0, 3.0] {
            let h = polarizability_from_spectrum(&s, k, Tolerance::relative(1e-10))?;
            worst = worst.max(rel(h, a * e * e / (e * e + k * k + g * k)));
        }
        Ok((worst, "E = 1, gamma = 0.02".to_string()))
    })();
    CheckOutcome::from_result("spectral: Lorentzian vs damped oscillator", 1e-8, r)
}

/// Gaussian pulse `q = (e^{−t²/2}, 0, 0)` at r₀ = (0, 0, 1); returns the
/// relative gap between the two dissipation paths.
pub fn dissipation_check() -> CheckOutcome {
    let r = (|| {
        let traj = Trajectory::from_fn(-12.0, 12.0, 4001, |t| [(-0.5 * t * t).exp(), 0.0, 0.0])?;
        let r0 = SeparationVector::new([0.0, 0.0, 1.0])?;
        let s1 = SpectralPolarizability::sharp(1.0, 1.0)?;
        let s2 = SpectralPolarizability::lorentzian(1.0, 1.0, 0.05)?;
        let rep = dissipated_energy(&traj, &r0, &s1, &s2, &ThermalState::new(1.0)?)?;
        let gap = rel(rep.time_domain, rep.frequency_domain);
        let d = if rep.energy > 0.0 { gap } else { f64::INFINITY };
        Ok((d, format!("energy {:.10e}", rep.energy)))
    })();
    CheckOutcome::from_result("friction: dissipation time vs frequency", DISSIPATION_CONSISTENCY, r)
}

/// Parameter sets shared by the response checks.
pub fn default_response_params() -> Vec<(f64, f64, f64, f64, f64)> {
    vec![
        (1.0, 1.0, 1.0, 2.0, 1.0),
        (0.5, 1.5, 2.0, 1.5, 0.7),
        (1.0, 0.3, 1.0, 2.5, 3.0),
        (2.0, 4.0, 0.1, 1.0, 0.2),
    ]
}

/// Every check, in a fixed order.
pub fn run_all() -> Vec<CheckOutcome> {
    let params = default_response_params();
    let mut out = vec![
        tensor_kernel_check(10_000),
        tensor_gradient_check(10_000),
        matsubara_check(&params, 100_000),
        transform_identity_check(&params),
    ];
    out.extend(geometry_check(1e-7));
    out.push(lorentzian_check());
    out.push(measure_identity_check(&[0.5, 1.0, 2.0]));
    out.push(dissipation_check());
    out
}
