//! Half-space and slab reductions of the pair kernel for motion along x.
//!
//! For a dilute medium the kernel of a particle above a half-space is the
//! pair kernel G₁₁ summed over the medium, and the slab kernel is the
//! half-space kernel summed over the second medium:
//!
//! - `∫∫ G₁₁ dx dy = 15π / (2 z⁶)` at height z,
//! - `G_h = ρ ∫_{z₀}^∞ 15π / (2 z⁶) dz = 3πρ / (2 z₀⁵)`,
//! - `G_s = ρ₂ ∫_d^∞ G_h(z₀) dz₀ = 3πρ₁ρ₂ / (8 d⁴)`.
//!
//! The cubature oracles integrate G₁₁ directly in cylindrical coordinates
//! and bound the discarded tails analytically with `G₁₁ <= 54 / r⁸`.

use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::quadrature::{Adaptive, Integral, Tolerance};
use crate::tensor_kernel::{friction_kernel_closed_form, SeparationVector};

fn require_gap(name: &str, z: f64) -> Result<f64> {
    if z.is_finite() && z > 0.0 {
        Ok(z)
    } else {
        Err(Error::Domain(format!("{name} must be > 0, got {z}")))
    }
}

fn require_density(name: &'static str, rho: f64) -> Result<f64> {
    if rho.is_finite() && rho >= 0.0 {
        Ok(rho)
    } else {
        Err(invalid(name, format!("number density must be >= 0, got {rho}")))
    }
}

/// A particle at height `z0` above a dilute half-space of number density
/// `density`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfSpaceSpec {
    z0: f64,
    density: f64,
}

impl HalfSpaceSpec {
    pub fn new(z0: f64, density: f64) -> Result<Self> {
        Ok(Self {
            z0: require_gap("z0", z0)?,
            density: require_density("density", density)?,
        })
    }

    pub fn z0(&self) -> f64 {
        self.z0
    }

    pub fn density(&self) -> f64 {
        self.density
    }

    pub fn with_z0(&self, z0: f64) -> Result<Self> {
        Self::new(z0, self.density)
    }
}

/// Two dilute half-spaces separated by a gap `d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlabPairSpec {
    d: f64,
    density1: f64,
    density2: f64,
}

impl SlabPairSpec {
    pub fn new(d: f64, density1: f64, density2: f64) -> Result<Self> {
        Ok(Self {
            d: require_gap("d", d)?,
            density1: require_density("density1", density1)?,
            density2: require_density("density2", density2)?,
        })
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn density1(&self) -> f64 {
        self.density1
    }

    pub fn density2(&self) -> f64 {
        self.density2
    }

    pub fn with_d(&self, d: f64) -> Result<Self> {
        Self::new(d, self.density1, self.density2)
    }
}

/// In-plane integral of G₁₁ at height `z`: `15π / (2 z⁶)`.
pub fn lateral_integral(z: f64) -> Result<f64> {
    require_gap("z", z)?;
    Ok(15.0 * PI / (2.0 * z.powi(6)))
}

/// `3πρ / (2 z₀⁵)`.
pub fn halfspace_kernel(spec: &HalfSpaceSpec) -> Result<f64> {
    let spec = HalfSpaceSpec::new(spec.z0, spec.density)?;
    Ok(3.0 * PI * spec.density / (2.0 * spec.z0.powi(5)))
}

/// `3πρ₁ρ₂ / (8 d⁴)`, per unit area.
pub fn slab_kernel(spec: &SlabPairSpec) -> Result<f64> {
    let spec = SlabPairSpec::new(spec.d, spec.density1, spec.density2)?;
    Ok(3.0 * PI * spec.density1 * spec.density2 / (8.0 * spec.d.powi(4)))
}

/// G₁₁ at cylindrical point (s, θ, z); NaN below the minimum separation.
fn g11(s: f64, theta: f64, z: f64) -> f64 {
    match SeparationVector::new([s * theta.cos(), s * theta.sin(), z]) {
        Ok(r) => friction_kernel_closed_form(&r).get(0, 0),
        Err(_) => f64::NAN,
    }
}

fn g22(s: f64, theta: f64, z: f64) -> f64 {
    match SeparationVector::new([s * theta.cos(), s * theta.sin(), z]) {
        Ok(r) => friction_kernel_closed_form(&r).get(1, 1),
        Err(_) => f64::NAN,
    }
}

/// Which in-plane component [`plane_cubature`] integrates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlaneComponent {
    /// G₁₁.
    Xx,
    /// ½(G₁₁ + G₂₂).
    InPlaneAverage,
}

fn inner_tolerance(tol: f64) -> Tolerance {
    Tolerance::relative((tol * 1e-3).max(1e-14))
}

/// 2-D adaptive cubature of an in-plane component of G over the plane at
/// height `z` (polar coordinates, full angle, semi-infinite radius).
pub fn plane_cubature(z: f64, component: PlaneComponent, tol: f64) -> Result<Integral> {
    require_gap("z", z)?;
    if !(tol.is_finite() && tol > 1e-13 && tol < 1.0) {
        return Err(invalid("tol", format!("relative tolerance must lie in (1e-13, 1), got {tol}")));
    }
    let inner = Adaptive::new(inner_tolerance(tol));
    let breaks = [0.0, 0.5 * z, z, 2.0 * z, 4.0 * z];
    Adaptive::new(Tolerance::relative(tol)).integrate_with_breaks(
        |theta| {
            inner
                .integrate_with_breaks_to_infinity(
                    |s| {
                        let g = match component {
                            PlaneComponent::Xx => g11(s, theta, z),
                            PlaneComponent::InPlaneAverage => {
                                0.5 * (g11(s, theta, z) + g22(s, theta, z))
                            }
                        };
                        g * s
                    },
                    &breaks,
                )
                .map(|r| r.value)
                .unwrap_or(f64::NAN)
        },
        &[0.0, 0.5 * PI, PI, 1.5 * PI, 2.0 * PI],
    )
}

fn check_tolerance(tol: f64) -> Result<()> {
    if tol.is_finite() && (1e-8..1.0).contains(&tol) {
        Ok(())
    } else {
        Err(invalid("tol", format!("relative tolerance must lie in [1e-8, 1), got {tol}")))
    }
}

/// Result of a truncated cubature: the box integral, its quadrature error
/// and an analytic bound on the discarded tails.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubatureEstimate {
    pub value: f64,
    pub quadrature_error: f64,
    pub tail_bound: f64,
    pub radius: f64,
    pub height: f64,
}

impl CubatureEstimate {
    pub fn error(&self) -> f64 {
        self.quadrature_error + self.tail_bound
    }
}

/// `(z − base)^power` weight of the z-integration: 0 for the half-space,
/// 1 for the slab (the second medium folded into a single z integral).
#[derive(Debug, Clone, Copy)]
struct Weight {
    base: f64,
    power: i32,
}

impl Weight {
    fn at(&self, z: f64) -> f64 {
        (z - self.base).powi(self.power)
    }

    /// Bounds with `G₁₁ <= 54/r⁸` on `s > radius` and on `z > height`.
    fn tail_bound(&self, radius: f64, height: f64) -> f64 {
        match self.power {
            0 => 54.0 * PI * PI / (16.0 * radius.powi(5)) + 18.0 * PI / (5.0 * height.powi(5)),
            _ => 4.5 * PI / radius.powi(4) + 4.5 * PI / height.powi(4),
        }
    }
}

fn geometric_breaks(lo: f64, hi: f64) -> Vec<f64> {
    let mut v = vec![lo];
    let mut x = if lo > 0.0 { 2.0 * lo } else { hi / 1024.0 };
    while x < hi {
        v.push(x);
        x *= 2.0;
    }
    v.push(hi);
    v
}

fn box_cubature(z0: f64, weight: Weight, radius: f64, height: f64, tol: f64) -> Result<CubatureEstimate> {
    let mid = Adaptive::new(inner_tolerance(tol));
    let inner = Adaptive::new(Tolerance::relative((tol * 1e-5).max(1e-14)));
    let s_breaks = {
        let mut b = vec![0.0];
        b.extend(geometric_breaks(0.25 * z0, radius));
        b
    };
    let quarter = [0.0, 0.25 * PI, 0.5 * PI];
    let outer = Adaptive::new(Tolerance::relative(tol))
        .with_parallel_nodes(true)
        .integrate_with_breaks(
            |z| {
                let w = weight.at(z);
                if w == 0.0 {
                    return 0.0;
                }
                let value = mid.integrate_with_breaks(
                    |s| {
                        // G₁₁ is even in x and y: integrate a quarter turn.
                        inner
                            .integrate_with_breaks(|theta| g11(s, theta, z), &quarter)
                            .map(|r| 4.0 * r.value * s)
                            .unwrap_or(f64::NAN)
                    },
                    &s_breaks,
                );
                value.map(|r| w * r.value).unwrap_or(f64::NAN)
            },
            &geometric_breaks(z0, height),
        )?;
    Ok(CubatureEstimate {
        value: outer.value,
        quadrature_error: outer.error + outer.value.abs() * tol * 1e-3,
        tail_bound: weight.tail_bound(radius, height),
        radius,
        height,
    })
}

fn grown_cubature(z0: f64, weight: Weight, tol: f64) -> Result<CubatureEstimate> {
    // Start with a box a few gaps wide and double it until the analytic tail
    // bound is a small fraction of the requested accuracy.
    let mut size = 8.0 * z0;
    for _ in 0..20 {
        let est = box_cubature(z0, weight, size, size + weight.base, tol)?;
        if est.tail_bound <= 0.25 * tol * est.value.abs() {
            return Ok(est);
        }
        // Jump straight to the size the power law asks for.
        let ratio = est.tail_bound / (0.2 * tol * est.value.abs());
        let exponent = if weight.power == 0 { 5.0 } else { 4.0 };
        size *= ratio.powf(1.0 / exponent).max(2.0);
    }
    Err(Error::Convergence {
        achieved: f64::INFINITY,
        requested: tol,
    })
}

/// Cubature of G₁₁ over the half-space `z >= z0` (unit density), with the
/// truncation box grown until the tail bound is below `tol / 4`.
pub fn halfspace_cubature_oracle(z0: f64, tol: f64) -> Result<CubatureEstimate> {
    require_gap("z0", z0)?;
    check_tolerance(tol)?;
    grown_cubature(z0, Weight { base: z0, power: 0 }, tol)
}

/// Half-space cubature on a fixed box `s <= radius`, `z <= height`.
pub fn halfspace_cubature_box(z0: f64, radius: f64, height: f64, tol: f64) -> Result<CubatureEstimate> {
    require_gap("z0", z0)?;
    check_tolerance(tol)?;
    if !(radius > z0 && height > z0) {
        return Err(invalid("radius", "truncation box must extend past z0"));
    }
    box_cubature(z0, Weight { base: z0, power: 0 }, radius, height, tol)
}

/// Cubature of the unit-density slab kernel at gap `d`:
/// `∫_{z>d} (z − d) G₁₁ dV`, which folds the integral over the second
/// medium into the weight.
pub fn slab_cubature_oracle(d: f64, tol: f64) -> Result<CubatureEstimate> {
    require_gap("d", d)?;
    check_tolerance(tol)?;
    grown_cubature(d, Weight { base: d, power: 1 }, tol)
}
