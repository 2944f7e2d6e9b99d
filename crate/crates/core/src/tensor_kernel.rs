//! Electrostatic dipole coupling tensor, its gradient and the friction kernel.
//!
//! For a separation `x` with `r = |x|`:
//!
//! ```text
//! ψ_ij   = -(3 x_i x_j / r⁵ - δ_ij / r³)
//! T_lij  = ∂ψ_ij/∂x_l = 15 x_i x_j x_l / r⁷ - 3 (x_i δ_lj + x_j δ_il + x_l δ_ij) / r⁵
//! G_lq   = T_lij T_qij = 18 δ_lq / r⁸ + 36 x_l x_q / r¹⁰
//! ```
//!
//! `friction_kernel` evaluates `G` both ways and refuses to return when the
//! contraction and the closed form disagree.

use crate::error::{invalid, Error, Result};
use crate::parallel::map_slice;

/// Smallest accepted separation (reference length units).
pub const MIN_SEPARATION: f64 = 1e-9;

/// Relative agreement required between closed-form and contracted `G`.
pub const KERNEL_CONSISTENCY: f64 = 1e-12;

pub type Matrix3 = [[f64; 3]; 3];
pub type Tensor3 = [[[f64; 3]; 3]; 3];

#[inline]
fn delta(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        0.0
    }
}

/// Separation between the two particles; never shorter than
/// [`MIN_SEPARATION`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparationVector {
    x: [f64; 3],
    r: f64,
}

impl SeparationVector {
    pub fn new(x: [f64; 3]) -> Result<Self> {
        if x.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain(format!("separation {x:?} is not finite")));
        }
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        if r < MIN_SEPARATION {
            return Err(Error::Domain(format!(
                "separation |r| = {r:e} is below the minimum {MIN_SEPARATION:e}"
            )));
        }
        Ok(Self { x, r })
    }

    pub fn components(&self) -> [f64; 3] {
        self.x
    }

    pub fn norm(&self) -> f64 {
        self.r
    }

    pub fn norm_sq(&self) -> f64 {
        self.r * self.r
    }

    /// Same direction, magnitude `r`.
    pub fn with_norm(&self, r: f64) -> Result<Self> {
        let s = r / self.r;
        Self::new([self.x[0] * s, self.x[1] * s, self.x[2] * s])
    }
}

/// ψ_ij, symmetric and traceless.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingTensor(pub Matrix3);

/// T_lij = ∂ψ_ij/∂x_l, totally symmetric and traceless on (i, j).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingGradient(pub Tensor3);

/// G_lq, symmetric positive semidefinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrictionKernelTensor(pub Matrix3);

impl CouplingTensor {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[i][j]
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }
}

impl CouplingGradient {
    pub fn get(&self, l: usize, i: usize, j: usize) -> f64 {
        self.0[l][i][j]
    }

    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .flatten()
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Largest componentwise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut m = 0.0f64;
        for l in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    m = m.max((self.0[l][i][j] - other.0[l][i][j]).abs());
                }
            }
        }
        m
    }

    /// Full contraction `Σ_ij T_lij T_qij`.
    pub fn contract(&self) -> FrictionKernelTensor {
        let mut g = [[0.0; 3]; 3];
        for l in 0..3 {
            for q in 0..3 {
                let mut s = 0.0;
                for i in 0..3 {
                    for j in 0..3 {
                        s += self.0[l][i][j] * self.0[q][i][j];
                    }
                }
                g[l][q] = s;
            }
        }
        FrictionKernelTensor(g)
    }
}

impl FrictionKernelTensor {
    pub fn get(&self, l: usize, q: usize) -> f64 {
        self.0[l][q]
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// `G v`.
    pub fn apply(&self, v: [f64; 3]) -> [f64; 3] {
        let g = &self.0;
        [
            g[0][0] * v[0] + g[0][1] * v[1] + g[0][2] * v[2],
            g[1][0] * v[0] + g[1][1] * v[1] + g[1][2] * v[2],
            g[2][0] * v[0] + g[2][1] * v[1] + g[2][2] * v[2],
        ]
    }

    /// `aᵀ G b`.
    pub fn bilinear(&self, a: [f64; 3], b: [f64; 3]) -> f64 {
        let gb = self.apply(b);
        a[0] * gb[0] + a[1] * gb[1] + a[2] * gb[2]
    }
}

/// ψ_ij for the electrostatic dipole-dipole interaction.
pub fn dipole_coupling(r: &SeparationVector) -> CouplingTensor {
    let x = r.x;
    let r2 = r.norm_sq();
    let inv_r3 = 1.0 / (r2 * r.r);
    let inv_r5 = inv_r3 / r2;
    let mut psi = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in i..3 {
            psi[i][j] = -(3.0 * x[i] * x[j] * inv_r5 - delta(i, j) * inv_r3);
            psi[j][i] = psi[i][j];
        }
    }
    CouplingTensor(psi)
}

/// Closed-form gradient T_lij.
pub fn coupling_gradient(r: &SeparationVector) -> CouplingGradient {
    let x = r.x;
    let r2 = r.norm_sq();
    let inv_r5 = 1.0 / (r2 * r2 * r.r);
    let inv_r7 = inv_r5 / r2;
    let mut t = [[[0.0; 3]; 3]; 3];
    for l in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                t[l][i][j] = 15.0 * x[i] * x[j] * x[l] * inv_r7
                    - 3.0 * (x[i] * delta(l, j) + x[j] * delta(i, l) + x[l] * delta(i, j)) * inv_r5;
            }
        }
    }
    CouplingGradient(t)
}

/// Central-difference gradient of [`dipole_coupling`] with step `h`;
/// requires `0 < h < r/10`.
pub fn finite_difference_gradient(r: &SeparationVector, h: f64) -> Result<CouplingGradient> {
    if !(h.is_finite() && h > 0.0 && h < r.norm() / 10.0) {
        return Err(invalid(
            "h",
            format!("step must satisfy 0 < h < r/10 = {}, got {h}", r.norm() / 10.0),
        ));
    }
    let mut t = [[[0.0; 3]; 3]; 3];
    for (l, tl) in t.iter_mut().enumerate() {
        let mut plus = r.x;
        let mut minus = r.x;
        plus[l] += h;
        minus[l] -= h;
        let p = dipole_coupling(&SeparationVector::new(plus)?);
        let m = dipole_coupling(&SeparationVector::new(minus)?);
        // Actual step after rounding of x ± h.
        let span = plus[l] - minus[l];
        for i in 0..3 {
            for j in 0..3 {
                tl[i][j] = (p.0[i][j] - m.0[i][j]) / span;
            }
        }
    }
    Ok(CouplingGradient(t))
}

pub(crate) fn friction_kernel_closed_form(r: &SeparationVector) -> FrictionKernelTensor {
    let x = r.x;
    let r2 = r.norm_sq();
    let r4 = r2 * r2;
    let inv_r8 = 1.0 / (r4 * r4);
    let inv_r10 = inv_r8 / r2;
    let mut g = [[0.0; 3]; 3];
    for l in 0..3 {
        for q in l..3 {
            g[l][q] = 18.0 * delta(l, q) * inv_r8 + 36.0 * x[l] * x[q] * inv_r10;
            g[q][l] = g[l][q];
        }
    }
    FrictionKernelTensor(g)
}

/// G_lq, checked against the contraction of [`coupling_gradient`].
pub fn friction_kernel(r: &SeparationVector) -> Result<FrictionKernelTensor> {
    let closed = friction_kernel_closed_form(r);
    let contracted = coupling_gradient(r).contract();
    let scale = closed.max_abs();
    let mut worst = 0.0f64;
    for l in 0..3 {
        for q in 0..3 {
            worst = worst.max((closed.0[l][q] - contracted.0[l][q]).abs());
        }
    }
    let discrepancy = worst / scale;
    if !(discrepancy <= KERNEL_CONSISTENCY) {
        return Err(Error::InternalConsistency {
            check: "friction kernel closed form vs contraction",
            discrepancy,
        });
    }
    if !scale.is_finite() {
        return Err(Error::Overflow("friction kernel"));
    }
    Ok(closed)
}

/// [`friction_kernel`] over a batch of separations, in input order.
pub fn friction_kernel_batch(rs: &[SeparationVector]) -> Vec<Result<FrictionKernelTensor>> {
    map_slice(rs, friction_kernel)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sep(x: [f64; 3]) -> SeparationVector {
        SeparationVector::new(x).unwrap()
    }

    #[test]
    fn rejects_zero_and_tiny_separation() {
        assert!(matches!(SeparationVector::new([0.0; 3]), Err(Error::Domain(_))));
        assert!(SeparationVector::new([1e-10, 0.0, 0.0]).is_err());
        assert!(SeparationVector::new([f64::NAN, 0.0, 1.0]).is_err());
        assert!(SeparationVector::new([1e-9, 0.0, 0.0]).is_ok());
    }

    #[test]
    fn coupling_on_z_axis() {
        let psi = dipole_coupling(&sep([0.0, 0.0, 1.0]));
        assert_eq!(psi.get(0, 1), 0.0);
        assert_eq!(psi.get(2, 2), -2.0);
        assert_eq!(psi.get(0, 0), 1.0);
        assert_eq!(psi.get(1, 1), 1.0);
        assert_eq!(psi.trace(), 0.0);
    }

    #[test]
    fn gradient_on_z_axis() {
        let t = coupling_gradient(&sep([0.0, 0.0, 1.0]));
        assert_eq!(t.get(2, 2, 2), 6.0);
        assert_eq!(t.get(2, 0, 0), -3.0);
        assert_eq!(t.get(0, 0, 2), -3.0);
        assert_eq!(t.get(0, 1, 2), 0.0);
    }

    #[test]
    fn gradient_homogeneity() {
        let r = sep([0.3, -1.2, 0.7]);
        let c = 2.5;
        let t1 = coupling_gradient(&r);
        let t2 = coupling_gradient(&sep([0.3 * c, -1.2 * c, 0.7 * c]));
        for l in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    let expect = t1.get(l, i, j) * c.powi(-4);
                    assert!((t2.get(l, i, j) - expect).abs() <= 1e-14 * t1.max_abs());
                }
            }
        }
    }

    #[test]
    fn finite_difference_on_axis() {
        let r = sep([0.0, 0.0, 1.0]);
        let fd = finite_difference_gradient(&r, 1e-4).unwrap();
        let exact = coupling_gradient(&r);
        assert!(fd.max_abs_diff(&exact) <= 1e-6 * exact.max_abs());
        // symmetric within truncation error
        for l in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    assert!((fd.get(l, i, j) - fd.get(i, l, j)).abs() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn finite_difference_second_order() {
        let r = sep([1.0, 1.0, 1.0]);
        let exact = coupling_gradient(&r);
        let h = 1e-2;
        let e1 = finite_difference_gradient(&r, h).unwrap().max_abs_diff(&exact);
        let e2 = finite_difference_gradient(&r, h / 2.0).unwrap().max_abs_diff(&exact);
        let ratio = e1 / e2;
        assert!((ratio - 4.0).abs() < 0.1, "ratio {ratio}");
    }

    #[test]
    fn finite_difference_step_range() {
        let r = sep([0.0, 0.0, 1.0]);
        assert!(finite_difference_gradient(&r, 0.0).is_err());
        assert!(finite_difference_gradient(&r, 0.1).is_err());
        assert!(finite_difference_gradient(&r, -1e-3).is_err());
    }

    #[test]
    fn kernel_values() {
        let g = friction_kernel(&sep([0.0, 0.0, 1.0])).unwrap();
        assert_eq!(g.get(0, 0), 18.0);
        assert_eq!(g.get(2, 2), 54.0);
        assert_eq!(g.get(0, 1), 0.0);
        let g = friction_kernel(&sep([0.0, 0.0, 2.0])).unwrap();
        assert_eq!(g.get(0, 0), 0.0703125);
    }

    #[test]
    fn kernel_batch_order() {
        let rs: Vec<_> = (1..=10).map(|k| sep([0.0, 0.0, k as f64])).collect();
        let gs = friction_kernel_batch(&rs);
        for (k, g) in gs.into_iter().enumerate() {
            let expect = 18.0 / ((k + 1) as f64).powi(8);
            assert!((g.unwrap().get(0, 0) - expect).abs() <= 1e-15 * expect);
        }
    }
}
