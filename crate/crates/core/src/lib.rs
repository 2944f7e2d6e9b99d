//! Casimir friction between polarizable particles and dilute dielectric media
//! at finite temperature.
//!
//! Units are reduced throughout: ħ = k_B = 1, so energies, frequencies and
//! inverse times coincide and β is an inverse energy. Lengths are in an
//! arbitrary reference unit.
//!
//! Layout:
//! - [`tensor_kernel`]: dipole coupling ψ, its gradient T and the friction
//!   kernel G.
//! - [`response`]: oscillator correlation functions, Matsubara convolution,
//!   closed-form `H f(K)` and the retarded response.
//! - [`spectral`]: general spectral polarizabilities and the overlap
//!   strength H₀.
//! - [`geometry`]: half-space and slab reductions of G.
//! - [`friction`]: forces for the three geometries and the dissipated energy.
//! - [`oracles`]: independent numerical cross-checks.

pub mod error;
pub mod friction;
pub mod geometry;
pub mod oracles;
pub mod parallel;
pub mod quadrature;
pub mod response;
pub mod special;
pub mod spectral;
pub mod tensor_kernel;

pub use error::{Error, Result};
pub use friction::{
    dissipated_energy, evaluate, pair_friction, particle_plane_friction, slab_friction,
    DissipationReport, ForceValue, FrictionMode, FrictionReport, GeometrySpec, SpectralFactor,
    Trajectory,
};
pub use geometry::{
    halfspace_cubature_oracle, halfspace_kernel, lateral_integral, slab_kernel, HalfSpaceSpec,
    SlabPairSpec,
};
pub use quadrature::Tolerance;
pub use response::{
    closed_form_correlation, friction_strength_sharp, h_prefactor, matsubara_convolution,
    oscillator_correlation, response_time_domain, reversible_coefficient, MatsubaraSum,
    OscillatorModel, PairSpectrum, SpectralArgument, ThermalState,
};
pub use spectral::{
    overlap_strength, polarizability_from_spectrum, spectral_density, verify_measure_identity,
    OverlapStrength, SpectralLine, SpectralPolarizability, SpectrumKind,
};
pub use tensor_kernel::{
    coupling_gradient, dipole_coupling, finite_difference_gradient, friction_kernel,
    CouplingGradient, CouplingTensor, FrictionKernelTensor, SeparationVector,
};
