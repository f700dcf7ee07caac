//! Real irreducible representations of the rotational polyhedral groups and
//! the symmetry-adapted spherical-harmonic bases they generate.
//!
//! The crate works with the three finite rotation groups of the Platonic
//! solids: tetrahedral T (order 12), octahedral O (24) and icosahedral I
//! (60). For each group it
//!
//! 1. expands the group from bundled generator matrices ([`group`]),
//! 2. loads complex unitary irrep matrices from bundled data and classifies
//!    them by the Frobenius-Schur indicator ([`irreps`]),
//! 3. converts every potentially-real irrep into a real orthogonal irrep by
//!    a computed unitary similarity ([`realify`]),
//! 4. applies generalized projection operators to real spherical harmonics
//!    to build, for every degree l, real orthonormal basis functions that
//!    transform as the rows of the real irreps ([`basis`], [`harmonics`]),
//! 5. verifies the whole construction numerically and exports coefficient
//!    tables, CSV evaluations and OBJ surfaces ([`protocol`], [`io`]).
//!
//! For the octahedral and icosahedral groups every irrep is potentially real
//! and the resulting functions form a complete real orthonormal basis of
//! each (2l+1)-dimensional harmonic space. For the tetrahedral group the two
//! complex-conjugate one-dimensional irreps admit no real form, so the real
//! basis spans a proper subspace of known dimension; the crate computes the
//! deficit from character theory and checks it.
//!
//! Start with [`SymmetrySystem::load`], then [`basis::assemble_basis`]. The
//! `examples/` directory walks through each capability end to end.

pub mod basis;
pub mod group;
pub mod harmonics;
pub mod io;
pub mod irreps;
pub mod mat;
pub mod protocol;
pub mod realify;
pub mod rng;
pub mod system;

pub use basis::{assemble_basis, BasisSetL, CoefficientBlock, Flavor};
pub use group::{FiniteRotationGroup, GroupName, RotationMatrix};
pub use harmonics::SphericalAngles;
pub use irreps::{Irrep, Realness};
pub use realify::RealificationResult;
pub use system::SymmetrySystem;
