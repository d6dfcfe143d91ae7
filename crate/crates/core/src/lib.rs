//! Numerical toolkit for ensemble NV⁻-diamond magnetometer design.
//!
//! The crate models the full chain from diamond material parameters to
//! magnetic-field sensitivity:
//!
//! * [`constants`] — physical constants of the NV⁻ ground state and unit
//!   conversions shared by every module.
//! * [`sample`] — the diamond material descriptor and measurement protocol
//!   parameters, with file loading and validation.
//! * [`hamiltonian`] — ground-state spin Hamiltonian construction, exact and
//!   perturbative transition frequencies, pseudo-spin-½ reduction, and the
//!   linear Stark/Zeeman mixing analysis.
//! * [`dynamics`] — Ramsey/Hahn pulse-sequence propagation on the
//!   pseudo-spin-½ system, free-induction-decay synthesis, and a Monte Carlo
//!   photon-readout simulator with a deterministic counter-based RNG.
//! * [`noise`] — closed-form readout-noise metrics (σ_R and friends).
//! * [`sensitivity`] — per-protocol sensitivity formulas with their
//!   multiplicative factor breakdown.
//! * [`budget`] — itemized T₂*/T₂ dephasing budgets from material
//!   parameters, double-quantum and spin-bath-drive rules, and
//!   linewidth ↔ T₂* conversions.
//! * [`optimizer`] — optimal precession time, sensitivity-enhancement
//!   curves, nitrogen-concentration sweeps, initialization laser power.
//! * [`materials`] — vacancy-diffusion annealing and electron-irradiation
//!   dose estimates.
//! * [`report`] — CSV records for budgets and sensitivity reports.
//!
//! All quantities are SI (seconds, tesla, hertz) except defect
//! concentrations, which are in ppm of carbon lattice sites; see
//! [`constants::PPM_TO_PER_CM3`].

// Validation deliberately uses negated comparisons (`!(v > 0.0)`) so that
// NaN inputs fail closed.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod budget;
pub mod constants;
pub mod dynamics;
pub mod hamiltonian;
pub mod linalg;
pub mod materials;
pub mod noise;
pub mod optimizer;
pub mod report;
pub mod rng;
pub mod sample;
pub mod sensitivity;

pub use constants::{constants, PhysicalConstants};
pub use sample::{DiamondSample, ProtocolParams};
