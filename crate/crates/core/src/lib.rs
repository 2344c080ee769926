//! Quantum potential energy as the kinetic energy of a concealed flow.
//!
//! * [`routh`]: Routh reduction of discrete kinetic systems.
//! * [`qlag`]: Lagrangian-picture quantum fluid and its concealed companion.
//! * [`eref`]: Crank–Nicolson Schrödinger reference and Eulerian fields.
//! * [`energy`]: energy totals in each picture.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the aliases below
//! fix `f64`.

// `!(x > 0)` is deliberate: NaN must fail the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod coupled;
pub mod energy;
pub mod eref;
pub mod error;
pub mod integrate;
pub mod linalg;
pub mod profile;
pub mod qlag;
pub mod routh;
pub mod scalar;
pub mod stencil;

pub use error::{Error, Result};
pub use scalar::Real;

pub type DiscreteState = routh::DiscreteState<f64>;
pub type ReducedSystem<S> = routh::ReducedSystem<S, f64>;
pub type PhysicalParams = qlag::PhysicalParams<f64>;
pub type GridSpec = qlag::GridSpec<f64>;
pub type LabelGrid = qlag::LabelGrid<f64>;
pub type TrajectoryField = qlag::TrajectoryField<f64>;
pub type ConcealedField = qlag::ConcealedField<f64>;
pub type QuantumFluid = qlag::QuantumFluid<f64>;
pub type Scenario = qlag::Scenario<f64>;
pub type InitialProfile = profile::InitialProfile<f64>;
pub type ExternalPotential = profile::ExternalPotential<f64>;
pub type EulerianFields = eref::EulerianFields<f64>;
pub type ConcealedEulerian = eref::ConcealedEulerian<f64>;
pub type CrankNicolson = eref::CrankNicolson<f64>;
pub type EnergyReport = energy::EnergyReport<f64>;
