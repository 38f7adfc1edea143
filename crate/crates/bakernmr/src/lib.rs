//! Quantum baker's map on a three-spin NMR register.
//!
//! The crate covers the gate algebra of the map, a pulse-level machine model
//! of trichloroethylene (one proton, two carbons), a dephasing master-equation
//! integrator and the two chaos diagnostics: entropy growth under noise and
//! hypersensitivity to perturbation.

pub mod baker;
pub mod chaos;
pub mod error;
pub mod lindblad;
pub mod nmr;
pub mod qstate;

pub use error::{Error, Result};
