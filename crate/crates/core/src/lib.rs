//! Clifford-orbit POVMs: Pauli algebra, Clifford sampling, stabilizer orbits,
//! moment formulas, distinguishability bounds and entropic uncertainty LPs.

pub mod clifford;
pub mod distinguish;
pub mod entropic;
pub mod error;
pub mod fiducial;
pub mod lp;
pub mod moments;
pub mod operator;
pub mod pauli;
pub mod random;
pub mod stabilizer;
pub mod symplectic;

pub use error::{Error, Result};
