//! Dense statevector simulation over named qubit registers.

mod cmatrix;
mod density;
mod layout;
mod state;

pub use cmatrix::{hadamard, pauli_x, ry_amplitude, CMatrix};
pub use density::{DensityMatrix, DENSITY_TOL, PSD_TOL};
pub use layout::{width_for, QubitRegisterLayout, Register, DEFAULT_QUBIT_BUDGET};
pub use state::{
    bitstring, Histogram, PostSelection, SimRng, StateVector, NULL_BRANCH, UNITARITY_TOL,
};
