//! Circuit building blocks: state loading, Fourier transforms, density
//! exponentials, phase estimation, eigenvalue rotations and swap tests.

mod encoding;
mod exponential;
mod fourier;
mod phase;
mod swap;

pub use encoding::{
    amplitude_encode, encode_matrix, encode_values, encoding_probability, prepare_flagged,
    EncodingResult, FLAG,
};
pub use exponential::{
    density_exponential, lmr_slice, polar_unitary, DensityExponential, PhaseEstimationConfig,
    MAX_PRECISION_BITS,
};
pub use fourier::{apply_qft, qft, MAX_QFT_WIDTH};
pub use phase::{
    decode_clock, eigen_rotation, encode_clock, inverse_phase_estimation, is_dyadic,
    phase_estimation, ClockRelease, EigenRotationSpec, RotationMode,
};
pub use swap::{plain_swap_test, signed_standard_error, signed_swap_test, SwapTestEstimate};
