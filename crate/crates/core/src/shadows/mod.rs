//! Randomized-measurement shadows: ensembles, single-shot estimators and
//! batched accumulation.

pub mod channel;
pub mod keys;
pub mod log;
pub mod matchgate;
pub mod pauli;
pub mod perm;
pub mod table;

pub use channel::{
    channel_eigenvalues_exact, noise_fidelity_exact, noisy_eigenvalues_dense, ChannelSpectrum,
    Ensemble, IrrepEigenvalue,
};
pub use keys::{MajoranaColumns, MajoranaKeys, PauliColumns, PauliKeys};
pub use matchgate::{
    matchgate_estimate_into, matchgate_estimate_reference, matchgate_f, measure_matchgate,
    DegreeWeights,
};
pub use pauli::{pauli_estimate_into, pauli_estimate_reference, pauli_f};
pub use perm::{sample_b2n, sample_spin_adapted, SignedPermutation};
pub use table::{BatchPlan, EstimateTable};
