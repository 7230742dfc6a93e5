//! States, observables, channels and the structural constructions built on
//! them: purification, Naimark dilation, commutants, twirls and conditional
//! expectations.

mod channel;
mod commutant;
pub mod io;
mod naimark;
mod observable;
pub mod random;
mod state;

pub use channel::{clock_group, dephasing_channel, pauli_group, twirl, KrausChannel, TOL_CHANNEL, TOL_GROUP};
pub use commutant::{
    commutant_basis, conditional_expectation, double_commutant_check, DoubleCommutantReport, OperatorSet,
    TOL_NULL,
};
pub use naimark::{naimark_canonical, naimark_extend, DilationKind, NaimarkDilation};
pub use observable::{measure_probabilities, post_measurement, Observable, ObservableKind, TOL_POVM};
pub use state::{purification_vector, purify, DensityOperator, TOL_TRACE};
