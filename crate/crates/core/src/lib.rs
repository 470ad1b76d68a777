//! Simulator for the ping-pong QKD protocol under the optimal individual
//! attack, with trusted amplitude-damping noise inserted by Bob.
//!
//! The crate builds the full quantum round on the labelled
//! `h ⊗ t ⊗ x ⊗ y` space (home qubit, travel mode, Eve's two ancilla
//! modes), derives the Alice-Eve-Bob joint statistics, and turns them into
//! mutual informations, Holevo bounds and secure key rates. A damped
//! Jaynes-Cummings schedule `lambda(t)` drives Markovian and non-Markovian
//! parameter sweeps, and a grid-plus-LP search certifies that the noisy
//! statistics cannot be faked by local classical post-processing of the
//! noiseless ones.
//!
//! ```
//! use pingpong_qkd::{key_rates, ProtocolScenario};
//!
//! let report = key_rates(&ProtocolScenario::Case1TravelOnly { lambda: 0.5 }).unwrap();
//! assert!(report.k_max > 0.04);
//! ```

pub mod channel;
pub mod classical;
pub mod eigen;
pub mod error;
pub mod info;
pub mod layout;
pub mod protocol;
mod simplex;
pub mod state;

pub use channel::{
    ad_kraus_mode, ad_kraus_qubit, apply_channel, gad_kraus, jc_damping, nonmarkov_witness,
    unitality_deviation, DampingParams, GadParams, KrausChannel, NonMarkovWitness,
};
pub use classical::{
    algebraic_witness, feasibility_search, local_postprocess, lp_residual_b_given_a,
    FeasibilityReport, StochasticMap, WitnessCertificate,
};
pub use eigen::{hermitian_eigenvalues, trace_distance, von_neumann_entropy};
pub use error::{Error, Result};
pub use info::{
    closed_form_iab_case2, closed_form_iae, holevo_bound, iab_case1_as_printed, key_rates,
    marginalize, mutual_information, KeyRateReport, MarginalPair,
};
pub use layout::SystemLayout;
pub use protocol::{
    alice_encode, bob_add_noise, bob_ensemble, closed_form_joint, eve_ensemble, initial_state,
    measure_joint, run_round, wojcik_onward, wojcik_return, AttackMap, Encoding, JointDistribution,
    ProtocolScenario,
};
pub use state::{ComplexOperator, Ket};
