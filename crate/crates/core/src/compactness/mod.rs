//! Compactness machinery on `A^N`: ε-nets and net distances, the state and
//! unitary selection for `M_n(C)`, separation of points from the unit ball,
//! the commutative counterexample, the witness sequence for operators that
//! are not norm limits of finite-rank ones, and empirical net-size probes.

mod choose_state;
mod counterexample;
mod net;
mod probe;
mod separation;
mod witness;

pub use choose_state::{choose_state_unitaries, ChosenState};
pub use counterexample::{counterexample_experiment, CounterexampleReport};
pub use net::{greedy_net, net_distance, FeatureCloud, NetResult};
pub use probe::{compactness_probe, probe_points, probe_samples, ProbeRow};
pub use separation::{separate_from_ball, SeparationReport, SEPARATION_FRACTION};
pub use witness::{witness_construction, WitnessReport, WitnessStep};
