//! Training data synthesis and the two trainers: hill climbing over a
//! three-weight unit and per-sample gradient descent with backpropagation.

pub mod backprop;
pub mod data;
pub mod hill;
pub mod preset;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use backprop::{backprop_gradient, backprop_train, sq_loss, BackpropConfig, BackpropOutcome};
pub use data::{
    gen_lsb_dataset, gen_mc_dataset, gen_task_dataset, Convention, Dataset, TrainSample,
};
pub use hill::{hill_climb_train, HillClimbConfig, HillClimbOutcome};
pub use preset::{run_preset, ExperimentReport, Preset};

/// Independent random streams derived from one user seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Dataset = 0,
    Init = 1,
    HillSamples = 2,
    Sampling = 3,
}

pub fn seeded_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}
