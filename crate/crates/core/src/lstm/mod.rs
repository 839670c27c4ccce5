//! Single-layer univariate LSTM with a scalar dense head, trained by
//! full-batch Adam on exact BPTT gradients.

pub mod adam;
pub mod cell;
pub mod gradcheck;
pub mod persist;
pub mod train;
pub mod weights;

pub use adam::{adam_step, clip_global_norm, AdamState};
pub use cell::{
    backward, batch_mse, cell_forward, predict, sequence_forward, LstmState, SequenceTrace,
};
pub use train::{train, LossHistory, LstmModel, TrainingConfig};
pub use weights::{Gate, LstmWeights};
