//! Activity classifier over stacks of Doppler vectors.
//!
//! Each input is pooled per Doppler bin into the mean and standard
//! deviation of `log(1 + power)` over its rows; the pooled features are
//! standardized with training-set statistics and mapped to four class
//! logits by an affine layer trained with full-batch gradient descent on
//! the cross-entropy.

mod input;
mod model;
mod persist;

pub use input::{featurize, ClassifierInput};
pub use model::{
    gradient_check, predict, softmax, train, train_features, FeatureSet, GradientCheck,
    Hyperparameters, InputShape, Model, Prediction, TrainOutcome, ARCHITECTURE,
};
pub use persist::{load_model, model_from_str, model_to_string, save_model};
