//! Step graphon-signals: cut norms, alignment, regularity, sampling,
//! message passing networks and the generalization bound calculator.

pub mod alignment;
pub mod bounds;
pub mod error;
pub mod io;
pub mod matrix;
pub mod mpnn;
pub mod norms;
pub mod random;
pub mod regularity;
pub mod rng;
pub mod sampling;
pub mod signal;
pub mod tolerance;

pub use error::{Error, Result, Violation};
pub use matrix::Matrix;
pub use signal::{GraphSignal, KernelClass, Partition, StepKernelSignal, Validate, WeightRange};
pub use tolerance::Tolerances;
