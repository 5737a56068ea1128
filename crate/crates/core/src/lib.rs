pub mod channel;
pub mod cli;
pub mod error;
pub mod exponent;
pub mod finite_n;
pub mod operator;
pub mod optimize;
pub mod random;
pub mod state;

pub use error::{Error, Result};
pub use operator::{EigenDecomposition, HermitianOperator, Matrix};
pub use state::{DensityMatrix, HypothesisPair};
