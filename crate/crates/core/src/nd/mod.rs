//! Dense and sparse matrix kernels plus the reverse-mode autodiff tape.

mod dense;
mod fdcheck;
mod rng;
mod sparse;
mod tape;

pub use dense::DenseMatrix;
pub use fdcheck::{finite_diff_check, FdReport};
pub use rng::RngState;
pub use sparse::SparseMatrix;
pub use tape::{Tape, Var, LOG_FLOOR};
