//! Gaussian mixture reduction under the KLD, ISE and NISE dissimilarities.

pub mod descent;
pub mod dissim;
pub mod error;
pub mod gaussian;
pub mod io;
pub mod merge;
pub mod mixture;
mod param;
pub mod quadrature;
pub mod reduce;
pub mod refine;

pub use descent::DescentConfig;
pub use dissim::{dissimilarity, ise, nise, CachedOriginal, Measure, QuadratureConfig};
pub use error::{GmrError, Result};
pub use gaussian::Gaussian;
pub use merge::{bsga, kld_barycenter, runnalls_bound, BsgaOptions, BsgaResult};
pub use mixture::{GaussianMixture, SubMixture};
pub use refine::{refine, RefineResult};
pub use reduce::{runnalls_reduce, williams_reduce, Action, MergeMethod, ReductionTrace};
