//! Basins of attraction of iterative root finders on the complex plane.
//!
//! The crate scans a window of the plane, iterates one of sixteen
//! root-finding methods from every grid node, and classifies where each
//! node ends up. On top of the classified grid it computes iteration
//! histograms with Laplace tail fits, basin entropy and boundary basin
//! entropy, and renders basin and iteration-count images.
//!
//! ```
//! use basinforge::{classify_node, Method, Polynomial, RootCatalog, ScanConfig};
//! use num_complex::Complex64;
//!
//! let p = Polynomial::unity(3).unwrap();
//! let roots = RootCatalog::unity_roots(3).unwrap();
//! let out = classify_node(Complex64::new(2.0, 0.0), &Method::Newton.into(), &p, &roots, &ScanConfig::default());
//! assert_eq!(out.root(), Some(0));
//! ```

pub mod classifier;
pub mod entropy;
pub mod error;
pub mod polynomial;
pub mod render;
pub mod schemes;
pub mod stats;
pub mod study;

pub use classifier::{
    classify_node, scan_grid, BasinGrid, NodeOutcome, OutcomeCounts, OutcomeKind, ScanConfig, Window,
};
pub use entropy::{basin_entropy, cell_entropy, EntropyConfig, EntropyReport};
pub use error::{Error, Result};
pub use polynomial::{Polynomial, RootCatalog};
pub use schemes::{computational_order, error_ratio_constant, error_sequence, Method, Scheme, StepResult, StepStatus};
pub use stats::{
    convergence_cdf, differential_entropy, fit_laplace_tail, histogram, most_probable_n, IterationHistogram, LaplaceFit,
};
