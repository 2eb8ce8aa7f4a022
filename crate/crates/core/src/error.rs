use thiserror::Error;

/// Errors raised by the basinforge library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),
    #[error("invalid root catalog: {0}")]
    InvalidRoots(String),
    #[error("derivative order {0} is not supported (maximum is 3)")]
    DerivativeOrder(usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown method `{0}`")]
    UnknownMethod(String),
    #[error("invalid scan configuration: {0}")]
    InvalidConfig(String),
    #[error("not enough iterates to estimate the order of convergence")]
    NotEnoughIterates,
    #[error("no converged nodes in histogram")]
    NoConvergedNodes,
    #[error("histogram tail is empty")]
    EmptyTail,
    #[error("grid of {n_re}x{n_im} nodes cannot be tiled by {box_nodes}-node boxes")]
    IndivisibleGrid { n_re: usize, n_im: usize, box_nodes: usize },
    #[error("palette has {colors} root colors but the grid has {roots} roots")]
    PaletteTooSmall { colors: usize, roots: usize },
    #[error("malformed basin grid data: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
