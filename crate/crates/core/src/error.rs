use thiserror::Error;

/// Errors produced by the derivative and solver routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("tabulated function has {got} values but the grid has {expected} nodes")]
    GridMismatch { expected: usize, got: usize },

    #[error("gamma argument {0} is outside (0, 12]")]
    GammaDomain(f64),

    #[error("degenerate scale: zeta({0}) == zeta({1}) on the time grid")]
    DegenerateScale(usize, usize),

    #[error("empty sample series: at least one time step is required")]
    EmptySeries,

    #[error("analytic reference is only defined for zeta(t)=t, omega(t)=1")]
    UnsupportedOracle,

    #[error("spatial grid needs M >= 3 subintervals, got {0}")]
    DegenerateGrid(usize),

    #[error("tridiagonal system is not strictly diagonally dominant at row {0}")]
    NotDiagonallyDominant(usize),

    #[error("weight function vanishes at t_{0}; cannot recover the original variable")]
    DivisionDegeneracy(usize),

    #[error("invalid problem configuration: {0}")]
    Config(String),

    #[error("refinement study needs strictly positive errors to define a rate")]
    UndefinedRate,

    #[error("unknown builtin problem '{0}'")]
    UnknownProblem(String),
}

pub type Result<T> = std::result::Result<T, Error>;
