use alloc::string::String;
use alloc::vec::Vec;

/// Everything that can go wrong at the library level.
///
/// Variants are shared across modules; each operation documents which ones
/// it can return.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("weights sum to {sum} instead of 1 (tolerance {tol})")]
    NonNormalized { sum: f64, tol: f64 },
    #[error("negative weight {weight} at index {index}")]
    NegativeWeight { index: usize, weight: f64 },
    #[error("measure has empty support")]
    EmptySupport,
    #[error("axis {axis} out of range for arity {arity}")]
    AxisOutOfRange { axis: usize, arity: usize },
    #[error("operation requires all axes to share one support; sizes {sizes:?}")]
    HeterogeneousSupports { sizes: Vec<usize> },
    #[error("map sends index {index} to {target} outside support of size {size}")]
    MapOutOfRange {
        index: usize,
        target: usize,
        size: usize,
    },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("vector fields must share the axis-0 base measure")]
    BaseMismatch,
    #[error("operation requires uniform weights")]
    NonUniformWeights,
    #[error("plan marginal on axis {axis} does not match the prescribed measure (max deviation {deviation})")]
    MarginalMismatch { axis: usize, deviation: f64 },
    #[error("marginals are not consistent: {0}")]
    InfeasibleMarginals(String),
    #[error("dense size {size} exceeds cap {cap}")]
    SizeCapExceeded { size: usize, cap: usize },
    #[error("matrix is not square: {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },
    #[error("dual extraction requires an exact solve (gap {gap})")]
    NotExactSolve { gap: f64 },
    #[error("cost tensor is not the quadratic cost of the given supports (deviation {deviation})")]
    NotQuadraticCost { deviation: f64 },
    #[error("exhaustive enumeration capped at n <= {cap}, got n = {n}")]
    CapExceeded { n: usize, cap: usize },
    #[error("index {index} out of range for size {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("field values are not pairwise distinct (indices {i} and {j})")]
    DegenerateField { i: usize, j: usize },
    #[error("graph sample is empty")]
    EmptySample,
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("grid is not square: axes must split into two identical halves")]
    NonSquareGrid,
    #[error("entries must be finite, found {value} at flat index {index}")]
    NonFiniteEntry { index: usize, value: f64 },
    #[error("permutation of length {len} is not an m-involution for m = {m}")]
    NotAnInvolution { len: usize, m: usize },
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("sinkhorn epsilon must be positive, got {0}")]
    NonPositiveEpsilon(f64),
}
