//! Dense linear algebra, least squares, and regression metrics.

mod lstsq;
mod matrix;
mod metrics;

pub use lstsq::{solve_least_squares, LeastSquaresSolution, SolveMethod, RANK_TOLERANCE};
pub use matrix::DenseMatrix;
pub use metrics::{
    mean_absolute_error, pearson_correlation_matrix, r_squared, CorrelationMatrix, EvalReport,
    MetricPair,
};
pub(crate) use metrics::mean;
