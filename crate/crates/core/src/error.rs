use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid theta context: {0}")]
    InvalidContext(String),

    #[error("theta series does not converge: {0}")]
    NonconvergentSeries(String),

    #[error("derivative order {order} exceeds the cap of {max}")]
    OrderTooHigh { order: usize, max: usize },

    #[error("every psi probe hits a zero of theta_0 theta_1 theta_2")]
    DegenerateProbe,

    #[error("psi differs across probes by {spread:e} (tolerance {tol:e})")]
    InconsistentPsi { spread: f64, tol: f64 },

    #[error("theta_i(z + a) vanishes for every index i")]
    AllIndicesDegenerate,

    #[error("automorphy factor disagrees across indices by {spread:e}")]
    InconsistentFactor { spread: f64 },

    #[error("all projective coordinates are zero")]
    AllZero,

    #[error("singular Hesse curve: psi^3 = -1")]
    SingularCurve,

    #[error("point in E[3]: zero coordinate in denominator{}", iteration_suffix(*.iteration))]
    DenominatorZero { iteration: Option<usize> },

    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },

    #[error("reference polynomial is zero")]
    ZeroReference,

    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    #[error("scalar calibration failed at offset {offset}: residual {residual:e}")]
    CalibrationFailed { offset: usize, residual: f64 },

    #[error("least-squares system is rank deficient")]
    IllConditioned,

    #[error("point is off the curve (residual {residual:e})")]
    OffCurve { residual: f64 },

    #[error("operation needs an analytic point a_z")]
    NotAnalytic,
}

fn iteration_suffix(iteration: Option<usize>) -> String {
    match iteration {
        Some(i) => format!(" (iteration {i})"),
        None => String::new(),
    }
}

pub type Result<T> = std::result::Result<T, Error>;
