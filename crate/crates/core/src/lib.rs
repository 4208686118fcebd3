//! Max-plus linear system theory for timed event graphs: periodic series in
//! `γ`, residuation, Kleene star, and synthesis of the greatest observer
//! matrix whose estimate never exceeds the true state.

pub mod cli;
pub mod error;
pub mod matrix;
pub mod observer;
pub mod scalar;
pub mod series;
pub mod simulate;
pub mod teg;

pub use error::{MatrixError, ObserverError, ParseError, SeriesError, SimError};
pub use matrix::{BlockStructure, SeriesMatrix};
pub use observer::{ObserverChecks, ObserverResult, ObserverTransfer};
pub use scalar::Scalar;
pub use series::{DaterFit, DaterSlice, Monomial, PeriodicSeries, Polynomial, RawSeries, Slope};
pub use simulate::{EstimationReport, Trajectory};
pub use teg::{parse_teg, Place, StructureReport, SystemMatrices, TegModel, Transfer};
