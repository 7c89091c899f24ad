//! Exact invariants of maximal Cohen-Macaulay modules over hypersurface
//! rings, computed from a square polynomial presentation matrix over `F_p`.
//!
//! Given `φ` with positive entry orders and nonzero determinant, the crate
//! computes for `M = coker φ`: Hilbert values and the h-polynomial, Hilbert
//! coefficients, superficial towers, b-polynomials and Singh's equality, the
//! Ratliff-Rush filtration with `r_M(z)` and the corrected numerator, the
//! reduction number, the splitting type of the Artinian reduction, and the
//! depth of the associated graded module `G(M)` - then classifies the result
//! against the known (depth, h-polynomial) tables.

pub mod analysis;
pub mod depth;
pub mod error;
pub mod field;
pub mod filtration;
pub mod invariants;
pub mod jets;
pub mod linalg;
pub mod poly;
pub mod report;
pub mod superficial;
pub mod trunc;
pub mod verdicts;

pub use analysis::{analyze, AnalyzeOptions};
pub use error::{Error, Result};
pub use field::{Field, FieldScalar, DEFAULT_PRIME};
pub use invariants::{HPolynomial, SplittingType};
pub use poly::{ExponentVector, LinearChange, MultiPolynomial, PolyOrder};
pub use report::InvariantReport;
pub use trunc::{ModuleWindow, Presentation, TruncationWindow};
pub use verdicts::Verdict;
