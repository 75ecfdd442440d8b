//! Exact computations around double covers of projective space branched
//! along a hypersurface: higher polars, contact lines, rational curves on
//! the cover, Jacobian rank certificates and the supporting combinatorics.

pub mod bounds;
pub mod cover;
pub mod elim;
pub mod error;
pub mod field;
pub mod frames;
pub mod jet;
pub mod linalg;
pub mod polar;
pub mod poly;
pub mod workbench;

pub use error::Error;
pub use field::{Field, FieldSpec, Fp, PrimeField, RatFn, RatFnContext, Rational, Q};
pub use frames::{adapt_frame, line_restrict, ProjPoint, Subspace, Transform};
pub use linalg::Matrix;
pub use poly::{uni_root_data, Algebra, Frame, Monomial, Poly, UniPoly, UniRootData};
