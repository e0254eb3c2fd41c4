//! Flag-algebra certificates for lower bounds on Ramsey multiplicity
//! constants.
//!
//! The pipeline enumerates flags, computes exact density tables, assembles a
//! semidefinite program for an external solver, rounds the solver's matrices
//! to exact rationals and verifies the resulting certificate with rational
//! arithmetic only:
//!
//! ```no_run
//! use flagcert::{certify, sdp};
//!
//! let problem = sdp::build_problem(3, 1, 2)?;
//! std::fs::write("goodman.dat-s", sdp::export_solver_format(&problem))?;
//! // ... run any SDPA-format solver, then:
//! let text = std::fs::read_to_string("goodman.sol")?;
//! let solution = sdp::import_solution(&problem, &text)?;
//! let outcome = certify::certify_solution(&problem, &solution, 1000)?;
//! assert_eq!(certify::verify(&outcome.certificate)?, outcome.certificate.bound);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod algebra;
pub mod canon;
pub mod certify;
pub mod cli;
pub mod density;
pub mod enumerate;
pub mod error;
pub mod formats;
pub mod graph;
pub mod matrix;
pub mod sdp;

/// Exact rational number, always in lowest terms with a positive denominator.
pub type Rational = num_rational::BigRational;

pub use algebra::{objective_vector, quadratic_form_image, AveragedTable, AveragingMap, FlagVector, ProductTable};
pub use canon::{canonical_form, is_isomorphic, CanonicalForm};
pub use certify::{psd_certify, verify, Certificate, PsdWitness};
pub use density::{density, expand, joint_density};
pub use enumerate::{enumerate_flags, enumerate_types, FlagBasis};
pub use graph::{Flag, Graph, TypeGraph};
pub use matrix::Matrix;
