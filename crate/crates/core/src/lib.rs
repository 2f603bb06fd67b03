//! Graded isomorphism testing for finitely presented graded algebras over
//! prime fields.

pub mod classify;
pub mod gfp;
pub mod groebner;
pub mod hilbert;
pub mod isotest;
pub mod present;
pub mod truncated;

pub use gfp::{FieldElement, Matrix, PrimeField};
pub use groebner::{GroebnerBasis, IdealHandle, TermOrder};
pub use hilbert::{HilbertSeries, RationalSeries, TruncatedSeries};
pub use isotest::{graded_isomorphism, verify_certificate, IsoOptions, IsoVerdict, Outcome};
pub use present::{Mode, Monomial, Polynomial, Presentation};
pub use truncated::{Element, TruncatedAlgebra};
