//! Exact computational workbench for polynomial identities of matrix algebras.
//!
//! The crate is organized around five layers:
//!
//! * [`coeffring`] — exact scalars: the integers, prime fields `F_p`, and
//!   extension fields `GF(p^m)` with the Frobenius endomorphism;
//! * [`freealg`] — the free noncommutative algebra over those scalars:
//!   words, sparse polynomials, substitution, blended/homogeneous
//!   decomposition, and the partial-linearization calculus;
//! * [`polylib`] — constructors for the classical identity polynomials
//!   (Capelli, standard, central polynomials) and the hiking substitutions;
//! * [`matalg`] — exact matrix algebra: division-free characteristic
//!   polynomials, characteristic coefficients in several flavors, and the
//!   left-regular representation;
//! * [`quiver`] — labeled, glued DAGs realized as Wedderburn block-form
//!   algebras, degree vectors, and reduction steps with a well-founded
//!   termination measure;
//! * [`pitest`] — evaluation of free-algebra polynomials on block algebras
//!   and matrix rings: identity/centrality/quasi-linearity verdicts,
//!   coefficient-absorption checks, and budgeted T-ideal membership.
//!
//! Everything is exact (no floating point) and deterministic: all sampling
//! flows from explicit 64-bit seeds through a splittable counter-based
//! scheme in [`seeding`], so reports are reproducible byte for byte
//! independent of worker count.

pub mod coeffring;
pub mod freealg;
pub mod matalg;
pub mod pitest;
pub mod polylib;
pub mod quiver;
pub mod seeding;

pub use coeffring::{CoeffError, FieldScalar, FieldSpec};
pub use freealg::{AlgError, NcPolynomial, SubstitutionMap, Word};
pub use pitest::{Assignment, IdentityReport, PitestError, Verdict};
pub use matalg::{CharPoly, MatError, SquareMatrix};
pub use polylib::{HikeRecord, PolyLibError};
pub use quiver::{BlockAlgebra, DegreeVector, QuiverError, QuiverSpec, ReductionStep};
