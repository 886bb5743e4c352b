//! Wedge normal forms, homology dimension series and one-relator Hilbert
//! series for spaces built from spheres and Moore spaces.

pub mod cli;
pub mod expr;
pub mod freealg;
pub mod rewrite;
pub mod series;
pub mod simplicial;
pub mod theorems;

pub use expr::{parse, SpaceExpr};
pub use series::{series_of, FieldTag, GradedSeries};
