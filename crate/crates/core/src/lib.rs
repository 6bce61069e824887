//! Knot Floer chain complexes over `F2[U,V]` and the concordance invariants
//! `τ` and `Υ`, together with bounds from surfaces in negative-definite
//! 4-manifolds and grading changes of decorated link cobordisms.

pub mod bicomplex;
pub mod bounds;
pub mod cobordism;
mod error;
mod f2;
pub mod pl;
pub mod t_modified;
pub mod tau;
pub mod verify;

pub use bicomplex::{ChainComplexUV, Edge, Generator, Violation};
pub use bounds::{CharVector, HomologyClass};
pub use cobordism::{CobordismTopology, ElementaryPiece, GradingDelta};
pub use error::{Error, Result};
pub use pl::{fmt_rational, parse_rational, Line, PlFunction, Rational};
pub use t_modified::{HomologySummands, TComplex, TParameter};
pub use tau::{tau, FilteredHatComplex};
