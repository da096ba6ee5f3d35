//! Linear filtering of edge flows on simplicial complexes.
//!
//! Build a [`SimplicialComplex`], derive its incidence matrices and Hodge
//! Laplacians, decompose the edge space into gradient, curl and harmonic
//! frequencies with [`Spectrum`], then design and apply polynomial filters
//! in either the shared-coefficient ([`FirFilter`]) or subspace-varying
//! ([`SvFilter`]) form.

pub mod complex;
pub mod design;
pub mod error;
pub mod experiments;
pub mod filtering;
pub mod io;
pub mod lstsq;
pub mod rank;
pub mod sparse;
pub mod spectral;
pub mod vecops;

pub use complex::{EdgeFlow, HodgeLaplacians, HodgeSystem, IncidencePair, NodeId, SimplicialComplex};
pub use design::{DesignOptions, DesignReport, DesignSpec, DesignWarning, FlowPair};
pub use error::{Error, Result};
pub use filtering::{Filter, FirFilter, FrequencyResponse, SvFilter};
pub use spectral::{FrequencyKind, Spectrum};
