//! Exact interval exchange transformations and the group-theoretic tools
//! built on them: Cayley balls, orbits, Imanishi decomposition, stabilizer
//! analysis, lamplighter embeddings and the `H_J` family.

pub mod constructions;
pub mod domain;
pub mod error;
pub mod exact;
pub mod exchange;
pub mod group;
pub mod iet;
pub mod scene;

pub use constructions::AbelianGroup;
pub use domain::{Component, ComponentKind, Domain, Point, Segment, Subdomain};
pub use error::{Error, Result};
pub use exact::{in_q_span, ExactReal, Rational, Refiner, Symbol, SymbolBasis, SymbolId};
pub use exchange::{cut_domain, restrict, subdomain_exchange, Exchange};
pub use group::finite::{FiniteIetGroup, GroupTable};
pub use group::imanishi::{imanishi_decompose, ClassVerdict, Decomposition};
pub use group::{FinGenGroup, Generator};
pub use iet::{Cell, FiberStep, Iet, NormEstimate, NormSample};
