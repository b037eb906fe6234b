//! Executable finite instances of non-archimedean monoid theory.
//!
//! The crate builds finite monoids and their actions ([`finmon`]), finite
//! Boolean rings with their ring and group endomorphisms and Pontryagin
//! duals ([`boolring`]), the Stone/Pontryagin anti-isomorphisms between them
//! ([`duality`]), ultra-pseudometrics and 1-Lipschitz monoids ([`ultra`]),
//! bases of non-archimedean pre-uniformities and covering combinators
//! ([`unif`]), the Kantorovich ultra-norm ([`navector`]) and the
//! left/right asymmetric example monoid ([`examples`]). Every construction
//! comes with an exhaustive check, and [`suite`] runs them all.

pub mod boolring;
pub mod config;
pub mod duality;
pub mod error;
pub mod examples;
pub mod finmon;
pub mod navector;
pub mod suite;
pub mod ultra;
pub mod unif;

pub use config::Limits;
pub use error::{Error, Result};
