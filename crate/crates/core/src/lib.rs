//! Combinatorial auctions with endowment-effect bidders.
//!
//! Valuations, endowed equilibria and their verification, local search,
//! the configuration LP over exact rationals, and instance generators.

pub mod bundle;
pub mod equilibrium;
pub mod error;
pub mod instances;
pub mod local_search;
pub mod lp;
pub mod rational;
pub mod valuations;

pub use bundle::Bundle;
pub use error::{Error, Result};
pub use rational::Rational;
pub use valuations::{Valuation, ValuationClass};
pub use equilibrium::{Allocation, Instance, PriceVector};
