//! The runtime value universe and value generation for types.

pub mod bounds;
pub mod cardinality;
pub mod generate;
pub mod membership;
pub mod value;

pub use bounds::{integer_range, IntRange};
pub use cardinality::{cardinality, Cardinality, CHAR_ALPHABET};
pub use generate::{enumerate_all, fixed_values, random_value, RANDOM_RETRIES};
pub use membership::{type_membership, InvariantOracle, NoInvariants};
pub use value::Value;
