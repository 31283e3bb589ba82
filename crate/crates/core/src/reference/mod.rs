//! Test functions with exact transforms, the special functions they need,
//! and an independent quadrature oracle.

pub mod examples;
pub mod oracle;
pub mod special;

pub use examples::{all_examples, exact_hilbert, example, ExampleSpec, Family, EXAMPLE_IDS};
pub use oracle::{pv_oracle, pv_oracle_with, OracleOptions};
pub use special::{dawson, digamma, expint_y};
