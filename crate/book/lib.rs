//! The chapters of the guide, one module each, so that `cargo test --doc`
//! runs every Rust listing in the book against the current library.

#[doc = include_str!("src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("src/getting-started.md")]
pub mod getting_started {}
#[doc = include_str!("src/problems.md")]
pub mod problems {}
#[doc = include_str!("src/encoding.md")]
pub mod encoding {}
#[doc = include_str!("src/sorts.md")]
pub mod sorts {}
#[doc = include_str!("src/search.md")]
pub mod search {}
#[doc = include_str!("src/sat.md")]
pub mod sat {}
#[doc = include_str!("src/models.md")]
pub mod models {}
#[doc = include_str!("src/trace.md")]
pub mod trace {}

#[doc = include_str!("../README.md")]
pub mod readme {}
