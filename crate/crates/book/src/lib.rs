//! The guide in `book/` is plain mdbook markdown. `mdbook test` cannot link
//! against workspace crates, so each chapter is included here as a module
//! doc and its Rust samples run under `cargo test --doc`. The README is
//! checked the same way.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/families.md")]
pub mod families {}
#[doc = include_str!("../../../book/src/forward.md")]
pub mod forward {}
#[doc = include_str!("../../../book/src/inversion.md")]
pub mod inversion {}
#[doc = include_str!("../../../book/src/nucleus.md")]
pub mod nucleus {}
#[doc = include_str!("../../../book/src/singular.md")]
pub mod singular {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
#[doc = include_str!("../../../book/src/testing.md")]
pub mod testing {}
#[doc = include_str!("../../../README.md")]
pub mod readme {}
