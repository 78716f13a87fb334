//! Guide chapters, compiled so their examples stay runnable.
//!
//! Each chapter is a module whose docs are the chapter's Markdown, so
//! `cargo test -p meltmap-book` runs every Rust block in the book.

#[doc = include_str!("../../../book/src/intro.md")]
pub mod intro {}

#[doc = include_str!("../../../book/src/least-squares.md")]
pub mod least_squares {}

#[doc = include_str!("../../../book/src/datasets.md")]
pub mod datasets {}

#[doc = include_str!("../../../book/src/polynomials.md")]
pub mod polynomials {}

#[doc = include_str!("../../../book/src/importance.md")]
pub mod importance {}

#[doc = include_str!("../../../book/src/ensembles.md")]
pub mod ensembles {}

#[doc = include_str!("../../../book/src/reference-models.md")]
pub mod reference_models {}

#[doc = include_str!("../../../book/src/cli-service.md")]
pub mod cli_service {}
