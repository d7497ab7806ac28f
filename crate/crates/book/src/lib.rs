// mdbook cannot run listings that depend on workspace crates, so each chapter
// is included as the docs of an empty module and `cargo test --doc` runs the
// listings instead. One module per chapter keeps failures attributable.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/roughness.md")]
pub mod roughness {}
#[doc = include_str!("../../../book/src/autocorrelation.md")]
pub mod autocorrelation {}
#[doc = include_str!("../../../book/src/effective-sample-size.md")]
pub mod effective_sample_size {}
#[doc = include_str!("../../../book/src/significance.md")]
pub mod significance {}
#[doc = include_str!("../../../book/src/simulation.md")]
pub mod simulation {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
