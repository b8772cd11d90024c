//! The guide's chapters, compiled so `cargo test --doc` runs their code blocks.
//! One module per chapter keeps failures traceable to a file.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/model.md")]
pub mod model {}
#[doc = include_str!("../../../book/src/circuits.md")]
pub mod circuits {}
#[doc = include_str!("../../../book/src/objectives.md")]
pub mod objectives {}
#[doc = include_str!("../../../book/src/mgda.md")]
pub mod mgda {}
#[doc = include_str!("../../../book/src/running.md")]
pub mod running {}
#[doc = include_str!("../../../book/src/results.md")]
pub mod results {}
