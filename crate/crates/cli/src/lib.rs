//! Library half of the `gradmod` binary: input format, bundled corpus,
//! verification rows, randomized search, and report rendering. The thin
//! `main.rs` maps these onto the command line.

pub mod corpus;
pub mod input;
pub mod output;
pub mod search;
pub mod verify;
