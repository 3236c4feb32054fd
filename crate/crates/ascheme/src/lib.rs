//! Computations with association schemes.
//!
//! The crate revolves around a validated [`Scheme`]: a partition of X×X
//! given as a color matrix, with converse map, valencies and the full
//! intersection-number tensor checked and cached at construction. On top
//! of it sit closed-subset machinery (thin radical, thin residue,
//! quotients), constructions (thin schemes of groups, wreath products,
//! orbital schemes of permutation groups, translation schemes),
//! isomorphism and automorphism search, and a schurity test harness with
//! a constructive certificate builder for one family of p-schemes.
//!
//! See the `examples/` directory for runnable entry points per
//! capability, and the `ascheme` binary for the command-line surface.

pub mod construct;
pub mod enumerate;
pub mod error;
pub mod group;
pub mod harness;
pub mod io;
pub mod morph;
pub mod perm;
pub mod relset;
pub mod report;
pub mod scheme;
pub mod schurity;
pub mod section4;
pub mod structure;

pub use error::{Error, Result};
pub use perm::{Perm, PermGroup};
pub use relset::RelSet;
pub use scheme::Scheme;
