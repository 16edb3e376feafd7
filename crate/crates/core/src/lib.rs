//! Explicit finite quotients of free products of finite groups in which two
//! given elements have images of different orders.
//!
//! The engine takes two finite groups A and B (as multiplication tables) and
//! words u, v in A∗B. When u is conjugate to neither v nor v⁻¹ it tries to
//! produce a [`separator::Certificate`]: permutation actions of A and B on a
//! common finite set under which u and v act with different orders. Every
//! certificate can be re-checked from scratch with
//! [`separator::verify_certificate`].

pub mod actions;
pub mod cartesian;
pub mod certificate;
pub mod graph;
pub mod group;
pub mod oracle;
pub mod search;
pub mod separator;
pub mod tower;
pub mod word;

pub use actions::ActionTables;
pub use graph::{ActionGraph, PathRef, PropertyReport};
pub use group::{make_group, FiniteGroup, GroupError, GroupSpec, QuotientMap};
pub use word::{Factor, FreeProduct, Syllable, Word, WordClass, WordError};
