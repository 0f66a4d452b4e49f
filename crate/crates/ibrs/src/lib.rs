//! Generalized preferential structures: points with copies, arrows that may
//! attack other arrows, and the minimal-element semantics built on top of
//! them.
//!
//! The crate is organized around a small core:
//!
//! * [`model`] — structures (points, copies, level-n arrows), restriction to
//!   legal subdiagrams, JSON (de)serialization.
//! * [`validity`] — the valid-arrow calculus (`X`-to-`Y` and `X ⇒ Y`) and the
//!   choice functions `μ` and `ρ`-relative-to-`η`.
//! * [`smoothness`] — the `⊑` relation, total / essential / classical
//!   smoothness with diagnostic witnesses.
//! * [`table`], [`properties`] — explicitly tabulated choice functions, their
//!   algebraic properties and brute-force implication checking.
//! * [`represent`], [`search`] — the level-2 attacking construction, the
//!   level-3 essentially smooth construction, and a bounded search for
//!   level-2 totally smooth representations.
//! * [`logic`] — propositional syntax, finite model theory and the
//!   consequence relation induced by a structure over valuations.
//! * [`interp`] — labeled IBRS and the four extraction algorithms (modal,
//!   nonmonotonic, argumentation, intuitionistic) plus a counterfactual
//!   evaluator.
//! * [`circuit`] — discrete-time simulation of gate networks with per-gate
//!   delays and the diagram consequence relation.

pub mod circuit;
pub mod fixtures;
pub mod interp;
pub mod logic;
pub mod model;
pub mod properties;
pub mod represent;
pub mod sample;
pub mod search;
pub mod smoothness;
pub mod table;
pub mod validity;

pub use model::{Arrow, ClosureSets, ModelError, PointCopy, Structure, Target};
pub use table::MuTable;
