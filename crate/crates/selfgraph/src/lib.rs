//! Toolkit for constructing, rendering, and pixel-exactly verifying a
//! self-graphing equation: a string over a fixed 47-symbol alphabet whose
//! graph, drawn on the plane, is the string's own written form.
//!
//! The pipeline goes: a pixel font assigns a glyph to each symbol
//! ([`glyphs`]); strings are numbered bijectively ([`codec`]); equations over
//! the alphabet get exact rational semantics including infinite products
//! ([`eqlang`]); first-order predicates over naturals compile to single
//! equations `E = 0` ([`logic`]); a small register machine provides a concrete
//! enumeration of the computable functions, a constant-program constructor,
//! and a constructive recursion-theorem fixed point ([`machine`]); machine
//! halting and glyph geometry are arithmetized into the predicate behind the
//! equation template ([`arith`]); and [`selfgraph`] ties it together, building
//! the fixed point and verifying that the graph equals the rendering.

pub mod arith;
pub mod cli;
pub mod codec;
pub mod eqlang;
pub mod glyphs;
pub mod logic;
pub mod machine;
pub mod selfgraph;
