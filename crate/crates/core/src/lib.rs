//! Core of the MiniUI accessibility repair toolkit.
//!
//! Everything here is pure and allocation-only: the MiniUI language
//! ([`lang`]), cross-file hierarchy restoration and identifier
//! instrumentation ([`hierarchy`]), the deterministic layout engine
//! ([`render`]), the rule-based accessibility scanner ([`scanner`]) and patch
//! assessment ([`assess`]). IO, agents and the command line live in the
//! `minui-a11y` crate.
#![no_std]

extern crate alloc;

pub mod hierarchy;
pub mod lang;
pub mod render;
pub mod scanner;
pub mod assess;
