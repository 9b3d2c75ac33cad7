//! Command-line side of the MiniUI accessibility toolkit: project loading,
//! the planner, localizer and fixer agents, the suggestion pipeline, run
//! persistence and reports.

pub mod agents;
pub mod backend;
pub mod cli;
pub mod heuristic;
pub mod manifest;
pub mod pipeline;
pub mod prompts;
pub mod report;
pub mod store;
