//! Spoken code-switched Universal Dependencies: data model, I/O, scoring and
//! the staged annotation pipeline.

pub mod backend;
pub mod config;
pub mod decap;
pub mod flexud;
pub mod io;
pub mod metrics;
pub mod table;
pub mod ud;
