pub mod eval;
pub mod parse;
pub mod report;
pub mod validate;
