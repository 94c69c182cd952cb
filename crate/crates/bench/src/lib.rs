//! Benchmark inputs. The generators are shared with the core integration tests.

#[path = "../../core/tests/common/mod.rs"]
pub mod common;
