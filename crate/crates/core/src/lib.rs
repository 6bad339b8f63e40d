//! Fixed-stress and parallel-in-time fixed-stress splitting for the
//! two-field Biot consolidation model, with the Mandel benchmark.

// index loops mirror the element formulas; `!(x > 0.0)` deliberately rejects NaN
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod assembly;
pub mod cli;
pub mod linalg;
pub mod mandel;
pub mod mesh;
pub mod splitting;
