//! Random architecture generation and the oracle property suite behind
//! the `verify` command.

mod fuzz;
mod suite;

pub use fuzz::{random_graph, random_input};
pub use suite::{
    block_diagonal, check_codec, check_fc_lowering, check_grouped_conv, check_macs, check_shapes,
    check_shuffle, max_rel_diff, reencode_identity, run_suite, PropertyResult, VerifyReport,
};
