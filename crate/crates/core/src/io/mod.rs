//! Text formats: the `.mvnet` network language, `.bnet` Boolean networks,
//! Graphviz and JSON.

mod bnet;
mod dot;
mod json;
mod mvnet;

pub use bnet::{align_to, emit_boolnet, parse_bnet};
pub use dot::{emit_graph_dot, emit_sts_dot, emit_unsigned_graph_dot};
pub use json::{to_json, FORMAT_VERSION};
pub use mvnet::{parse_mvnet, print_guard, print_mvnet};
