//! Small reference networks used by tests and examples.

/// Two-variable network with `x` in 0..1 and `y` in 0..3.
pub const FIG1: &str = include_str!("../data/fig1.mvnet");
/// One variable in 0..3 whose only stable state is 2.
pub const FIG3: &str = include_str!("../data/fig3.mvnet");
/// Summing-coded network for [`FIG3`] that keeps level 2 stable.
pub const FIG3_MIDDLE_BNET: &str = include_str!("../data/fig3_middle.bnet");
/// Summing-coded network for [`FIG3`] that cycles through the codes of level 2.
pub const FIG3_RIGHT_BNET: &str = include_str!("../data/fig3_right.bnet");
/// Summing conversion of [`FIG1`].
pub const FIG4_BNET: &str = include_str!("../data/fig4.bnet");
/// Gray conversion of [`FIG1`].
pub const FIG5_BNET: &str = include_str!("../data/fig5.bnet");
