//! Conversion of multi-valued networks into bisimilar Boolean networks.
//!
//! A multi-valued network ([`MvNetwork`]) is converted under a [`Coding`]
//! into a [`BooleanNetwork`] whose variables are grouped into supports, one
//! per integer variable. The [`verification`] module checks the result by
//! explicit enumeration and [`graphs`] relates the interaction graphs of
//! both networks.
//!
//! ```
//! use mv2b::{convert, parse_mvnet, Coding, ModeChoice};
//!
//! let net = parse_mvnet("var x : 0..1; var y : 0..1; rules x: 1 <- y = 1; rules y: 1 <- x = 0;").unwrap();
//! let conv = convert(&net, &Coding::summing(), &ModeChoice::Asynchronous, &Default::default()).unwrap();
//! assert_eq!(conv.report.formulas[0].formula, "y_1");
//! ```

pub mod coding;
pub mod conversion;
pub mod dynamics;
pub mod error;
pub mod fixtures;
pub mod formula;
pub mod graphs;
pub mod io;
pub mod minimize;
pub mod model;
pub mod pipeline;
pub mod sample;
pub mod verification;

pub use coding::{CodeKind, Codec, Coding};
pub use conversion::{convert, Conversion, ConversionReport, ConvertOptions, ModeChoice};
pub use dynamics::{build_sts, Attractor, AttractorKind, Dynamics, TransitionSystem};
pub use error::{Error, Hypothesis, ParseError, Result, SourceSpan};
pub use formula::{equivalent, BoolExpr, Dnf, Literal, Term};
pub use graphs::{
    interaction_graph, recover_migs, sig, InteractionGraph, Sign, SignedInteractionGraph,
};
pub use io::{emit_boolnet, parse_bnet, parse_mvnet};
pub use minimize::{minimize, minimize_on_set, Minimized};
pub use model::{
    BState, BooleanNetwork, Level, Modality, Mode, MvNetwork, MvState, SupportMap, VarId,
    DEFAULT_CAP,
};
pub use verification::{verify_conversion, BisimReport, VerificationReport};
