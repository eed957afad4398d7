//! The `ipta` modeling language: lexing, parsing, elaboration and queries.
//!
//! A model file declares constants, modules with bounded integer variables,
//! clocks, an invariant block and guarded commands whose alternatives carry
//! probabilities or intervals `lower ~ upper`, and labels:
//!
//! ```text
//! ipta
//! const double L;
//! module Server
//!   s : [0..2] init 0;
//!   x : clock;
//!   invariant (s=1 => x<=20) endinvariant
//!   [request] s=0 -> (L~1):(s'=1)&(x'=0) + (0~(1-L)):(s'=2)&(x'=0);
//! endmodule
//! label "busy" = s>0;
//! ```

pub mod ast;
pub mod error;
pub mod eval;
pub mod lexer;
pub mod minimal;
pub mod parser;
pub mod query;
pub mod resolve;

pub use ast::{ModelKind, ModelSource, Query, QueryMode};
pub use error::{LangError, LangErrorKind, Pos};
pub use eval::{ClockFormula, Value};
pub use parser::{parse_expr, parse_model, parse_queries, parse_query};
pub use query::{compile_query, CompiledQuery};
pub use resolve::{parse_binding, resolve, ResolvedModel};
