//! The specification language front end: lexing, parsing, annotation
//! extraction, pretty printing and static checking.

pub mod annotations;
pub mod ast;
pub mod checker;
pub mod lexer;
pub mod parser;
pub mod printer;

pub use annotations::{extract_annotations, AnnotationTarget, AnnotationWarning};
pub use ast::*;
pub use checker::{check_module, literal_type, ApplyKind, TypeEnv, TypeError, TypeErrors};
pub use parser::{parse_bind_entry, parse_expression, parse_specification, parse_type, ParseError, ParseErrors};
pub use printer::{format_rational, print_module, to_vdm_string};
