//! `-- @QuickCheck @T = type, type;` comment annotations.

use std::sync::Arc;

use super::ast::QuickCheckAnnotation;
use super::lexer::{tokenize, Comment, Tok};
use super::parser::parse_type_tokens;

/// A function definition that annotations may attach to: comments on lines
/// strictly between `after_line` and `before_line` precede it.
#[derive(Clone, Debug)]
pub struct AnnotationTarget {
    pub function: String,
    pub type_params: Vec<String>,
    pub after_line: u32,
    pub before_line: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnnotationWarning {
    pub line: u32,
    pub message: String,
}

pub fn extract_annotations(
    comments: &[Comment],
    targets: &[AnnotationTarget],
) -> (Vec<QuickCheckAnnotation>, Vec<AnnotationWarning>) {
    let mut annotations = Vec::new();
    let mut warnings = Vec::new();
    for comment in comments {
        let text = comment.text.trim();
        if !text.starts_with("@QuickCheck") {
            continue;
        }
        let warn = |message: String| AnnotationWarning {
            line: comment.line,
            message,
        };
        let Some(target) = targets
            .iter()
            .find(|t| comment.line > t.after_line && comment.line < t.before_line)
        else {
            warnings.push(warn("@QuickCheck annotation does not precede a function".into()));
            continue;
        };
        match parse_annotation(&text["@QuickCheck".len()..]) {
            Ok((param, candidates)) => {
                if !target.type_params.contains(&param) {
                    warnings.push(warn(format!(
                        "@QuickCheck names @{param}, which is not a type parameter of {}",
                        target.function
                    )));
                    continue;
                }
                annotations.push(QuickCheckAnnotation {
                    function: target.function.clone(),
                    param,
                    candidates,
                });
            }
            Err(message) => warnings.push(warn(format!("malformed @QuickCheck annotation: {message}"))),
        }
    }
    (annotations, warnings)
}

fn parse_annotation(text: &str) -> Result<(String, Vec<super::ast::TypeExpr>), String> {
    let lexed = tokenize(text);
    if let Some(e) = lexed.errors.first() {
        return Err(e.message.clone());
    }
    let mut tokens = lexed.tokens;
    let param = match tokens.first().map(|t| &t.tok) {
        Some(Tok::TypeParam(p)) => p.clone(),
        _ => return Err("expected @<name>".into()),
    };
    if tokens.get(1).map(|t| &t.tok) != Some(&Tok::Sym("=")) {
        return Err("expected '=' after the type parameter".into());
    }
    tokens.drain(..2);
    let mut candidates = Vec::new();
    loop {
        let (ty, used) = parse_type_tokens(tokens.clone(), Arc::from("<annotation>"));
        candidates.push(ty.map_err(|e| e.message)?);
        tokens.drain(..used);
        match tokens.first().map(|t| &t.tok) {
            Some(Tok::Sym(",")) => {
                tokens.remove(0);
            }
            Some(Tok::Sym(";")) | Some(Tok::Eof) => break,
            Some(other) => return Err(format!("unexpected {other}")),
            None => break,
        }
    }
    Ok((param, candidates))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::ast::TypeExpr;

    fn comment(text: &str, line: u32) -> Comment {
        Comment {
            text: text.into(),
            line,
            col: 5,
        }
    }

    fn target(params: &[&str]) -> AnnotationTarget {
        AnnotationTarget {
            function: "f".into(),
            type_params: params.iter().map(|s| s.to_string()).collect(),
            after_line: 1,
            before_line: 3,
        }
    }

    #[test]
    fn parses_candidate_list() {
        let (anns, warns) = extract_annotations(
            &[comment(" @QuickCheck @T = set of nat, set of bool;", 2)],
            &[target(&["T"])],
        );
        assert!(warns.is_empty());
        assert_eq!(
            anns,
            vec![QuickCheckAnnotation {
                function: "f".into(),
                param: "T".into(),
                candidates: vec![TypeExpr::set(TypeExpr::Nat), TypeExpr::set(TypeExpr::Bool)],
            }]
        );
    }

    #[test]
    fn ordinary_comments_are_ignored() {
        let (anns, warns) = extract_annotations(&[comment(" hello", 2)], &[target(&["T"])]);
        assert!(anns.is_empty() && warns.is_empty());
    }

    #[test]
    fn unknown_parameter_is_a_warning() {
        let (anns, warns) =
            extract_annotations(&[comment(" @QuickCheck @Z = int;", 2)], &[target(&["T"])]);
        assert!(anns.is_empty());
        assert_eq!(warns.len(), 1);
    }

    #[test]
    fn malformed_annotation_is_a_warning() {
        let (anns, warns) =
            extract_annotations(&[comment(" @QuickCheck @T = ;", 2)], &[target(&["T"])]);
        assert!(anns.is_empty());
        assert_eq!(warns.len(), 1);
    }
}
