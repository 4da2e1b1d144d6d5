//! Tokenizer. `--` comments are returned separately so that annotations can
//! be recovered from them.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// Type parameter `@T` (name without the `@`).
    TypeParam(String),
    Int(BigInt),
    Real(BigRational),
    Char(char),
    Str(String),
    Quote(String),
    Keyword(&'static str),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::TypeParam(s) => write!(f, "'@{s}'"),
            Tok::Int(n) => write!(f, "'{n}'"),
            Tok::Real(r) => write!(f, "'{r}'"),
            Tok::Char(c) => write!(f, "'{c}'"),
            Tok::Str(s) => write!(f, "\"{s}\""),
            Tok::Quote(q) => write!(f, "'<{q}>'"),
            Tok::Keyword(k) => write!(f, "'{k}'"),
            Tok::Sym(s) => write!(f, "'{s}'"),
            Tok::Eof => write!(f, "end of file"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub line: u32,
    pub col: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Comment {
    /// Text after the `--`.
    pub text: String,
    pub line: u32,
    pub col: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexError {
    pub line: u32,
    pub col: u32,
    pub message: String,
}

pub const KEYWORDS: &[&str] = &[
    "abs", "and", "be", "bool", "card", "cases", "char", "dinter", "div", "dom", "dunion", "elems",
    "else", "elseif", "end", "exists", "false", "floor", "forall", "functions", "hd", "if", "in",
    "init", "inds", "int", "inter", "inv", "len", "let", "map", "mod", "munion", "nat", "nat1",
    "nil", "not", "of", "or", "others", "post", "power", "pre", "psubset", "real", "rem", "rng",
    "seq", "set", "st", "state", "subset", "tl", "then", "to", "true", "types", "union", "values",
];

// Longest first so that prefixes do not shadow longer symbols.
const SYMBOLS: &[&str] = &[
    "<=>", "|->", "...", "==", "=>", "<=", ">=", "<>", "->", "+>", "++", "::", ".#", "=", "<", ">",
    "+", "-", "*", "/", "\\", "^", "&", "|", ",", ";", ":", "(", ")", "[", "]", "{", "}", ".",
];

pub struct Lexed {
    pub tokens: Vec<Token>,
    pub comments: Vec<Comment>,
    pub errors: Vec<LexError>,
}

pub fn tokenize(source: &str) -> Lexed {
    let chars: Vec<char> = source.chars().collect();
    let mut tokens = Vec::new();
    let mut comments = Vec::new();
    let mut errors = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);

    macro_rules! advance {
        ($n:expr) => {
            for _ in 0..$n {
                if chars[i] == '\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
                i += 1;
            }
        };
    }

    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            advance!(1);
            continue;
        }
        let (tline, tcol) = (line, col);
        if c == '-' && chars.get(i + 1) == Some(&'-') {
            let start = i + 2;
            let mut end = start;
            while end < chars.len() && chars[end] != '\n' {
                end += 1;
            }
            comments.push(Comment {
                text: chars[start..end].iter().collect(),
                line: tline,
                col: tcol,
            });
            advance!(end - i);
            continue;
        }
        if c.is_ascii_alphabetic() {
            let mut end = i;
            while end < chars.len() && (chars[end].is_ascii_alphanumeric() || chars[end] == '_') {
                end += 1;
            }
            let word: String = chars[i..end].iter().collect();
            let tok = match KEYWORDS.iter().find(|k| **k == word) {
                Some(k) => Tok::Keyword(k),
                None => Tok::Ident(word),
            };
            advance!(end - i);
            tokens.push(Token {
                tok,
                line: tline,
                col: tcol,
            });
            continue;
        }
        if c == '@' {
            let mut end = i + 1;
            while end < chars.len() && (chars[end].is_ascii_alphanumeric() || chars[end] == '_') {
                end += 1;
            }
            if end == i + 1 {
                errors.push(LexError {
                    line: tline,
                    col: tcol,
                    message: "expected a type parameter name after '@'".into(),
                });
                advance!(1);
                continue;
            }
            let name: String = chars[i + 1..end].iter().collect();
            advance!(end - i);
            tokens.push(Token {
                tok: Tok::TypeParam(name),
                line: tline,
                col: tcol,
            });
            continue;
        }
        if c.is_ascii_digit() {
            let mut end = i;
            while end < chars.len() && chars[end].is_ascii_digit() {
                end += 1;
            }
            let int_part: String = chars[i..end].iter().collect();
            let is_real = chars.get(end) == Some(&'.')
                && chars.get(end + 1).is_some_and(|d| d.is_ascii_digit());
            let tok = if is_real {
                let mut fend = end + 1;
                while fend < chars.len() && chars[fend].is_ascii_digit() {
                    fend += 1;
                }
                let frac: String = chars[end + 1..fend].iter().collect();
                let numer: BigInt = format!("{int_part}{frac}").parse().unwrap_or_else(|_| BigInt::zero());
                let mut denom = BigInt::one();
                for _ in 0..frac.len() {
                    denom *= 10;
                }
                end = fend;
                Tok::Real(BigRational::new(numer, denom))
            } else {
                Tok::Int(int_part.parse().unwrap_or_else(|_| BigInt::zero()))
            };
            advance!(end - i);
            tokens.push(Token {
                tok,
                line: tline,
                col: tcol,
            });
            continue;
        }
        if c == '\'' {
            if let (Some(&ch), Some('\'')) = (chars.get(i + 1), chars.get(i + 2)) {
                advance!(3);
                tokens.push(Token {
                    tok: Tok::Char(ch),
                    line: tline,
                    col: tcol,
                });
            } else {
                errors.push(LexError {
                    line: tline,
                    col: tcol,
                    message: "malformed character literal".into(),
                });
                advance!(1);
            }
            continue;
        }
        if c == '"' {
            let mut end = i + 1;
            let mut text = String::new();
            while end < chars.len() && chars[end] != '"' && chars[end] != '\n' {
                if chars[end] == '\\' && end + 1 < chars.len() {
                    end += 1;
                    text.push(match chars[end] {
                        'n' => '\n',
                        't' => '\t',
                        other => other,
                    });
                } else {
                    text.push(chars[end]);
                }
                end += 1;
            }
            if chars.get(end) != Some(&'"') {
                errors.push(LexError {
                    line: tline,
                    col: tcol,
                    message: "unterminated string literal".into(),
                });
                advance!(end - i);
                continue;
            }
            advance!(end + 1 - i);
            tokens.push(Token {
                tok: Tok::Str(text),
                line: tline,
                col: tcol,
            });
            continue;
        }
        // Quote literal <NAME>, written without spaces.
        if c == '<' && chars.get(i + 1).is_some_and(|d| d.is_ascii_alphabetic()) {
            let mut end = i + 1;
            while end < chars.len() && (chars[end].is_ascii_alphanumeric() || chars[end] == '_') {
                end += 1;
            }
            if chars.get(end) == Some(&'>') {
                let tag: String = chars[i + 1..end].iter().collect();
                advance!(end + 1 - i);
                tokens.push(Token {
                    tok: Tok::Quote(tag),
                    line: tline,
                    col: tcol,
                });
                continue;
            }
        }
        let rest = &chars[i..];
        if let Some(sym) = SYMBOLS
            .iter()
            .find(|s| s.chars().count() <= rest.len() && s.chars().zip(rest.iter()).all(|(a, b)| a == *b))
        {
            advance!(sym.chars().count());
            tokens.push(Token {
                tok: Tok::Sym(sym),
                line: tline,
                col: tcol,
            });
            continue;
        }
        errors.push(LexError {
            line: tline,
            col: tcol,
            message: format!("unexpected character '{c}'"),
        });
        advance!(1);
    }
    tokens.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Lexed {
        tokens,
        comments,
        errors,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<Tok> {
        tokenize(src).tokens.into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn quotes_and_relations_are_distinguished() {
        assert_eq!(
            kinds("x < 3 <A>"),
            vec![
                Tok::Ident("x".into()),
                Tok::Sym("<"),
                Tok::Int(3.into()),
                Tok::Quote("A".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn comments_are_collected_with_positions() {
        let lexed = tokenize("x -- hello\n  -- @QuickCheck @T = nat;\ny");
        assert_eq!(lexed.comments.len(), 2);
        assert_eq!(lexed.comments[1].line, 2);
        assert_eq!(lexed.comments[1].text.trim(), "@QuickCheck @T = nat;");
    }

    #[test]
    fn decimals_are_exact() {
        let toks = kinds("1.25");
        assert_eq!(
            toks[0],
            Tok::Real(BigRational::new(BigInt::from(5), BigInt::from(4)))
        );
    }

    #[test]
    fn set_range_ellipsis_is_not_a_decimal() {
        assert_eq!(
            kinds("{1,...,3}")[..4],
            [
                Tok::Sym("{"),
                Tok::Int(1.into()),
                Tok::Sym(","),
                Tok::Sym("...")
            ]
        );
    }
}
