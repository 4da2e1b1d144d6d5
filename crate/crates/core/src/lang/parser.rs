//! Recursive descent parser for the specification language.
//!
//! Errors are collected per definition; after an error the parser skips to
//! the next `;` or section keyword and carries on.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use thiserror::Error;

use super::annotations::{extract_annotations, AnnotationTarget};
use super::ast::*;
use super::lexer::{tokenize, Tok, Token};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{message} in {loc}")]
pub struct ParseError {
    pub loc: Location,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct ParseErrors(pub Vec<ParseError>);

impl fmt::Display for ParseErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "Error: {e}")?;
        }
        Ok(())
    }
}

type PResult<T> = Result<T, ParseError>;

const SECTION_KEYWORDS: &[&str] = &["types", "values", "functions", "state"];

/// Parses one source file into an (unchecked) module named `DEFAULT`.
pub fn parse_specification(source: &str, file_name: &str) -> Result<SpecModule, ParseErrors> {
    let file: Arc<str> = Arc::from(file_name);
    let lexed = tokenize(source);
    let mut errors: Vec<ParseError> = lexed
        .errors
        .iter()
        .map(|e| ParseError {
            loc: Location::new(&file, e.line, e.col),
            message: e.message.clone(),
        })
        .collect();

    let mut parser = Parser::new(lexed.tokens, Arc::clone(&file));
    let mut module = SpecModule {
        name: "DEFAULT".into(),
        sources: vec![(Arc::clone(&file), Arc::from(source))],
        ..SpecModule::default()
    };
    let mut targets = Vec::new();
    parser.parse_sections(&mut module, &mut targets, &mut errors);

    let (annotations, warnings) = extract_annotations(&lexed.comments, &targets);
    module.annotations = annotations;
    module.warnings = warnings
        .into_iter()
        .map(|w| format!("Warning: {} in {}", w.message, Location::new(&file, w.line, 1)))
        .collect();

    check_duplicates(&module, &mut errors);
    if errors.is_empty() {
        Ok(module)
    } else {
        errors.sort_by_key(|a| (a.loc.line, a.loc.col));
        Err(ParseErrors(errors))
    }
}

/// Parses a single expression; used by `print` and bind files.
pub fn parse_expression(source: &str, file_name: &str) -> Result<Expr, ParseErrors> {
    let file: Arc<str> = Arc::from(file_name);
    let lexed = tokenize(source);
    if let Some(e) = lexed.errors.first() {
        return Err(ParseErrors(vec![ParseError {
            loc: Location::new(&file, e.line, e.col),
            message: e.message.clone(),
        }]));
    }
    let mut parser = Parser::new(lexed.tokens, file);
    let result = parser.parse_expr().and_then(|e| {
        parser.expect_eof()?;
        Ok(e)
    });
    result.map_err(|e| ParseErrors(vec![e]))
}

/// Parses a bind file entry `pattern : type = set-expression`.
pub fn parse_bind_entry(source: &str, file_name: &str, line: u32) -> Result<(Pattern, TypeExpr, Expr), ParseError> {
    let file: Arc<str> = Arc::from(file_name);
    let mut lexed = tokenize(source);
    if let Some(e) = lexed.errors.first() {
        return Err(ParseError {
            loc: Location::new(&file, line, e.col),
            message: e.message.clone(),
        });
    }
    for t in &mut lexed.tokens {
        t.line = line;
    }
    let mut parser = Parser::new(lexed.tokens, file);
    let pattern = parser.parse_pattern()?;
    parser.expect_sym(":")?;
    let ty = parser.parse_type()?;
    parser.expect_sym("=")?;
    let set = parser.parse_expr()?;
    parser.expect_eof()?;
    Ok((pattern, ty, set))
}

/// Parses a standalone type expression.
pub fn parse_type(source: &str) -> Result<TypeExpr, ParseError> {
    let lexed = tokenize(source);
    let mut parser = Parser::new(lexed.tokens, Arc::from("<type>"));
    let ty = parser.parse_type()?;
    parser.expect_eof()?;
    Ok(ty)
}

pub(crate) fn parse_type_tokens(tokens: Vec<Token>, file: Arc<str>) -> (Result<TypeExpr, ParseError>, usize) {
    let mut parser = Parser::new(tokens, file);
    let r = parser.parse_type();
    (r, parser.pos)
}

fn check_duplicates(module: &SpecModule, errors: &mut Vec<ParseError>) {
    let mut types: Vec<&str> = Vec::new();
    for t in &module.types {
        if types.contains(&t.name.as_str()) {
            errors.push(duplicate(&t.name, &t.loc));
        }
        types.push(&t.name);
    }
    // Functions and values share one namespace.
    let mut names: Vec<&str> = Vec::new();
    let defs = module
        .functions
        .iter()
        .map(|f| (&f.name, &f.loc))
        .chain(module.values.iter().map(|v| (&v.name, &v.loc)));
    for (name, loc) in defs {
        if names.contains(&name.as_str()) {
            errors.push(duplicate(name, loc));
        }
        names.push(name);
    }
}

fn duplicate(name: &str, loc: &Location) -> ParseError {
    ParseError {
        loc: loc.clone(),
        message: format!("duplicate definition of {name}"),
    }
}

pub(crate) struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    file: Arc<str>,
}

impl Parser {
    pub(crate) fn new(tokens: Vec<Token>, file: Arc<str>) -> Self {
        Parser {
            tokens,
            pos: 0,
            file,
        }
    }

    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn loc(&self) -> Location {
        let t = &self.tokens[self.pos];
        Location::new(&self.file, t.line, t.col)
    }

    fn prev_line(&self) -> u32 {
        if self.pos == 0 {
            0
        } else {
            self.tokens[self.pos - 1].line
        }
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Keyword(x) if *x == k)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, k: &str) -> bool {
        if self.is_kw(k) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(ParseError {
            loc: self.loc(),
            message: message.into(),
        })
    }

    fn unexpected<T>(&self, expected: &str) -> PResult<T> {
        self.error(format!("expected {expected}, found {}", self.peek()))
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.unexpected(&format!("'{s}'"))
        }
    }

    fn expect_kw(&mut self, k: &str) -> PResult<()> {
        if self.eat_kw(k) {
            Ok(())
        } else {
            self.unexpected(&format!("'{k}'"))
        }
    }

    fn expect_eof(&mut self) -> PResult<()> {
        if matches!(self.peek(), Tok::Eof) {
            Ok(())
        } else {
            self.unexpected("end of input")
        }
    }

    fn expect_ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.unexpected("an identifier"),
        }
    }

    fn at_section_boundary(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
            || matches!(self.peek(), Tok::Keyword(k) if SECTION_KEYWORDS.contains(k))
    }

    fn recover(&mut self) {
        while !self.at_section_boundary() {
            if self.eat_sym(";") {
                return;
            }
            self.bump();
        }
    }

    // ----- definitions -------------------------------------------------

    fn parse_sections(
        &mut self,
        module: &mut SpecModule,
        targets: &mut Vec<AnnotationTarget>,
        errors: &mut Vec<ParseError>,
    ) {
        loop {
            match self.peek().clone() {
                Tok::Eof => return,
                Tok::Keyword("types") => {
                    self.bump();
                    while !self.at_section_boundary() {
                        match self.parse_type_def() {
                            Ok(t) => {
                                module.types.push(t);
                                self.eat_sym(";");
                            }
                            Err(e) => {
                                errors.push(e);
                                self.recover();
                            }
                        }
                    }
                }
                Tok::Keyword("values") => {
                    self.bump();
                    while !self.at_section_boundary() {
                        match self.parse_value_def() {
                            Ok(v) => {
                                module.values.push(v);
                                self.eat_sym(";");
                            }
                            Err(e) => {
                                errors.push(e);
                                self.recover();
                            }
                        }
                    }
                }
                Tok::Keyword("functions") => {
                    self.bump();
                    while !self.at_section_boundary() {
                        let after_line = self.prev_line();
                        let start_line = self.tokens[self.pos].line;
                        match self.parse_function_def() {
                            Ok(f) => {
                                targets.push(AnnotationTarget {
                                    function: f.name.clone(),
                                    type_params: f.type_params.clone(),
                                    after_line,
                                    before_line: start_line,
                                });
                                module.functions.push(f);
                                self.eat_sym(";");
                            }
                            Err(e) => {
                                errors.push(e);
                                self.recover();
                            }
                        }
                    }
                }
                Tok::Keyword("state") => match self.parse_state_def() {
                    Ok(s) => {
                        if module.state.is_some() {
                            errors.push(ParseError {
                                loc: s.loc.clone(),
                                message: "only one state definition is allowed".into(),
                            });
                        }
                        module.state = Some(s);
                        self.eat_sym(";");
                    }
                    Err(e) => {
                        errors.push(e);
                        self.bump();
                        self.recover();
                    }
                },
                _ => {
                    errors.push(ParseError {
                        loc: self.loc(),
                        message: format!(
                            "expected 'types', 'values', 'functions' or 'state', found {}",
                            self.peek()
                        ),
                    });
                    self.bump();
                    self.recover();
                }
            }
        }
    }

    fn parse_invariant_clause(&mut self, kw: &str) -> PResult<Option<(Pattern, Expr)>> {
        if !self.eat_kw(kw) {
            return Ok(None);
        }
        let pattern = self.parse_pattern()?;
        self.expect_sym("==")?;
        let body = self.parse_expr()?;
        Ok(Some((pattern, body)))
    }

    fn parse_fields(&mut self) -> PResult<Vec<(String, TypeExpr)>> {
        let mut fields = Vec::new();
        while matches!(self.peek(), Tok::Ident(_)) && matches!(self.peek_at(1), Tok::Sym(":")) {
            let name = self.expect_ident()?;
            self.expect_sym(":")?;
            let ty = self.parse_type()?;
            fields.push((name, ty));
        }
        Ok(fields)
    }

    fn parse_type_def(&mut self) -> PResult<TypeDef> {
        let loc = self.loc();
        let name = self.expect_ident()?;
        let body = if self.eat_sym("::") {
            TypeBody::Record(self.parse_fields()?)
        } else {
            self.expect_sym("=")?;
            TypeBody::Alias(self.parse_type()?)
        };
        let invariant = self.parse_invariant_clause("inv")?;
        Ok(TypeDef {
            name,
            body,
            invariant,
            loc,
        })
    }

    fn parse_value_def(&mut self) -> PResult<ValueDef> {
        let loc = self.loc();
        let name = self.expect_ident()?;
        let ty = if self.eat_sym(":") {
            Some(self.parse_type()?)
        } else {
            None
        };
        self.expect_sym("=")?;
        let value = self.parse_expr()?;
        Ok(ValueDef {
            name,
            ty,
            value,
            loc,
        })
    }

    fn parse_type_param_list(&mut self) -> PResult<Vec<String>> {
        let mut params = Vec::new();
        if self.eat_sym("[") {
            loop {
                match self.peek().clone() {
                    Tok::TypeParam(p) => {
                        self.bump();
                        params.push(p);
                    }
                    _ => return self.unexpected("a type parameter"),
                }
                if !self.eat_sym(",") {
                    break;
                }
            }
            self.expect_sym("]")?;
        }
        Ok(params)
    }

    fn parse_function_def(&mut self) -> PResult<FunctionDef> {
        let loc = self.loc();
        let name = self.expect_ident()?;
        let type_params = self.parse_type_param_list()?;
        self.expect_sym(":")?;
        let param_types = if self.is_sym("(") && matches!(self.peek_at(1), Tok::Sym(")")) {
            self.bump();
            self.bump();
            Vec::new()
        } else {
            match self.parse_type()? {
                TypeExpr::Product(ts) => ts,
                t => vec![t],
            }
        };
        if !self.eat_sym("->") && !self.eat_sym("+>") {
            return self.unexpected("'->'");
        }
        let return_type = self.parse_type()?;

        let def_name_loc = self.loc();
        let def_name = self.expect_ident()?;
        if def_name != name {
            return Err(ParseError {
                loc: def_name_loc,
                message: format!("function definition name {def_name} does not match signature {name}"),
            });
        }
        if self.is_sym("[") {
            let again = self.parse_type_param_list()?;
            if again != type_params {
                return Err(ParseError {
                    loc: def_name_loc,
                    message: "type parameters do not match signature".into(),
                });
            }
        }
        self.expect_sym("(")?;
        let mut params = Vec::new();
        if !self.is_sym(")") {
            loop {
                params.push(self.parse_pattern()?);
                if !self.eat_sym(",") {
                    break;
                }
            }
        }
        self.expect_sym(")")?;
        if params.len() != param_types.len() {
            return Err(ParseError {
                loc: def_name_loc,
                message: format!(
                    "function {name} has {} parameter types but {} parameters",
                    param_types.len(),
                    params.len()
                ),
            });
        }
        self.expect_sym("==")?;
        let body = self.parse_expr()?;
        let pre = if self.eat_kw("pre") {
            Some(self.parse_expr()?)
        } else {
            None
        };
        let post = if self.eat_kw("post") {
            Some(self.parse_expr()?)
        } else {
            None
        };
        Ok(FunctionDef {
            name,
            type_params,
            param_types,
            return_type,
            params,
            body,
            pre,
            post,
            loc,
        })
    }

    fn parse_state_def(&mut self) -> PResult<StateDef> {
        self.expect_kw("state")?;
        let loc = self.loc();
        let name = self.expect_ident()?;
        self.expect_kw("of")?;
        let fields = self.parse_fields()?;
        let invariant = self.parse_invariant_clause("inv")?;
        let init = self.parse_invariant_clause("init")?;
        self.expect_kw("end")?;
        Ok(StateDef {
            name,
            fields,
            invariant,
            init,
            loc,
        })
    }

    // ----- types -------------------------------------------------------

    pub(crate) fn parse_type(&mut self) -> PResult<TypeExpr> {
        let first = self.parse_product_type()?;
        if !self.is_sym("|") {
            return Ok(first);
        }
        let mut members = vec![first];
        while self.eat_sym("|") {
            members.push(self.parse_product_type()?);
        }
        Ok(TypeExpr::Union(members))
    }

    fn parse_product_type(&mut self) -> PResult<TypeExpr> {
        let first = self.parse_unary_type()?;
        if !self.is_sym("*") {
            return Ok(first);
        }
        let mut fields = vec![first];
        while self.eat_sym("*") {
            fields.push(self.parse_unary_type()?);
        }
        Ok(TypeExpr::Product(fields))
    }

    fn parse_unary_type(&mut self) -> PResult<TypeExpr> {
        if self.eat_kw("seq") {
            self.expect_kw("of")?;
            return Ok(TypeExpr::seq(self.parse_unary_type()?));
        }
        if self.eat_kw("set") {
            self.expect_kw("of")?;
            return Ok(TypeExpr::set(self.parse_unary_type()?));
        }
        if self.eat_kw("map") {
            let dom = self.parse_unary_type()?;
            self.expect_kw("to")?;
            let rng = self.parse_unary_type()?;
            return Ok(TypeExpr::map(dom, rng));
        }
        let ty = match self.peek().clone() {
            Tok::Keyword("bool") => TypeExpr::Bool,
            Tok::Keyword("nat") => TypeExpr::Nat,
            Tok::Keyword("nat1") => TypeExpr::Nat1,
            Tok::Keyword("int") => TypeExpr::Int,
            Tok::Keyword("real") => TypeExpr::Real,
            Tok::Keyword("char") => TypeExpr::Char,
            Tok::Quote(q) => TypeExpr::Quote(q),
            Tok::Ident(n) => TypeExpr::Named(n),
            Tok::TypeParam(p) => TypeExpr::TypeParam(p),
            Tok::Sym("(") => {
                self.bump();
                let t = self.parse_type()?;
                self.expect_sym(")")?;
                return Ok(t);
            }
            Tok::Sym("[") => {
                self.bump();
                let t = self.parse_type()?;
                self.expect_sym("]")?;
                return Ok(TypeExpr::optional(t));
            }
            _ => return self.unexpected("a type"),
        };
        self.bump();
        Ok(ty)
    }

    // ----- patterns and binds -----------------------------------------

    pub(crate) fn parse_pattern(&mut self) -> PResult<Pattern> {
        match self.peek().clone() {
            Tok::Ident(n) if n == "mk_" => {
                self.bump();
                self.expect_sym("(")?;
                let ps = self.parse_pattern_list(")")?;
                Ok(Pattern::Tuple(ps))
            }
            Tok::Ident(n) if n.starts_with("mk_") && self.peek_at(1) == &Tok::Sym("(") => {
                self.bump();
                self.expect_sym("(")?;
                let ps = self.parse_pattern_list(")")?;
                Ok(Pattern::Record(n[3..].to_string(), ps))
            }
            Tok::Ident(n) => {
                self.bump();
                Ok(Pattern::Ident(n))
            }
            Tok::Sym("-") => {
                self.bump();
                match self.peek().clone() {
                    Tok::Int(i) => {
                        self.bump();
                        Ok(Pattern::Literal(Literal::Int(-i)))
                    }
                    Tok::Real(r) => {
                        self.bump();
                        Ok(Pattern::Literal(Literal::Real(-r)))
                    }
                    _ => Ok(Pattern::Ignore),
                }
            }
            Tok::Sym("[") => {
                self.bump();
                let ps = self.parse_pattern_list("]")?;
                Ok(Pattern::SeqEnum(ps))
            }
            Tok::Sym("(") => {
                self.bump();
                let p = self.parse_pattern()?;
                self.expect_sym(")")?;
                Ok(p)
            }
            _ => match self.parse_literal()? {
                Some(l) => Ok(Pattern::Literal(l)),
                None => self.unexpected("a pattern"),
            },
        }
    }

    fn parse_pattern_list(&mut self, close: &str) -> PResult<Vec<Pattern>> {
        let mut ps = Vec::new();
        if !self.eat_sym(close) {
            loop {
                ps.push(self.parse_pattern()?);
                if !self.eat_sym(",") {
                    break;
                }
            }
            self.expect_sym(close)?;
        }
        Ok(ps)
    }

    fn parse_literal(&mut self) -> PResult<Option<Literal>> {
        let lit = match self.peek().clone() {
            Tok::Int(i) => Literal::Int(i),
            Tok::Real(r) => Literal::Real(r),
            Tok::Char(c) => Literal::Char(c),
            Tok::Str(s) => Literal::Str(s),
            Tok::Quote(q) => Literal::Quote(q),
            Tok::Keyword("true") => Literal::Bool(true),
            Tok::Keyword("false") => Literal::Bool(false),
            Tok::Keyword("nil") => Literal::Nil,
            _ => return Ok(None),
        };
        self.bump();
        Ok(Some(lit))
    }

    /// `p1, p2 : T` or `p1 in set S`, repeated with commas.
    fn parse_bind_list(&mut self) -> PResult<Vec<Bind>> {
        let mut binds = Vec::new();
        loop {
            let mut patterns = vec![self.parse_pattern()?];
            while self.eat_sym(",") {
                patterns.push(self.parse_pattern()?);
            }
            if self.eat_sym(":") {
                let ty = self.parse_type()?;
                binds.extend(patterns.into_iter().map(|pattern| Bind::Type {
                    pattern,
                    ty: ty.clone(),
                }));
            } else if self.is_kw("in") && self.peek_at(1) == &Tok::Keyword("set") {
                self.bump();
                self.bump();
                let set = self.parse_expr()?;
                binds.extend(patterns.into_iter().map(|pattern| Bind::Set {
                    pattern,
                    set: Box::new(set.clone()),
                }));
            } else {
                return self.unexpected("':' or 'in set'");
            }
            if !self.eat_sym(",") {
                break;
            }
        }
        Ok(binds)
    }

    fn parse_single_bind(&mut self) -> PResult<Bind> {
        let pattern = self.parse_pattern()?;
        if self.eat_sym(":") {
            let ty = self.parse_type()?;
            Ok(Bind::Type { pattern, ty })
        } else if self.is_kw("in") && self.peek_at(1) == &Tok::Keyword("set") {
            self.bump();
            self.bump();
            let set = self.parse_expr()?;
            Ok(Bind::Set {
                pattern,
                set: Box::new(set),
            })
        } else {
            self.unexpected("':' or 'in set'")
        }
    }

    // ----- expressions -------------------------------------------------

    pub(crate) fn parse_expr(&mut self) -> PResult<Expr> {
        let mut left = self.parse_implies()?;
        while self.is_sym("<=>") {
            let loc = self.loc();
            self.bump();
            let right = self.parse_implies()?;
            left = binary(BinaryOp::Iff, left, right, loc);
        }
        Ok(left)
    }

    fn parse_implies(&mut self) -> PResult<Expr> {
        let left = self.parse_or()?;
        if self.is_sym("=>") {
            let loc = self.loc();
            self.bump();
            let right = self.parse_implies()?;
            return Ok(binary(BinaryOp::Implies, left, right, loc));
        }
        Ok(left)
    }

    fn parse_or(&mut self) -> PResult<Expr> {
        let mut left = self.parse_and()?;
        while self.is_kw("or") {
            let loc = self.loc();
            self.bump();
            let right = self.parse_and()?;
            left = binary(BinaryOp::Or, left, right, loc);
        }
        Ok(left)
    }

    fn parse_and(&mut self) -> PResult<Expr> {
        let mut left = self.parse_not()?;
        while self.is_kw("and") {
            let loc = self.loc();
            self.bump();
            let right = self.parse_not()?;
            left = binary(BinaryOp::And, left, right, loc);
        }
        Ok(left)
    }

    fn parse_not(&mut self) -> PResult<Expr> {
        if self.is_kw("not") && !(self.peek_at(1) == &Tok::Keyword("in")) {
            let loc = self.loc();
            self.bump();
            let operand = self.parse_not()?;
            return Ok(Expr::new(
                ExprKind::Unary {
                    op: UnaryOp::Not,
                    operand: Box::new(operand),
                },
                loc,
            ));
        }
        self.parse_relation()
    }

    fn relation_op(&self) -> Option<(BinaryOp, usize)> {
        let op = match self.peek() {
            Tok::Sym("=") => BinaryOp::Eq,
            Tok::Sym("<>") => BinaryOp::Ne,
            Tok::Sym("<") => BinaryOp::Lt,
            Tok::Sym("<=") => BinaryOp::Le,
            Tok::Sym(">") => BinaryOp::Gt,
            Tok::Sym(">=") => BinaryOp::Ge,
            Tok::Keyword("subset") => BinaryOp::Subset,
            Tok::Keyword("psubset") => BinaryOp::PSubset,
            Tok::Keyword("in") if self.peek_at(1) == &Tok::Keyword("set") => {
                return Some((BinaryOp::InSet, 2))
            }
            Tok::Keyword("not")
                if self.peek_at(1) == &Tok::Keyword("in") && self.peek_at(2) == &Tok::Keyword("set") =>
            {
                return Some((BinaryOp::NotInSet, 3))
            }
            _ => return None,
        };
        Some((op, 1))
    }

    fn parse_relation(&mut self) -> PResult<Expr> {
        let left = self.parse_additive()?;
        if let Some((op, n)) = self.relation_op() {
            let loc = self.loc();
            for _ in 0..n {
                self.bump();
            }
            let right = self.parse_additive()?;
            return Ok(binary(op, left, right, loc));
        }
        Ok(left)
    }

    fn parse_additive(&mut self) -> PResult<Expr> {
        let mut left = self.parse_multiplicative()?;
        loop {
            let op = match self.peek() {
                Tok::Sym("+") => BinaryOp::Add,
                Tok::Sym("-") => BinaryOp::Sub,
                Tok::Sym("\\") => BinaryOp::Diff,
                Tok::Sym("^") => BinaryOp::Concat,
                Tok::Sym("++") => BinaryOp::Override,
                Tok::Keyword("union") => BinaryOp::Union,
                Tok::Keyword("munion") => BinaryOp::Munion,
                _ => return Ok(left),
            };
            let loc = self.loc();
            self.bump();
            let right = self.parse_multiplicative()?;
            left = binary(op, left, right, loc);
        }
    }

    fn parse_multiplicative(&mut self) -> PResult<Expr> {
        let mut left = self.parse_unary()?;
        loop {
            let op = match self.peek() {
                Tok::Sym("*") => BinaryOp::Mul,
                Tok::Sym("/") => BinaryOp::Div,
                Tok::Keyword("div") => BinaryOp::IntDiv,
                Tok::Keyword("mod") => BinaryOp::Mod,
                Tok::Keyword("rem") => BinaryOp::Rem,
                Tok::Keyword("inter") => BinaryOp::Inter,
                _ => return Ok(left),
            };
            let loc = self.loc();
            self.bump();
            let right = self.parse_unary()?;
            left = binary(op, left, right, loc);
        }
    }

    fn parse_unary(&mut self) -> PResult<Expr> {
        let op = match self.peek() {
            Tok::Sym("-") => Some(UnaryOp::Neg),
            Tok::Keyword("abs") => Some(UnaryOp::Abs),
            Tok::Keyword("floor") => Some(UnaryOp::Floor),
            Tok::Keyword("hd") => Some(UnaryOp::Hd),
            Tok::Keyword("tl") => Some(UnaryOp::Tl),
            Tok::Keyword("len") => Some(UnaryOp::Len),
            Tok::Keyword("elems") => Some(UnaryOp::Elems),
            Tok::Keyword("inds") => Some(UnaryOp::Inds),
            Tok::Keyword("card") => Some(UnaryOp::Card),
            Tok::Keyword("dom") => Some(UnaryOp::Dom),
            Tok::Keyword("rng") => Some(UnaryOp::Rng),
            Tok::Keyword("power") => Some(UnaryOp::Power),
            Tok::Keyword("dunion") => Some(UnaryOp::Dunion),
            Tok::Keyword("dinter") => Some(UnaryOp::Dinter),
            _ => None,
        };
        if let Some(op) = op {
            let loc = self.loc();
            self.bump();
            let operand = self.parse_unary()?;
            return Ok(Expr::new(
                ExprKind::Unary {
                    op,
                    operand: Box::new(operand),
                },
                loc,
            ));
        }
        self.parse_postfix()
    }

    fn parse_postfix(&mut self) -> PResult<Expr> {
        let mut expr = self.parse_primary()?;
        loop {
            if self.is_sym("(") {
                self.bump();
                let args = self.parse_expr_list(")")?;
                let loc = expr.loc.clone();
                expr = Expr::new(
                    ExprKind::Apply {
                        callee: Box::new(expr),
                        args,
                    },
                    loc,
                );
            } else if self.is_sym(".") {
                let loc = self.loc();
                self.bump();
                let field = self.expect_ident()?;
                expr = Expr::new(
                    ExprKind::Field {
                        record: Box::new(expr),
                        field,
                    },
                    loc,
                );
            } else if self.is_sym(".#") {
                let loc = self.loc();
                self.bump();
                let index = match self.peek().clone() {
                    Tok::Int(i) => {
                        self.bump();
                        usize::try_from(i).ok().filter(|i| *i >= 1)
                    }
                    _ => None,
                };
                let Some(index) = index else {
                    return self.unexpected("a tuple index");
                };
                expr = Expr::new(
                    ExprKind::TupleSelect {
                        tuple: Box::new(expr),
                        index,
                    },
                    loc,
                );
            } else {
                return Ok(expr);
            }
        }
    }

    fn parse_expr_list(&mut self, close: &str) -> PResult<Vec<Expr>> {
        let mut es = Vec::new();
        if !self.eat_sym(close) {
            loop {
                es.push(self.parse_expr()?);
                if !self.eat_sym(",") {
                    break;
                }
            }
            self.expect_sym(close)?;
        }
        Ok(es)
    }

    fn parse_primary(&mut self) -> PResult<Expr> {
        let loc = self.loc();
        if let Some(lit) = self.parse_literal()? {
            return Ok(Expr::new(ExprKind::Literal(lit), loc));
        }
        match self.peek().clone() {
            Tok::Ident(n) if n == "mk_" => {
                self.bump();
                self.expect_sym("(")?;
                let fields = self.parse_expr_list(")")?;
                if fields.len() < 2 {
                    return Err(ParseError {
                        loc,
                        message: "a tuple needs at least two fields".into(),
                    });
                }
                Ok(Expr::new(ExprKind::Tuple(fields), loc))
            }
            Tok::Ident(n) if n.starts_with("mk_") && self.peek_at(1) == &Tok::Sym("(") => {
                self.bump();
                self.expect_sym("(")?;
                let fields = self.parse_expr_list(")")?;
                Ok(Expr::new(
                    ExprKind::Record {
                        name: n[3..].to_string(),
                        fields,
                    },
                    loc,
                ))
            }
            Tok::Ident(n) if n == "is_" && self.peek_at(1) == &Tok::Sym("(") => {
                self.bump();
                self.bump();
                let expr = self.parse_expr()?;
                self.expect_sym(",")?;
                let ty = self.parse_type()?;
                self.expect_sym(")")?;
                Ok(Expr::new(
                    ExprKind::IsType {
                        expr: Box::new(expr),
                        ty,
                    },
                    loc,
                ))
            }
            Tok::Ident(n) => {
                self.bump();
                if self.is_sym("[") {
                    self.bump();
                    let mut type_args = vec![self.parse_type()?];
                    while self.eat_sym(",") {
                        type_args.push(self.parse_type()?);
                    }
                    self.expect_sym("]")?;
                    return Ok(Expr::new(ExprKind::Instantiate { name: n, type_args }, loc));
                }
                Ok(Expr::new(ExprKind::Name(n), loc))
            }
            Tok::Sym("(") => {
                self.bump();
                let mut e = self.parse_expr()?;
                self.expect_sym(")")?;
                e.loc = loc;
                Ok(e)
            }
            Tok::Keyword("if") => self.parse_if(),
            Tok::Keyword("cases") => self.parse_cases(),
            Tok::Keyword("let") => self.parse_let(),
            Tok::Keyword("forall") | Tok::Keyword("exists") => {
                let is_forall = self.is_kw("forall");
                self.bump();
                let binds = self.parse_bind_list()?;
                self.expect_sym("&")?;
                let body = Box::new(self.parse_expr()?);
                let kind = if is_forall {
                    ExprKind::Forall { binds, body }
                } else {
                    ExprKind::Exists { binds, body }
                };
                Ok(Expr::new(kind, loc))
            }
            Tok::Sym("{") => self.parse_brace(),
            Tok::Sym("[") => self.parse_bracket(),
            _ => self.unexpected("an expression"),
        }
    }

    fn parse_if(&mut self) -> PResult<Expr> {
        let loc = self.loc();
        self.expect_kw("if")?;
        let cond = self.parse_expr()?;
        self.expect_kw("then")?;
        let then = self.parse_expr()?;
        let mut elifs = Vec::new();
        while self.eat_kw("elseif") {
            let c = self.parse_expr()?;
            self.expect_kw("then")?;
            let e = self.parse_expr()?;
            elifs.push((c, e));
        }
        self.expect_kw("else")?;
        let otherwise = self.parse_expr()?;
        Ok(Expr::new(
            ExprKind::If {
                cond: Box::new(cond),
                then: Box::new(then),
                elifs,
                otherwise: Box::new(otherwise),
            },
            loc,
        ))
    }

    fn parse_cases(&mut self) -> PResult<Expr> {
        let loc = self.loc();
        self.expect_kw("cases")?;
        let scrutinee = self.parse_expr()?;
        self.expect_sym(":")?;
        let mut alts = Vec::new();
        let mut others = None;
        loop {
            if self.eat_kw("others") {
                self.expect_sym("->")?;
                others = Some(Box::new(self.parse_expr()?));
                break;
            }
            let mut patterns = vec![self.parse_pattern()?];
            while self.eat_sym(",") {
                patterns.push(self.parse_pattern()?);
            }
            self.expect_sym("->")?;
            let body = self.parse_expr()?;
            alts.push(CaseAlt { patterns, body });
            if !self.eat_sym(",") {
                break;
            }
        }
        self.expect_kw("end")?;
        Ok(Expr::new(
            ExprKind::Cases {
                scrutinee: Box::new(scrutinee),
                alts,
                others,
            },
            loc,
        ))
    }

    fn parse_let(&mut self) -> PResult<Expr> {
        let loc = self.loc();
        self.expect_kw("let")?;
        let save = self.pos;
        let pattern = self.parse_pattern()?;
        if self.is_sym("=") {
            self.bump();
            let mut defs = vec![(pattern, self.parse_expr()?)];
            while self.eat_sym(",") {
                let p = self.parse_pattern()?;
                self.expect_sym("=")?;
                defs.push((p, self.parse_expr()?));
            }
            self.expect_kw("in")?;
            let body = self.parse_expr()?;
            return Ok(Expr::new(
                ExprKind::Let {
                    defs,
                    body: Box::new(body),
                },
                loc,
            ));
        }
        self.pos = save;
        let bind = self.parse_single_bind()?;
        self.expect_kw("be")?;
        self.expect_kw("st")?;
        let st = self.parse_expr()?;
        self.expect_kw("in")?;
        let body = self.parse_expr()?;
        Ok(Expr::new(
            ExprKind::LetBe {
                bind,
                st: Some(Box::new(st)),
                body: Box::new(body),
            },
            loc,
        ))
    }

    fn parse_brace(&mut self) -> PResult<Expr> {
        let loc = self.loc();
        self.expect_sym("{")?;
        if self.eat_sym("}") {
            return Ok(Expr::new(ExprKind::SetEnum(Vec::new()), loc));
        }
        if self.eat_sym("|->") {
            self.expect_sym("}")?;
            return Ok(Expr::new(ExprKind::MapEnum(Vec::new()), loc));
        }
        let first = self.parse_expr()?;
        if self.eat_sym("|->") {
            let mut pairs = vec![(first, self.parse_expr()?)];
            while self.eat_sym(",") {
                let k = self.parse_expr()?;
                self.expect_sym("|->")?;
                pairs.push((k, self.parse_expr()?));
            }
            self.expect_sym("}")?;
            return Ok(Expr::new(ExprKind::MapEnum(pairs), loc));
        }
        if self.eat_sym("|") {
            let binds = self.parse_bind_list()?;
            let pred = if self.eat_sym("&") {
                Some(Box::new(self.parse_expr()?))
            } else {
                None
            };
            self.expect_sym("}")?;
            return Ok(Expr::new(
                ExprKind::SetComp {
                    elem: Box::new(first),
                    binds,
                    pred,
                },
                loc,
            ));
        }
        if self.is_sym(",") && self.peek_at(1) == &Tok::Sym("...") {
            self.bump();
            self.bump();
            self.expect_sym(",")?;
            let last = self.parse_expr()?;
            self.expect_sym("}")?;
            return Ok(Expr::new(ExprKind::SetRange(Box::new(first), Box::new(last)), loc));
        }
        let mut elems = vec![first];
        while self.eat_sym(",") {
            elems.push(self.parse_expr()?);
        }
        self.expect_sym("}")?;
        Ok(Expr::new(ExprKind::SetEnum(elems), loc))
    }

    fn parse_bracket(&mut self) -> PResult<Expr> {
        let loc = self.loc();
        self.expect_sym("[")?;
        if self.eat_sym("]") {
            return Ok(Expr::new(ExprKind::SeqEnum(Vec::new()), loc));
        }
        let first = self.parse_expr()?;
        if self.eat_sym("|") {
            let bind = self.parse_single_bind()?;
            let pred = if self.eat_sym("&") {
                Some(Box::new(self.parse_expr()?))
            } else {
                None
            };
            self.expect_sym("]")?;
            return Ok(Expr::new(
                ExprKind::SeqComp {
                    elem: Box::new(first),
                    bind: Box::new(bind),
                    pred,
                },
                loc,
            ));
        }
        let mut elems = vec![first];
        while self.eat_sym(",") {
            elems.push(self.parse_expr()?);
        }
        self.expect_sym("]")?;
        Ok(Expr::new(ExprKind::SeqEnum(elems), loc))
    }
}

fn binary(op: BinaryOp, left: Expr, right: Expr, loc: Location) -> Expr {
    Expr::new(
        ExprKind::Binary {
            op,
            left: Box::new(left),
            right: Box::new(right),
        },
        loc,
    )
}

/// Integer literal helper used by generated expressions.
pub(crate) fn int_literal(n: i64, loc: Location) -> Expr {
    Expr::new(ExprKind::Literal(Literal::Int(BigInt::from(n))), loc)
}
