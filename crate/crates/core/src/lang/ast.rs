//! Abstract syntax for the specification language.
//!
//! Every expression node carries a [`Location`]. Equality on [`Expr`] is
//! structural and ignores locations, which is what the trivial strategy and
//! the parser round-trip tests rely on.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

/// A source position: file, 1-based line and 1-based column.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Location {
    pub file: Arc<str>,
    pub line: u32,
    pub col: u32,
}

impl Location {
    pub fn new(file: &Arc<str>, line: u32, col: u32) -> Self {
        Location {
            file: Arc::clone(file),
            line,
            col,
        }
    }

    /// A location for synthesised nodes that have no source text.
    pub fn synthetic() -> Self {
        Location {
            file: Arc::from("<generated>"),
            line: 0,
            col: 0,
        }
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at line {}:{}", self.file, self.line, self.col)
    }
}

/// Type expressions.
///
/// `Any` never appears in source text. The checker uses it for the element
/// type of empty collections and for `nil`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TypeExpr {
    Bool,
    Nat,
    Nat1,
    Int,
    Real,
    Char,
    Quote(String),
    Seq(Box<TypeExpr>),
    Set(Box<TypeExpr>),
    Map(Box<TypeExpr>, Box<TypeExpr>),
    Product(Vec<TypeExpr>),
    Optional(Box<TypeExpr>),
    Union(Vec<TypeExpr>),
    Named(String),
    TypeParam(String),
    Any,
}

impl TypeExpr {
    pub fn seq(elem: TypeExpr) -> Self {
        TypeExpr::Seq(Box::new(elem))
    }

    pub fn set(elem: TypeExpr) -> Self {
        TypeExpr::Set(Box::new(elem))
    }

    pub fn map(dom: TypeExpr, rng: TypeExpr) -> Self {
        TypeExpr::Map(Box::new(dom), Box::new(rng))
    }

    pub fn optional(inner: TypeExpr) -> Self {
        TypeExpr::Optional(Box::new(inner))
    }

    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            TypeExpr::Nat | TypeExpr::Nat1 | TypeExpr::Int | TypeExpr::Real
        )
    }

    /// True if a `@T` parameter occurs anywhere inside.
    pub fn has_type_params(&self) -> bool {
        match self {
            TypeExpr::TypeParam(_) => true,
            TypeExpr::Seq(t) | TypeExpr::Set(t) | TypeExpr::Optional(t) => t.has_type_params(),
            TypeExpr::Map(d, r) => d.has_type_params() || r.has_type_params(),
            TypeExpr::Product(ts) | TypeExpr::Union(ts) => ts.iter().any(|t| t.has_type_params()),
            _ => false,
        }
    }

    /// Replaces `@T` parameters using `lookup`; unknown parameters are kept.
    pub fn substitute(&self, lookup: &dyn Fn(&str) -> Option<TypeExpr>) -> TypeExpr {
        match self {
            TypeExpr::TypeParam(name) => lookup(name).unwrap_or_else(|| self.clone()),
            TypeExpr::Seq(t) => TypeExpr::seq(t.substitute(lookup)),
            TypeExpr::Set(t) => TypeExpr::set(t.substitute(lookup)),
            TypeExpr::Optional(t) => TypeExpr::optional(t.substitute(lookup)),
            TypeExpr::Map(d, r) => TypeExpr::map(d.substitute(lookup), r.substitute(lookup)),
            TypeExpr::Product(ts) => {
                TypeExpr::Product(ts.iter().map(|t| t.substitute(lookup)).collect())
            }
            TypeExpr::Union(ts) => TypeExpr::Union(ts.iter().map(|t| t.substitute(lookup)).collect()),
            other => other.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Literal {
    Bool(bool),
    Int(BigInt),
    /// Decimal literals are kept exact.
    Real(BigRational),
    Char(char),
    Quote(String),
    Str(String),
    Nil,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pattern {
    Ident(String),
    /// The don't-care pattern `-`.
    Ignore,
    Literal(Literal),
    Tuple(Vec<Pattern>),
    Record(String, Vec<Pattern>),
    SeqEnum(Vec<Pattern>),
}

impl Pattern {
    /// Identifiers bound by the pattern, left to right.
    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Pattern::Ident(n) => {
                if !out.contains(n) {
                    out.push(n.clone())
                }
            }
            Pattern::Tuple(ps) | Pattern::Record(_, ps) | Pattern::SeqEnum(ps) => {
                ps.iter().for_each(|p| p.collect_vars(out))
            }
            Pattern::Ignore | Pattern::Literal(_) => {}
        }
    }

    /// Identifier and don't-care patterns match every value.
    pub fn is_irrefutable(&self) -> bool {
        matches!(self, Pattern::Ident(_) | Pattern::Ignore)
    }
}

/// A quantifier or comprehension bind.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bind {
    Type { pattern: Pattern, ty: TypeExpr },
    Set { pattern: Pattern, set: Box<Expr> },
}

impl Bind {
    pub fn pattern(&self) -> &Pattern {
        match self {
            Bind::Type { pattern, .. } | Bind::Set { pattern, .. } => pattern,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Not,
    Neg,
    Abs,
    Floor,
    Hd,
    Tl,
    Len,
    Elems,
    Inds,
    Card,
    Dom,
    Rng,
    Power,
    Dunion,
    Dinter,
}

impl UnaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            UnaryOp::Not => "not",
            UnaryOp::Neg => "-",
            UnaryOp::Abs => "abs",
            UnaryOp::Floor => "floor",
            UnaryOp::Hd => "hd",
            UnaryOp::Tl => "tl",
            UnaryOp::Len => "len",
            UnaryOp::Elems => "elems",
            UnaryOp::Inds => "inds",
            UnaryOp::Card => "card",
            UnaryOp::Dom => "dom",
            UnaryOp::Rng => "rng",
            UnaryOp::Power => "power",
            UnaryOp::Dunion => "dunion",
            UnaryOp::Dinter => "dinter",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    IntDiv,
    Mod,
    Rem,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
    Implies,
    Iff,
    InSet,
    NotInSet,
    Union,
    Inter,
    Diff,
    Concat,
    Override,
    Munion,
    Subset,
    PSubset,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::IntDiv => "div",
            BinaryOp::Mod => "mod",
            BinaryOp::Rem => "rem",
            BinaryOp::Eq => "=",
            BinaryOp::Ne => "<>",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::And => "and",
            BinaryOp::Or => "or",
            BinaryOp::Implies => "=>",
            BinaryOp::Iff => "<=>",
            BinaryOp::InSet => "in set",
            BinaryOp::NotInSet => "not in set",
            BinaryOp::Union => "union",
            BinaryOp::Inter => "inter",
            BinaryOp::Diff => "\\",
            BinaryOp::Concat => "^",
            BinaryOp::Override => "++",
            BinaryOp::Munion => "munion",
            BinaryOp::Subset => "subset",
            BinaryOp::PSubset => "psubset",
        }
    }

    /// Binding strength, higher binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinaryOp::Iff => 1,
            BinaryOp::Implies => 2,
            BinaryOp::Or => 3,
            BinaryOp::And => 4,
            BinaryOp::Eq
            | BinaryOp::Ne
            | BinaryOp::Lt
            | BinaryOp::Le
            | BinaryOp::Gt
            | BinaryOp::Ge
            | BinaryOp::InSet
            | BinaryOp::NotInSet
            | BinaryOp::Subset
            | BinaryOp::PSubset => 6,
            BinaryOp::Add
            | BinaryOp::Sub
            | BinaryOp::Union
            | BinaryOp::Diff
            | BinaryOp::Concat
            | BinaryOp::Override
            | BinaryOp::Munion => 7,
            BinaryOp::Mul
            | BinaryOp::Div
            | BinaryOp::IntDiv
            | BinaryOp::Mod
            | BinaryOp::Rem
            | BinaryOp::Inter => 8,
        }
    }

    pub fn is_relational(self) -> bool {
        self.precedence() == 6
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseAlt {
    pub patterns: Vec<Pattern>,
    pub body: Expr,
}

#[derive(Clone, Debug)]
pub struct Expr {
    pub kind: ExprKind,
    pub loc: Location,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Eq for Expr {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprKind {
    Literal(Literal),
    Name(String),
    /// Explicit instantiation of a polymorphic function: `f[nat]`.
    Instantiate {
        name: String,
        type_args: Vec<TypeExpr>,
    },
    Unary {
        op: UnaryOp,
        operand: Box<Expr>,
    },
    Binary {
        op: BinaryOp,
        left: Box<Expr>,
        right: Box<Expr>,
    },
    If {
        cond: Box<Expr>,
        then: Box<Expr>,
        elifs: Vec<(Expr, Expr)>,
        otherwise: Box<Expr>,
    },
    Cases {
        scrutinee: Box<Expr>,
        alts: Vec<CaseAlt>,
        others: Option<Box<Expr>>,
    },
    Let {
        defs: Vec<(Pattern, Expr)>,
        body: Box<Expr>,
    },
    LetBe {
        bind: Bind,
        st: Option<Box<Expr>>,
        body: Box<Expr>,
    },
    Forall {
        binds: Vec<Bind>,
        body: Box<Expr>,
    },
    Exists {
        binds: Vec<Bind>,
        body: Box<Expr>,
    },
    Apply {
        callee: Box<Expr>,
        args: Vec<Expr>,
    },
    SetEnum(Vec<Expr>),
    SetRange(Box<Expr>, Box<Expr>),
    SetComp {
        elem: Box<Expr>,
        binds: Vec<Bind>,
        pred: Option<Box<Expr>>,
    },
    SeqEnum(Vec<Expr>),
    SeqComp {
        elem: Box<Expr>,
        bind: Box<Bind>,
        pred: Option<Box<Expr>>,
    },
    MapEnum(Vec<(Expr, Expr)>),
    Tuple(Vec<Expr>),
    Record {
        name: String,
        fields: Vec<Expr>,
    },
    Field {
        record: Box<Expr>,
        field: String,
    },
    TupleSelect {
        tuple: Box<Expr>,
        index: usize,
    },
    IsType {
        expr: Box<Expr>,
        ty: TypeExpr,
    },
}

impl Expr {
    pub fn new(kind: ExprKind, loc: Location) -> Self {
        Expr { kind, loc }
    }

    pub fn name(name: impl Into<String>, loc: Location) -> Self {
        Expr::new(ExprKind::Name(name.into()), loc)
    }

    pub fn bool(b: bool, loc: Location) -> Self {
        Expr::new(ExprKind::Literal(Literal::Bool(b)), loc)
    }

    pub fn binary(op: BinaryOp, left: Expr, right: Expr) -> Self {
        let loc = left.loc.clone();
        Expr::new(
            ExprKind::Binary {
                op,
                left: Box::new(left),
                right: Box::new(right),
            },
            loc,
        )
    }

    pub fn unary(op: UnaryOp, operand: Expr) -> Self {
        let loc = operand.loc.clone();
        Expr::new(
            ExprKind::Unary {
                op,
                operand: Box::new(operand),
            },
            loc,
        )
    }

    pub fn call(name: impl Into<String>, args: Vec<Expr>, loc: Location) -> Self {
        let callee = Expr::name(name, loc.clone());
        Expr::new(
            ExprKind::Apply {
                callee: Box::new(callee),
                args,
            },
            loc,
        )
    }

    pub fn is_literal_bool(&self, value: bool) -> bool {
        matches!(self.kind, ExprKind::Literal(Literal::Bool(b)) if b == value)
    }

    /// Direct children in left-to-right source order.
    pub fn children(&self) -> Vec<&Expr> {
        fn bind_exprs<'a>(binds: &'a [Bind], out: &mut Vec<&'a Expr>) {
            for b in binds {
                if let Bind::Set { set, .. } = b {
                    out.push(set);
                }
            }
        }
        let mut out = Vec::new();
        match &self.kind {
            ExprKind::Literal(_) | ExprKind::Name(_) | ExprKind::Instantiate { .. } => {}
            ExprKind::Unary { operand, .. } => out.push(&**operand),
            ExprKind::Binary { left, right, .. } => {
                out.push(&**left);
                out.push(&**right);
            }
            ExprKind::If {
                cond,
                then,
                elifs,
                otherwise,
            } => {
                out.push(&**cond);
                out.push(&**then);
                for (c, e) in elifs {
                    out.push(c);
                    out.push(e);
                }
                out.push(&**otherwise);
            }
            ExprKind::Cases {
                scrutinee,
                alts,
                others,
            } => {
                out.push(&**scrutinee);
                for a in alts {
                    out.push(&a.body);
                }
                if let Some(o) = others {
                    out.push(&**o);
                }
            }
            ExprKind::Let { defs, body } => {
                for (_, e) in defs {
                    out.push(e);
                }
                out.push(&**body);
            }
            ExprKind::LetBe { bind, st, body } => {
                bind_exprs(std::slice::from_ref(bind), &mut out);
                if let Some(s) = st {
                    out.push(&**s);
                }
                out.push(&**body);
            }
            ExprKind::Forall { binds, body } | ExprKind::Exists { binds, body } => {
                bind_exprs(binds, &mut out);
                out.push(&**body);
            }
            ExprKind::Apply { callee, args } => {
                out.push(&**callee);
                out.extend(args.iter());
            }
            ExprKind::SetEnum(es) | ExprKind::SeqEnum(es) | ExprKind::Tuple(es) => {
                out.extend(es.iter())
            }
            ExprKind::Record { fields, .. } => out.extend(fields.iter()),
            ExprKind::SetRange(a, b) => {
                out.push(&**a);
                out.push(&**b);
            }
            ExprKind::SetComp { elem, binds, pred } => {
                bind_exprs(binds, &mut out);
                out.push(&**elem);
                if let Some(p) = pred {
                    out.push(&**p);
                }
            }
            ExprKind::SeqComp { elem, bind, pred } => {
                bind_exprs(std::slice::from_ref(&**bind), &mut out);
                out.push(&**elem);
                if let Some(p) = pred {
                    out.push(&**p);
                }
            }
            ExprKind::MapEnum(pairs) => {
                for (k, v) in pairs {
                    out.push(k);
                    out.push(v);
                }
            }
            ExprKind::Field { record, .. } => out.push(&**record),
            ExprKind::TupleSelect { tuple, .. } => out.push(&**tuple),
            ExprKind::IsType { expr, .. } => out.push(&**expr),
        }
        out
    }

    /// Pre-order walk over this node and all descendants.
    pub fn walk<'a>(&'a self, visit: &mut dyn FnMut(&'a Expr)) {
        visit(self);
        for child in self.children() {
            child.walk(visit);
        }
    }

    /// Type binds of every quantifier in this expression, outermost first.
    pub fn type_binds(&self) -> Vec<(Pattern, TypeExpr)> {
        let mut out = Vec::new();
        self.walk(&mut |e| {
            let binds = match &e.kind {
                ExprKind::Forall { binds, .. } | ExprKind::Exists { binds, .. } => binds.as_slice(),
                ExprKind::LetBe { bind, .. } => std::slice::from_ref(bind),
                _ => &[],
            };
            for b in binds {
                if let Bind::Type { pattern, ty } = b {
                    out.push((pattern.clone(), ty.clone()));
                }
            }
        });
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TypeBody {
    Alias(TypeExpr),
    Record(Vec<(String, TypeExpr)>),
}

#[derive(Clone, Debug)]
pub struct TypeDef {
    pub name: String,
    pub body: TypeBody,
    pub invariant: Option<(Pattern, Expr)>,
    pub loc: Location,
}

impl TypeDef {
    /// The representation type: the alias target, or `Named(name)` for records.
    pub fn underlying(&self) -> TypeExpr {
        match &self.body {
            TypeBody::Alias(t) => t.clone(),
            TypeBody::Record(_) => TypeExpr::Named(self.name.clone()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FunctionDef {
    pub name: String,
    /// Type parameter names without the `@`.
    pub type_params: Vec<String>,
    pub param_types: Vec<TypeExpr>,
    pub return_type: TypeExpr,
    pub params: Vec<Pattern>,
    pub body: Expr,
    pub pre: Option<Expr>,
    pub post: Option<Expr>,
    pub loc: Location,
}

#[derive(Clone, Debug)]
pub struct ValueDef {
    pub name: String,
    pub ty: Option<TypeExpr>,
    pub value: Expr,
    pub loc: Location,
}

#[derive(Clone, Debug)]
pub struct StateDef {
    pub name: String,
    pub fields: Vec<(String, TypeExpr)>,
    pub invariant: Option<(Pattern, Expr)>,
    pub init: Option<(Pattern, Expr)>,
    pub loc: Location,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuickCheckAnnotation {
    pub function: String,
    /// Parameter name without the `@`.
    pub param: String,
    pub candidates: Vec<TypeExpr>,
}

/// A parsed (and, after [`crate::lang::check_module`], checked) specification.
#[derive(Clone, Debug, Default)]
pub struct SpecModule {
    pub name: String,
    pub types: Vec<TypeDef>,
    pub functions: Vec<FunctionDef>,
    pub values: Vec<ValueDef>,
    pub state: Option<StateDef>,
    pub annotations: Vec<QuickCheckAnnotation>,
    /// Non-fatal diagnostics, such as malformed annotations.
    pub warnings: Vec<String>,
    /// Source text per file, used to echo offending lines in error reports.
    pub sources: Vec<(Arc<str>, Arc<str>)>,
    pub checked: bool,
}

impl SpecModule {
    pub fn function(&self, name: &str) -> Option<&FunctionDef> {
        self.functions.iter().find(|f| f.name == name)
    }

    pub fn type_def(&self, name: &str) -> Option<&TypeDef> {
        self.types.iter().find(|t| t.name == name)
    }

    pub fn value_def(&self, name: &str) -> Option<&ValueDef> {
        self.values.iter().find(|v| v.name == name)
    }

    pub fn state_field(&self, name: &str) -> Option<&TypeExpr> {
        self.state
            .as_ref()
            .and_then(|s| s.fields.iter().find(|(n, _)| n == name).map(|(_, t)| t))
    }

    /// Line `line` (1-based) of `file`, if the source is known.
    pub fn source_line(&self, file: &str, line: u32) -> Option<&str> {
        let (_, text) = self.sources.iter().find(|(f, _)| &**f == file)?;
        text.lines().nth(line.checked_sub(1)? as usize)
    }

    pub fn annotations_for<'a>(&'a self, function: &'a str) -> impl Iterator<Item = &'a QuickCheckAnnotation> + 'a {
        self.annotations.iter().filter(move |a| a.function == function)
    }

    /// Merges another parsed file into this module.
    pub fn absorb(&mut self, other: SpecModule) {
        self.types.extend(other.types);
        self.functions.extend(other.functions);
        self.values.extend(other.values);
        if self.state.is_none() {
            self.state = other.state;
        }
        self.annotations.extend(other.annotations);
        self.warnings.extend(other.warnings);
        self.sources.extend(other.sources);
        self.checked = false;
    }
}
