//! Pretty printing for types, patterns, expressions and whole modules.
//!
//! Two expression styles exist. `Display` prints with the minimum number of
//! parentheses and is what obligation bodies and `print` use.
//! [`to_vdm_string`] brackets every compound operator application, which is
//! the form guards and trivial-strategy reasons are rendered in.

use std::fmt::{self, Write as _};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::ast::*;

impl fmt::Display for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn nested(t: &TypeExpr) -> String {
            match t {
                TypeExpr::Product(_) | TypeExpr::Union(_) | TypeExpr::TypeParam(_) => format!("({t})"),
                _ => t.to_string(),
            }
        }
        match self {
            TypeExpr::Bool => f.write_str("bool"),
            TypeExpr::Nat => f.write_str("nat"),
            TypeExpr::Nat1 => f.write_str("nat1"),
            TypeExpr::Int => f.write_str("int"),
            TypeExpr::Real => f.write_str("real"),
            TypeExpr::Char => f.write_str("char"),
            TypeExpr::Quote(q) => write!(f, "<{q}>"),
            TypeExpr::Seq(t) => write!(f, "seq of {}", nested(t)),
            TypeExpr::Set(t) => write!(f, "set of {}", nested(t)),
            TypeExpr::Map(d, r) => write!(f, "map {} to {}", nested(d), nested(r)),
            TypeExpr::Product(ts) => {
                let parts: Vec<String> = ts
                    .iter()
                    .map(|t| match t {
                        TypeExpr::Product(_) | TypeExpr::Union(_) => format!("({t})"),
                        _ => t.to_string(),
                    })
                    .collect();
                f.write_str(&parts.join(" * "))
            }
            TypeExpr::Optional(t) => write!(f, "[{t}]"),
            TypeExpr::Union(ts) => {
                let parts: Vec<String> = ts
                    .iter()
                    .map(|t| match t {
                        TypeExpr::Union(_) => format!("({t})"),
                        _ => t.to_string(),
                    })
                    .collect();
                f.write_str(&parts.join(" | "))
            }
            TypeExpr::Named(n) => f.write_str(n),
            TypeExpr::TypeParam(p) => write!(f, "@{p}"),
            TypeExpr::Any => f.write_str("?"),
        }
    }
}

impl TypeExpr {
    /// Fully bracketed rendering used for type-parameter assignments,
    /// e.g. `set of (nat)`.
    pub fn explicit(&self) -> String {
        match self {
            TypeExpr::Seq(t) => format!("seq of ({})", t.explicit()),
            TypeExpr::Set(t) => format!("set of ({})", t.explicit()),
            TypeExpr::Map(d, r) => format!("map ({}) to ({})", d.explicit(), r.explicit()),
            TypeExpr::Product(ts) => {
                let parts: Vec<String> = ts.iter().map(|t| t.explicit()).collect();
                format!("({})", parts.join(" * "))
            }
            TypeExpr::Union(ts) => {
                let parts: Vec<String> = ts.iter().map(|t| t.explicit()).collect();
                format!("({})", parts.join(" | "))
            }
            TypeExpr::Optional(t) => format!("[{}]", t.explicit()),
            other => other.to_string(),
        }
    }
}

/// Exact decimal when the denominator has only factors 2 and 5, otherwise a
/// 16 digit approximation.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        return r.numer().to_string();
    }
    let mut denom = r.denom().clone();
    let mut digits = 0u32;
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let mut scale = BigInt::one();
    while denom.is_even() || (&denom % &five).is_zero() {
        if denom.is_even() {
            denom /= &two;
        } else {
            denom /= &five;
        }
        digits += 1;
        scale *= 10;
    }
    if !denom.is_one() {
        return r.to_f64().map(|f| format!("{f}")).unwrap_or_else(|| r.to_string());
    }
    let scaled = (r * BigRational::from_integer(scale)).to_integer();
    let neg = scaled.is_negative();
    let s = scaled.abs().to_string();
    let width = digits as usize + 1;
    let s = format!("{s:0>width$}");
    let (int_part, frac) = s.split_at(s.len() - digits as usize);
    let frac = frac.trim_end_matches('0');
    format!("{}{}.{}", if neg { "-" } else { "" }, int_part, frac)
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Bool(b) => write!(f, "{b}"),
            Literal::Int(i) => write!(f, "{i}"),
            Literal::Real(r) => f.write_str(&format_rational(r)),
            Literal::Char(c) => write!(f, "'{c}'"),
            Literal::Str(s) => write!(f, "{s:?}"),
            Literal::Quote(q) => write!(f, "<{q}>"),
            Literal::Nil => f.write_str("nil"),
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |ps: &[Pattern]| ps.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", ");
        match self {
            Pattern::Ident(n) => f.write_str(n),
            Pattern::Ignore => f.write_str("-"),
            Pattern::Literal(l) => write!(f, "{l}"),
            Pattern::Tuple(ps) => write!(f, "mk_({})", list(ps)),
            Pattern::Record(n, ps) => write!(f, "mk_{n}({})", list(ps)),
            Pattern::SeqEnum(ps) => write!(f, "[{}]", list(ps)),
        }
    }
}

fn bind_text(b: &Bind, style: Style) -> String {
    match b {
        Bind::Type { pattern, ty } => format!("{pattern}:{ty}"),
        Bind::Set { pattern, set } => format!("{pattern} in set {}", render(set, style)),
    }
}

pub(crate) fn binds_text(binds: &[Bind], style: Style) -> String {
    binds.iter().map(|b| bind_text(b, style)).collect::<Vec<_>>().join(", ")
}

impl fmt::Display for Bind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&bind_text(self, Style::Minimal))
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub(crate) enum Style {
    Minimal,
    Bracketed,
}

const PREC_OPEN: u8 = 0;
const PREC_NOT: u8 = 5;
const PREC_UNARY: u8 = 9;
const PREC_POSTFIX: u8 = 10;

fn precedence(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Binary { op, .. } => op.precedence(),
        ExprKind::Unary { op: UnaryOp::Not, .. } => PREC_NOT,
        ExprKind::Unary { .. } => PREC_UNARY,
        ExprKind::If { .. }
        | ExprKind::Let { .. }
        | ExprKind::LetBe { .. }
        | ExprKind::Forall { .. }
        | ExprKind::Exists { .. } => PREC_OPEN,
        ExprKind::Literal(Literal::Int(i)) if i.is_negative() => PREC_UNARY,
        ExprKind::Literal(Literal::Real(r)) if r.is_negative() => PREC_UNARY,
        _ => PREC_POSTFIX,
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self, Style::Minimal))
    }
}

/// Renders with every operator application bracketed.
pub fn to_vdm_string(e: &Expr) -> String {
    render(e, Style::Bracketed)
}

pub(crate) fn render(e: &Expr, style: Style) -> String {
    let mut out = String::new();
    write_expr(&mut out, e, style);
    out
}

fn wrap(out: &mut String, e: &Expr, style: Style, needs: bool) {
    if needs {
        out.push('(');
        write_expr(out, e, style);
        out.push(')');
    } else {
        write_expr(out, e, style);
    }
}

fn write_list(out: &mut String, es: &[Expr], style: Style) {
    for (i, e) in es.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_expr(out, e, style);
    }
}

fn write_expr(out: &mut String, e: &Expr, style: Style) {
    let bracketed = style == Style::Bracketed;
    match &e.kind {
        ExprKind::Literal(l) => {
            let _ = write!(out, "{l}");
        }
        ExprKind::Name(n) => out.push_str(n),
        ExprKind::Instantiate { name, type_args } => {
            let args: Vec<String> = type_args.iter().map(|t| t.to_string()).collect();
            let _ = write!(out, "{name}[{}]", args.join(", "));
        }
        ExprKind::Unary { op, operand } => {
            if bracketed {
                out.push('(');
            }
            if *op == UnaryOp::Neg {
                out.push('-');
                let needs = !bracketed
                    && !matches!(
                        operand.kind,
                        ExprKind::Name(_) | ExprKind::Apply { .. }
                    )
                    && !matches!(&operand.kind, ExprKind::Literal(l) if !is_negative_literal(l));
                wrap(out, operand, style, needs);
            } else {
                out.push_str(op.symbol());
                out.push(' ');
                let min = if *op == UnaryOp::Not { PREC_NOT } else { PREC_UNARY };
                wrap(out, operand, style, !bracketed && precedence(operand) < min);
            }
            if bracketed {
                out.push(')');
            }
        }
        ExprKind::Binary { op, left, right } => {
            let p = op.precedence();
            let right_assoc = *op == BinaryOp::Implies;
            let non_assoc = op.is_relational();
            let lp = precedence(left);
            let rp = precedence(right);
            let left_needs = lp < p || (lp == p && (right_assoc || non_assoc)) || lp == PREC_OPEN;
            let right_needs = rp < p || (rp == p && (!right_assoc || non_assoc));
            if bracketed {
                out.push('(');
            }
            wrap(out, left, style, !bracketed && left_needs);
            let _ = write!(out, " {} ", op.symbol());
            wrap(out, right, style, !bracketed && right_needs);
            if bracketed {
                out.push(')');
            }
        }
        ExprKind::If {
            cond,
            then,
            elifs,
            otherwise,
        } => {
            if bracketed {
                out.push('(');
            }
            out.push_str("if ");
            write_expr(out, cond, style);
            out.push_str(" then ");
            write_expr(out, then, style);
            for (c, b) in elifs {
                out.push_str(" elseif ");
                write_expr(out, c, style);
                out.push_str(" then ");
                write_expr(out, b, style);
            }
            out.push_str(" else ");
            write_expr(out, otherwise, style);
            if bracketed {
                out.push(')');
            }
        }
        ExprKind::Cases {
            scrutinee,
            alts,
            others,
        } => {
            out.push_str("cases ");
            write_expr(out, scrutinee, style);
            out.push_str(": ");
            for (i, alt) in alts.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                let ps: Vec<String> = alt.patterns.iter().map(|p| p.to_string()).collect();
                out.push_str(&ps.join(", "));
                out.push_str(" -> ");
                write_expr(out, &alt.body, style);
            }
            if let Some(o) = others {
                if !alts.is_empty() {
                    out.push_str(", ");
                }
                out.push_str("others -> ");
                write_expr(out, o, style);
            }
            out.push_str(" end");
        }
        ExprKind::Let { defs, body } => {
            if bracketed {
                out.push('(');
            }
            out.push_str("let ");
            for (i, (p, v)) in defs.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "{p} = ");
                write_expr(out, v, style);
            }
            out.push_str(" in ");
            write_expr(out, body, style);
            if bracketed {
                out.push(')');
            }
        }
        ExprKind::LetBe { bind, st, body } => {
            if bracketed {
                out.push('(');
            }
            out.push_str("let ");
            out.push_str(&bind_text(bind, style));
            if let Some(s) = st {
                out.push_str(" be st ");
                write_expr(out, s, style);
            }
            out.push_str(" in ");
            write_expr(out, body, style);
            if bracketed {
                out.push(')');
            }
        }
        ExprKind::Forall { binds, body } | ExprKind::Exists { binds, body } => {
            let kw = if matches!(e.kind, ExprKind::Forall { .. }) {
                "forall"
            } else {
                "exists"
            };
            if bracketed {
                out.push('(');
            }
            let _ = write!(out, "{kw} {} & ", binds_text(binds, style));
            write_expr(out, body, style);
            if bracketed {
                out.push(')');
            }
        }
        ExprKind::Apply { callee, args } => {
            wrap(out, callee, style, precedence(callee) < PREC_POSTFIX);
            out.push('(');
            write_list(out, args, style);
            out.push(')');
        }
        ExprKind::SetEnum(es) => {
            out.push('{');
            write_list(out, es, style);
            out.push('}');
        }
        ExprKind::SetRange(a, b) => {
            out.push('{');
            write_expr(out, a, style);
            out.push_str(", ..., ");
            write_expr(out, b, style);
            out.push('}');
        }
        ExprKind::SetComp { elem, binds, pred } => {
            out.push('{');
            write_expr(out, elem, style);
            let _ = write!(out, " | {}", binds_text(binds, style));
            if let Some(p) = pred {
                out.push_str(" & ");
                write_expr(out, p, style);
            }
            out.push('}');
        }
        ExprKind::SeqEnum(es) => {
            out.push('[');
            write_list(out, es, style);
            out.push(']');
        }
        ExprKind::SeqComp { elem, bind, pred } => {
            out.push('[');
            write_expr(out, elem, style);
            let _ = write!(out, " | {}", bind_text(bind, style));
            if let Some(p) = pred {
                out.push_str(" & ");
                write_expr(out, p, style);
            }
            out.push(']');
        }
        ExprKind::MapEnum(pairs) => {
            if pairs.is_empty() {
                out.push_str("{|->}");
                return;
            }
            out.push('{');
            for (i, (k, v)) in pairs.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_expr(out, k, style);
                out.push_str(" |-> ");
                write_expr(out, v, style);
            }
            out.push('}');
        }
        ExprKind::Tuple(es) => {
            out.push_str("mk_(");
            write_list(out, es, style);
            out.push(')');
        }
        ExprKind::Record { name, fields } => {
            let _ = write!(out, "mk_{name}(");
            write_list(out, fields, style);
            out.push(')');
        }
        ExprKind::Field { record, field } => {
            wrap(out, record, style, precedence(record) < PREC_POSTFIX);
            let _ = write!(out, ".{field}");
        }
        ExprKind::TupleSelect { tuple, index } => {
            wrap(out, tuple, style, precedence(tuple) < PREC_POSTFIX);
            let _ = write!(out, ".#{index}");
        }
        ExprKind::IsType { expr, ty } => {
            out.push_str("is_(");
            write_expr(out, expr, style);
            let _ = write!(out, ", {ty})");
        }
    }
}

fn is_negative_literal(l: &Literal) -> bool {
    match l {
        Literal::Int(i) => i.is_negative(),
        Literal::Real(r) => r.is_negative(),
        _ => false,
    }
}

fn param_type_list(types: &[TypeExpr]) -> String {
    if types.is_empty() {
        return "()".into();
    }
    types
        .iter()
        .map(|t| match t {
            TypeExpr::Product(_) => format!("({t})"),
            TypeExpr::Union(_) if types.len() > 1 => format!("({t})"),
            _ => t.to_string(),
        })
        .collect::<Vec<_>>()
        .join(" * ")
}

/// Renders a module in parseable surface syntax.
pub fn print_module(m: &SpecModule) -> String {
    let mut out = String::new();
    if !m.types.is_empty() {
        out.push_str("types\n");
        for t in &m.types {
            match &t.body {
                TypeBody::Alias(ty) => {
                    let _ = write!(out, "  {} = {}", t.name, ty);
                }
                TypeBody::Record(fields) => {
                    let _ = write!(out, "  {} ::", t.name);
                    for (n, ty) in fields {
                        let _ = write!(out, "\n    {n} : {ty}");
                    }
                }
            }
            if let Some((p, e)) = &t.invariant {
                let _ = write!(out, "\n  inv {p} == {e}");
            }
            out.push_str(";\n");
        }
    }
    if !m.values.is_empty() {
        out.push_str("values\n");
        for v in &m.values {
            match &v.ty {
                Some(t) => {
                    let _ = writeln!(out, "  {} : {} = {};", v.name, t, v.value);
                }
                None => {
                    let _ = writeln!(out, "  {} = {};", v.name, v.value);
                }
            }
        }
    }
    if !m.functions.is_empty() {
        out.push_str("functions\n");
        for f in &m.functions {
            for a in m.annotations_for(&f.name) {
                let cands: Vec<String> = a.candidates.iter().map(|t| t.to_string()).collect();
                let _ = writeln!(out, "  -- @QuickCheck @{} = {};", a.param, cands.join(", "));
            }
            let tps = if f.type_params.is_empty() {
                String::new()
            } else {
                let ps: Vec<String> = f.type_params.iter().map(|p| format!("@{p}")).collect();
                format!("[{}]", ps.join(", "))
            };
            let _ = writeln!(
                out,
                "  {}{}: {} -> {}",
                f.name,
                tps,
                param_type_list(&f.param_types),
                f.return_type
            );
            let ps: Vec<String> = f.params.iter().map(|p| p.to_string()).collect();
            let _ = write!(out, "  {}({}) ==\n    {}", f.name, ps.join(", "), f.body);
            if let Some(pre) = &f.pre {
                let _ = write!(out, "\n  pre {pre}");
            }
            if let Some(post) = &f.post {
                let _ = write!(out, "\n  post {post}");
            }
            out.push_str(";\n");
        }
    }
    if let Some(s) = &m.state {
        let _ = writeln!(out, "state {} of", s.name);
        for (n, t) in &s.fields {
            let _ = writeln!(out, "  {n} : {t}");
        }
        if let Some((p, e)) = &s.invariant {
            let _ = writeln!(out, "inv {p} == {e}");
        }
        if let Some((p, e)) = &s.init {
            let _ = writeln!(out, "init {p} == {e}");
        }
        out.push_str("end\n");
    }
    out
}
