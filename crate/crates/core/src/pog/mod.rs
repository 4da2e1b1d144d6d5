//! Proof obligation generation and rendering.

pub mod free;
pub mod generate;

use std::fmt;

use crate::interp::{quantifier_chain, Polarity};
use crate::lang::{Bind, Expr, Location, Pattern, TypeExpr};

pub use free::free_names;
pub use generate::generate_pos;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PoKind {
    SeqApply,
    MapApply,
    NonZero,
    NonEmptySeq,
    CasesExhaustive,
    Subtype,
    LetBeExists,
    PostCondition,
    StateInvariant,
}

impl PoKind {
    pub const ALL: [PoKind; 9] = [
        PoKind::SeqApply,
        PoKind::MapApply,
        PoKind::NonZero,
        PoKind::NonEmptySeq,
        PoKind::CasesExhaustive,
        PoKind::Subtype,
        PoKind::LetBeExists,
        PoKind::PostCondition,
        PoKind::StateInvariant,
    ];

    /// The name used in obligation locators.
    pub fn name(self) -> &'static str {
        match self {
            PoKind::SeqApply => "sequence apply",
            PoKind::MapApply => "map apply",
            PoKind::NonZero => "non-zero",
            PoKind::NonEmptySeq => "non-empty sequence",
            PoKind::CasesExhaustive => "cases exhaustive",
            PoKind::Subtype => "subtype",
            PoKind::LetBeExists => "let be st existence",
            PoKind::PostCondition => "post condition",
            PoKind::StateInvariant => "state invariant",
        }
    }
}

impl fmt::Display for PoKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A closed boolean expression that must be a tautology.
#[derive(Clone, Debug, PartialEq)]
pub struct ProofObligation {
    /// 1-based, in generation order.
    pub number: usize,
    pub kind: PoKind,
    /// The function, value, type or state the obligation comes from.
    pub owner: String,
    /// Where the construct that needs the obligation appears.
    pub loc: Location,
    pub expr: Expr,
    /// The expression as shown to users.
    pub text: String,
    pub polarity: Polarity,
    /// False if the obligation depends on state and cannot be evaluated.
    pub executable: bool,
    /// Type parameters of the owner, without `@`.
    pub type_params: Vec<String>,
    /// Set for subtype obligations about the owner's result value.
    pub on_result: bool,
    /// The owner's parameter patterns as bound in the obligation.
    pub params: Vec<Pattern>,
    /// Static type of the scrutinee (cases) or of the checked expression
    /// (subtype).
    pub subject_type: Option<TypeExpr>,
}

impl ProofObligation {
    /// `<owner>: <kind> obligation in <file> at line <l>:<c>`
    pub fn locator(&self) -> String {
        format!("{}: {} obligation in {}", self.owner, self.kind, self.loc)
    }

    /// The distinct type binds of all quantifiers in the expression, outer
    /// ones first.
    pub fn type_binds(&self) -> Vec<(Pattern, TypeExpr)> {
        let mut out: Vec<(Pattern, TypeExpr)> = Vec::new();
        for b in self.expr.type_binds() {
            if !out.contains(&b) {
                out.push(b);
            }
        }
        out
    }

    /// The outer quantifier binds and the body beneath them.
    pub fn chain(&self) -> (Vec<Bind>, &Expr) {
        let (_, binds, body) = quantifier_chain(&self.expr);
        (binds, body)
    }
}

/// The three-part listing used by `pog` and after FAILED results.
pub fn render_po(po: &ProofObligation) -> String {
    format!(
        "Proof Obligation {}: (Unproved)\n{}\n{}",
        po.number,
        po.locator(),
        po.text
    )
}

/// Output of the `pog` command.
pub fn render_pog(pos: &[ProofObligation]) -> String {
    let mut out = format!(
        "Generated {} proof obligation{}:\n",
        pos.len(),
        if pos.len() == 1 { "" } else { "s" }
    );
    for po in pos {
        out.push('\n');
        out.push_str(&render_po(po));
        out.push('\n');
    }
    out
}
