use std::fmt;

/// A first-order term, as it appears on either side of a relational atom.
///
/// Terms are opaque to the tactic kernel; they only exist so that corpus
/// statements with equalities and orderings can be parsed and counted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Num(u64),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(name) => f.write_str(name),
            Term::Num(n) => write!(f, "{n}"),
        }
    }
}

/// Statement language of the kernel.
///
/// The propositional nodes (`Atom` through `Iff`) are what tactics operate
/// on. Quantifiers and relational atoms are accepted by the parser so that
/// statements can be analysed, but `initial_state` rejects them.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(String),
    Top,
    Bottom,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
    Eq(Term, Term),
    Neq(Term, Term),
    Lt(Term, Term),
    Le(Term, Term),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn forall(var: impl Into<String>, body: Formula) -> Self {
        Formula::Forall(var.into(), Box::new(body))
    }

    pub fn exists(var: impl Into<String>, body: Formula) -> Self {
        Formula::Exists(var.into(), Box::new(body))
    }

    /// True when the formula only uses connectives the tactics understand.
    pub fn is_propositional(&self) -> bool {
        match self {
            Formula::Atom(_) | Formula::Top | Formula::Bottom => true,
            Formula::Not(a) => a.is_propositional(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => a.is_propositional() && b.is_propositional(),
            Formula::Forall(..)
            | Formula::Exists(..)
            | Formula::Eq(..)
            | Formula::Neq(..)
            | Formula::Lt(..)
            | Formula::Le(..) => false,
        }
    }

    /// True when a quantifier occurs anywhere in the formula.
    pub fn has_quantifier(&self) -> bool {
        match self {
            Formula::Forall(..) | Formula::Exists(..) => true,
            Formula::Not(a) => a.has_quantifier(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => a.has_quantifier() || b.has_quantifier(),
            _ => false,
        }
    }

    /// Number of constructor nodes in the tree (terms count as leaves).
    pub fn size(&self) -> usize {
        match self {
            Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => 1 + a.size(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => 1 + a.size() + b.size(),
            _ => 1,
        }
    }

    /// Height of the tree; atoms have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => 1 + a.depth(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => 1 + a.depth().max(b.depth()),
            _ => 0,
        }
    }

    /// Replace every occurrence of `from` by `to`, outermost first.
    ///
    /// Returns `None` when `from` does not occur.
    pub fn replace(&self, from: &Formula, to: &Formula) -> Option<Formula> {
        if self == from {
            return Some(to.clone());
        }
        let pair = |a: &Formula, b: &Formula| -> Option<(Formula, Formula)> {
            let ra = a.replace(from, to);
            let rb = b.replace(from, to);
            if ra.is_none() && rb.is_none() {
                return None;
            }
            Some((
                ra.unwrap_or_else(|| a.clone()),
                rb.unwrap_or_else(|| b.clone()),
            ))
        };
        match self {
            Formula::Not(a) => a.replace(from, to).map(Formula::not),
            Formula::And(a, b) => pair(a, b).map(|(a, b)| Formula::and(a, b)),
            Formula::Or(a, b) => pair(a, b).map(|(a, b)| Formula::or(a, b)),
            Formula::Implies(a, b) => pair(a, b).map(|(a, b)| Formula::implies(a, b)),
            Formula::Iff(a, b) => pair(a, b).map(|(a, b)| Formula::iff(a, b)),
            Formula::Forall(v, a) => a.replace(from, to).map(|a| Formula::forall(v.clone(), a)),
            Formula::Exists(v, a) => a.replace(from, to).map(|a| Formula::exists(v.clone(), a)),
            _ => None,
        }
    }

    /// Collect atom names in first-occurrence order.
    pub fn atoms(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut Vec<String>) {
        match self {
            Formula::Atom(name) => {
                if !out.contains(name) {
                    out.push(name.clone());
                }
            }
            Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => a.collect_atoms(out),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
            _ => {}
        }
    }

    // Binding strength used by the printer. Quantifiers bind weakest: their
    // body extends as far right as possible.
    fn level(&self) -> u8 {
        match self {
            Formula::Forall(..) | Formula::Exists(..) => 0,
            Formula::Iff(..) => 1,
            Formula::Implies(..) => 2,
            Formula::Or(..) => 3,
            Formula::And(..) => 4,
            Formula::Not(..) => 5,
            _ => 6,
        }
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>, parens: bool) -> fmt::Result {
        if parens {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }

    // All binary connectives are right-associative.
    fn fmt_binary(
        &self,
        f: &mut fmt::Formatter<'_>,
        lhs: &Formula,
        op: &str,
        rhs: &Formula,
    ) -> fmt::Result {
        let level = self.level();
        lhs.fmt_child(f, lhs.level() <= level)?;
        write!(f, " {op} ")?;
        rhs.fmt_child(f, rhs.level() < level)
    }
}

/// ASCII serialization; `parse_formula` reads it back to an identical tree.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(name) => f.write_str(name),
            Formula::Top => f.write_str("True"),
            Formula::Bottom => f.write_str("False"),
            Formula::Not(a) => {
                f.write_str("~")?;
                a.fmt_child(f, a.level() < 5)
            }
            Formula::And(a, b) => self.fmt_binary(f, a, "/\\", b),
            Formula::Or(a, b) => self.fmt_binary(f, a, "\\/", b),
            Formula::Implies(a, b) => self.fmt_binary(f, a, "->", b),
            Formula::Iff(a, b) => self.fmt_binary(f, a, "<->", b),
            Formula::Forall(v, body) => write!(f, "forall {v}, {body}"),
            Formula::Exists(v, body) => write!(f, "exists {v}, {body}"),
            Formula::Eq(a, b) => write!(f, "{a} = {b}"),
            Formula::Neq(a, b) => write!(f, "{a} <> {b}"),
            Formula::Lt(a, b) => write!(f, "{a} < {b}"),
            Formula::Le(a, b) => write!(f, "{a} <= {b}"),
        }
    }
}
