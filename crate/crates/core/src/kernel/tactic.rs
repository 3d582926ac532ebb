use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// The kernel's tactic vocabulary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TacticKind {
    Intro,
    Intros,
    Split,
    Left,
    Right,
    Assumption,
    Exact,
    Apply,
    Destruct,
    Rewrite,
    Simpl,
    Exfalso,
    Trivial,
    Auto,
    Idtac,
}

impl TacticKind {
    pub const ALL: [TacticKind; 15] = [
        TacticKind::Intro,
        TacticKind::Intros,
        TacticKind::Split,
        TacticKind::Left,
        TacticKind::Right,
        TacticKind::Assumption,
        TacticKind::Exact,
        TacticKind::Apply,
        TacticKind::Destruct,
        TacticKind::Rewrite,
        TacticKind::Simpl,
        TacticKind::Exfalso,
        TacticKind::Trivial,
        TacticKind::Auto,
        TacticKind::Idtac,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TacticKind::Intro => "intro",
            TacticKind::Intros => "intros",
            TacticKind::Split => "split",
            TacticKind::Left => "left",
            TacticKind::Right => "right",
            TacticKind::Assumption => "assumption",
            TacticKind::Exact => "exact",
            TacticKind::Apply => "apply",
            TacticKind::Destruct => "destruct",
            TacticKind::Rewrite => "rewrite",
            TacticKind::Simpl => "simpl",
            TacticKind::Exfalso => "exfalso",
            TacticKind::Trivial => "trivial",
            TacticKind::Auto => "auto",
            TacticKind::Idtac => "idtac",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|k| k.name() == name)
    }

    /// Number of hypothesis arguments the tactic takes.
    pub fn arity(self) -> usize {
        match self {
            TacticKind::Exact | TacticKind::Apply | TacticKind::Destruct | TacticKind::Rewrite => 1,
            _ => 0,
        }
    }

    /// Position in [`TacticKind::ALL`].
    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for TacticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TacticParseError {
    #[error("empty tactic")]
    Empty,
    #[error("unknown tactic `{0}`")]
    UnknownTactic(String),
    #[error("tactic `{name}` takes {expected} argument(s), got {got}")]
    BadArity {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("invalid argument `{0}`")]
    BadArgument(String),
}

/// A tactic name with its hypothesis arguments.
///
/// Fields are public so that malformed tactics can be built on purpose;
/// `Tactic::new` and `FromStr` enforce the arity rule.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tactic {
    pub kind: TacticKind,
    pub args: Vec<String>,
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

impl Tactic {
    pub fn new(kind: TacticKind, args: Vec<String>) -> Result<Self, TacticParseError> {
        if args.len() != kind.arity() {
            return Err(TacticParseError::BadArity {
                name: kind.name().to_string(),
                expected: kind.arity(),
                got: args.len(),
            });
        }
        if let Some(bad) = args.iter().find(|a| !is_identifier(a)) {
            return Err(TacticParseError::BadArgument(bad.clone()));
        }
        Ok(Tactic { kind, args })
    }

    pub fn simple(kind: TacticKind) -> Self {
        debug_assert_eq!(kind.arity(), 0);
        Tactic {
            kind,
            args: Vec::new(),
        }
    }

    pub fn with_arg(kind: TacticKind, arg: impl Into<String>) -> Self {
        debug_assert_eq!(kind.arity(), 1);
        Tactic {
            kind,
            args: vec![arg.into()],
        }
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn has_args(&self) -> bool {
        !self.args.is_empty()
    }

    pub fn is_well_formed(&self) -> bool {
        self.args.len() == self.kind.arity()
    }
}

impl fmt::Display for Tactic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind.name())?;
        for arg in &self.args {
            write!(f, " {arg}")?;
        }
        Ok(())
    }
}

impl FromStr for Tactic {
    type Err = TacticParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().trim_end_matches('.');
        let mut words = s.split_whitespace();
        let name = words.next().ok_or(TacticParseError::Empty)?;
        let kind = TacticKind::from_name(name)
            .ok_or_else(|| TacticParseError::UnknownTactic(name.into()))?;
        Tactic::new(kind, words.map(str::to_string).collect())
    }
}

impl Serialize for Tactic {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Tactic {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_prints() {
        let t: Tactic = "apply H1".parse().unwrap();
        assert_eq!(t, Tactic::with_arg(TacticKind::Apply, "H1"));
        assert_eq!(t.to_string(), "apply H1");
        let t: Tactic = " intros. ".parse().unwrap();
        assert_eq!(t, Tactic::simple(TacticKind::Intros));
    }

    #[test]
    fn arity_is_enforced() {
        assert!(matches!(
            "apply".parse::<Tactic>(),
            Err(TacticParseError::BadArity {
                expected: 1,
                got: 0,
                ..
            })
        ));
        assert!(matches!(
            "intro H".parse::<Tactic>(),
            Err(TacticParseError::BadArity {
                expected: 0,
                got: 1,
                ..
            })
        ));
        assert!(matches!(
            "omega".parse::<Tactic>(),
            Err(TacticParseError::UnknownTactic(_))
        ));
        assert!(matches!(
            "exact (H1)".parse::<Tactic>(),
            Err(TacticParseError::BadArgument(_))
        ));
    }

    #[test]
    fn vocabulary_has_fifteen_names() {
        assert_eq!(TacticKind::ALL.len(), 15);
        for (i, k) in TacticKind::ALL.iter().enumerate() {
            assert_eq!(k.index(), i);
            assert_eq!(TacticKind::from_name(k.name()), Some(*k));
        }
    }
}
