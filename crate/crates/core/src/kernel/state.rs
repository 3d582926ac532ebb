use super::formula::Formula;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Hypothesis {
    pub name: String,
    pub formula: Formula,
}

/// One proof obligation: named hypotheses and a conclusion.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Goal {
    pub hypotheses: Vec<Hypothesis>,
    pub conclusion: Formula,
}

impl Goal {
    pub fn new(conclusion: Formula) -> Self {
        Goal {
            hypotheses: Vec::new(),
            conclusion,
        }
    }

    pub fn hypothesis(&self, name: &str) -> Option<&Formula> {
        self.hypotheses
            .iter()
            .find(|h| h.name == name)
            .map(|h| &h.formula)
    }

    pub fn has_hypothesis_formula(&self, f: &Formula) -> bool {
        self.hypotheses.iter().any(|h| &h.formula == f)
    }

    /// Smallest `Hn` (n >= 1) not already used in this goal.
    pub fn fresh_name(&self) -> String {
        (1..)
            .map(|n| format!("H{n}"))
            .find(|name| self.hypothesis(name).is_none())
            .expect("unbounded range")
    }

    /// Push a hypothesis under a fresh name, returning that name.
    pub fn push_fresh(&mut self, formula: Formula) -> String {
        let name = self.fresh_name();
        self.hypotheses.push(Hypothesis {
            name: name.clone(),
            formula,
        });
        name
    }

    pub fn with_conclusion(&self, conclusion: Formula) -> Goal {
        Goal {
            hypotheses: self.hypotheses.clone(),
            conclusion,
        }
    }
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, h) in self.hypotheses.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}: {}", h.name, h.formula)?;
        }
        if !self.hypotheses.is_empty() {
            f.write_str(" ")?;
        }
        write!(f, "|- {}", self.conclusion)
    }
}

/// The stack of open goals for one theorem. The first goal is focused.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProofState {
    pub theorem_id: String,
    pub goals: Vec<Goal>,
}

impl ProofState {
    pub fn is_proved(&self) -> bool {
        self.goals.is_empty()
    }

    pub fn focused(&self) -> Option<&Goal> {
        self.goals.first()
    }

    pub fn fingerprint(&self) -> Fingerprint {
        state_fingerprint(self)
    }
}

impl fmt::Display for ProofState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, g) in self.goals.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "[{g}]")?;
        }
        Ok(())
    }
}

/// Canonical digest of a proof state.
///
/// Hypothesis names and hypothesis order are ignored; goal order is kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fingerprint([u8; 16]);

impl Fingerprint {
    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    pub fn as_bytes(&self) -> &[u8; 16] {
        &self.0
    }

    /// Leading eight bytes as an integer, for seeding.
    pub fn low_u64(&self) -> u64 {
        u64::from_be_bytes(self.0[..8].try_into().expect("16-byte digest"))
    }
}

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl FromStr for Fingerprint {
    type Err = hex::FromHexError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut out = [0u8; 16];
        hex::decode_to_slice(s, &mut out)?;
        Ok(Fingerprint(out))
    }
}

impl Serialize for Fingerprint {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Fingerprint {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn state_fingerprint(state: &ProofState) -> Fingerprint {
    let mut hasher = Sha256::new();
    for goal in &state.goals {
        let mut hyps: Vec<String> = goal
            .hypotheses
            .iter()
            .map(|h| h.formula.to_string())
            .collect();
        hyps.sort();
        hasher.update(b"goal\x00");
        for h in &hyps {
            hasher.update(h.as_bytes());
            hasher.update(b"\x00");
        }
        hasher.update(b"|-\x00");
        hasher.update(goal.conclusion.to_string().as_bytes());
        hasher.update(b"\x01");
    }
    let digest = hasher.finalize();
    let mut out = [0u8; 16];
    out.copy_from_slice(&digest[..16]);
    Fingerprint(out)
}
