//! Recursive-descent parser for the formula grammar.
//!
//! Precedence from tightest to loosest: `~`, `/\`, `\/`, `->`, `<->`.
//! Binary connectives associate to the right. A quantifier body extends as
//! far to the right as possible. Both ASCII and Unicode spellings are
//! accepted:
//!
//! | connective | ASCII            | Unicode |
//! |------------|------------------|---------|
//! | not        | `~`              | `¬`     |
//! | and        | `/\`             | `∧`     |
//! | or         | `\/`             | `∨`     |
//! | implies    | `->`             | `→`     |
//! | iff        | `<->`            | `↔`     |
//! | forall     | `forall x,`      | `∀x,`   |
//! | exists     | `exists x,`      | `∃x,`   |
//! | true/false | `True` / `False` | `⊤` `⊥` |
//! | relations  | `=` `<>` `<` `<=`| `≠` `≤` |

use super::formula::{Formula, Term};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at position {position}: expected {expected}")]
pub struct ParseError {
    /// Byte offset into the input.
    pub position: usize,
    pub expected: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(u64),
    LParen,
    RParen,
    Comma,
    Not,
    And,
    Or,
    Imp,
    Iff,
    Eq,
    Neq,
    Lt,
    Le,
    Forall,
    Exists,
    True,
    False,
    End,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    let err = |position: usize, expected: &str| ParseError {
        position,
        expected: expected.to_string(),
    };
    while let Some(&(pos, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        let rest = &text[pos..];
        let symbols: [(&str, Tok); 21] = [
            ("<->", Tok::Iff),
            ("->", Tok::Imp),
            ("/\\", Tok::And),
            ("\\/", Tok::Or),
            ("<>", Tok::Neq),
            ("<=", Tok::Le),
            ("<", Tok::Lt),
            ("=", Tok::Eq),
            ("~", Tok::Not),
            ("(", Tok::LParen),
            (")", Tok::RParen),
            (",", Tok::Comma),
            ("¬", Tok::Not),
            ("∧", Tok::And),
            ("∨", Tok::Or),
            ("→", Tok::Imp),
            ("↔", Tok::Iff),
            ("≠", Tok::Neq),
            ("≤", Tok::Le),
            ("∀", Tok::Forall),
            ("∃", Tok::Exists),
        ];
        if let Some((sym, tok)) = symbols.iter().find(|(sym, _)| rest.starts_with(sym)) {
            out.push((pos, tok.clone()));
            for _ in 0..sym.chars().count() {
                chars.next();
            }
            continue;
        }
        if c == '⊤' || c == '⊥' {
            out.push((pos, if c == '⊤' { Tok::True } else { Tok::False }));
            chars.next();
            continue;
        }
        if c.is_ascii_digit() {
            let mut end = pos;
            while let Some(&(p, d)) = chars.peek() {
                if !d.is_ascii_digit() {
                    break;
                }
                end = p + d.len_utf8();
                chars.next();
            }
            let value = text[pos..end]
                .parse::<u64>()
                .map_err(|_| err(pos, "a number that fits in 64 bits"))?;
            out.push((pos, Tok::Num(value)));
            continue;
        }
        if is_ident_start(c) {
            let mut end = pos;
            while let Some(&(p, d)) = chars.peek() {
                if !is_ident_char(d) {
                    break;
                }
                end = p + d.len_utf8();
                chars.next();
            }
            let word = &text[pos..end];
            let tok = match word {
                "forall" => Tok::Forall,
                "exists" => Tok::Exists,
                "True" => Tok::True,
                "False" => Tok::False,
                _ => Tok::Ident(word.to_string()),
            };
            out.push((pos, tok));
            continue;
        }
        return Err(err(pos, "a formula token"));
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let tok = self.toks[self.at].1.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        tok
    }

    fn fail<T>(&self, expected: &str) -> Result<T, ParseError> {
        Err(ParseError {
            position: self.pos(),
            expected: expected.to_string(),
        })
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        self.iff()
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.imp()?;
        if self.eat(&Tok::Iff) {
            Ok(Formula::iff(lhs, self.iff()?))
        } else {
            Ok(lhs)
        }
    }

    fn imp(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if self.eat(&Tok::Imp) {
            Ok(Formula::implies(lhs, self.imp()?))
        } else {
            Ok(lhs)
        }
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.and()?;
        if self.eat(&Tok::Or) {
            Ok(Formula::or(lhs, self.or()?))
        } else {
            Ok(lhs)
        }
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.unary()?;
        if self.eat(&Tok::And) {
            Ok(Formula::and(lhs, self.and()?))
        } else {
            Ok(lhs)
        }
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if self.eat(&Tok::Not) {
            return Ok(Formula::not(self.unary()?));
        }
        self.primary()
    }

    fn quantifier(&mut self, universal: bool) -> Result<Formula, ParseError> {
        let mut vars = Vec::new();
        while let Tok::Ident(name) = self.peek() {
            vars.push(name.clone());
            self.bump();
        }
        if vars.is_empty() {
            return self.fail("a bound variable");
        }
        if !self.eat(&Tok::Comma) {
            return self.fail("','");
        }
        let mut body = self.formula()?;
        for var in vars.into_iter().rev() {
            body = if universal {
                Formula::forall(var, body)
            } else {
                Formula::exists(var, body)
            };
        }
        Ok(body)
    }

    fn relation(&mut self, lhs: Term) -> Result<Option<Formula>, ParseError> {
        let ctor: fn(Term, Term) -> Formula = match self.peek() {
            Tok::Eq => Formula::Eq,
            Tok::Neq => Formula::Neq,
            Tok::Lt => Formula::Lt,
            Tok::Le => Formula::Le,
            _ => return Ok(None),
        };
        self.bump();
        let rhs = match self.bump() {
            Tok::Ident(name) => Term::Var(name),
            Tok::Num(n) => Term::Num(n),
            _ => {
                self.at -= 1;
                return self.fail("a term");
            }
        };
        Ok(Some(ctor(lhs, rhs)))
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::True => {
                self.bump();
                Ok(Formula::Top)
            }
            Tok::False => {
                self.bump();
                Ok(Formula::Bottom)
            }
            Tok::LParen => {
                self.bump();
                let inner = self.formula()?;
                if !self.eat(&Tok::RParen) {
                    return self.fail("')'");
                }
                Ok(inner)
            }
            Tok::Forall => {
                self.bump();
                self.quantifier(true)
            }
            Tok::Exists => {
                self.bump();
                self.quantifier(false)
            }
            Tok::Ident(name) => {
                self.bump();
                match self.relation(Term::Var(name.clone()))? {
                    Some(rel) => Ok(rel),
                    None => Ok(Formula::Atom(name)),
                }
            }
            Tok::Num(n) => {
                self.bump();
                match self.relation(Term::Num(n))? {
                    Some(rel) => Ok(rel),
                    None => self.fail("a relation after a numeric term"),
                }
            }
            _ => self.fail("an atom, constant, quantifier or '('"),
        }
    }
}

/// Parse a formula in the documented grammar.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let toks = tokenize(text)?;
    let mut parser = Parser { toks, at: 0 };
    let f = parser.formula()?;
    if *parser.peek() != Tok::End {
        return parser.fail("end of input");
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn a(n: &str) -> Formula {
        Formula::atom(n)
    }

    #[test]
    fn simple_implication() {
        assert_eq!(
            parse_formula("A -> A").unwrap(),
            Formula::implies(a("A"), a("A"))
        );
    }

    #[test]
    fn implication_is_right_associative() {
        assert_eq!(
            parse_formula("A -> B -> A").unwrap(),
            Formula::implies(a("A"), Formula::implies(a("B"), a("A")))
        );
    }

    #[test]
    fn precedence_ladder() {
        assert_eq!(
            parse_formula("~A /\\ B \\/ C -> D <-> E").unwrap(),
            Formula::iff(
                Formula::implies(
                    Formula::or(Formula::and(Formula::not(a("A")), a("B")), a("C")),
                    a("D")
                ),
                a("E")
            )
        );
    }

    #[test]
    fn unicode_aliases() {
        assert_eq!(
            parse_formula("¬A ∧ B → ⊥").unwrap(),
            parse_formula("~A /\\ B -> False").unwrap()
        );
        assert_eq!(
            parse_formula("∀x, x ≤ 3").unwrap(),
            Formula::forall("x", Formula::Le(Term::Var("x".into()), Term::Num(3)))
        );
    }

    #[test]
    fn multiple_binders_nest() {
        assert_eq!(
            parse_formula("forall x y, x <> y").unwrap(),
            Formula::forall(
                "x",
                Formula::forall(
                    "y",
                    Formula::Neq(Term::Var("x".into()), Term::Var("y".into()))
                )
            )
        );
    }

    #[test]
    fn errors_carry_position() {
        let e = parse_formula("A -> ").unwrap_err();
        assert_eq!(e.position, 5);
        let e = parse_formula("(A /\\ B").unwrap_err();
        assert_eq!(e.expected, "')'");
        let e = parse_formula("A B").unwrap_err();
        assert_eq!(e.position, 2);
        assert!(parse_formula("A # B").is_err());
        assert!(parse_formula("forall , P").is_err());
        assert!(parse_formula("3").is_err());
    }

    pub(crate) fn arb_formula() -> impl Strategy<Value = Formula> {
        let term = prop_oneof![
            "[a-z][a-z0-9]{0,2}".prop_map(Term::Var),
            (0u64..100).prop_map(Term::Num),
        ];
        let leaf = prop_oneof![
            4 => "[A-Z][A-Za-z0-9_]{0,3}"
                .prop_filter("keyword", |s| s != "True" && s != "False")
                .prop_map(Formula::Atom),
            1 => Just(Formula::Top),
            1 => Just(Formula::Bottom),
            1 => (term.clone(), term.clone()).prop_map(|(x, y)| Formula::Eq(x, y)),
            1 => (term.clone(), term).prop_map(|(x, y)| Formula::Le(x, y)),
        ];
        leaf.prop_recursive(5, 48, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                (inner.clone(), inner.clone()).prop_map(|(x, y)| Formula::and(x, y)),
                (inner.clone(), inner.clone()).prop_map(|(x, y)| Formula::or(x, y)),
                (inner.clone(), inner.clone()).prop_map(|(x, y)| Formula::implies(x, y)),
                (inner.clone(), inner.clone()).prop_map(|(x, y)| Formula::iff(x, y)),
                ("[a-z]", inner.clone()).prop_map(|(v, x)| Formula::forall(v, x)),
                ("[a-z]", inner).prop_map(|(v, x)| Formula::exists(v, x)),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_then_parse_is_identity(f in arb_formula()) {
            let text = f.to_string();
            prop_assert_eq!(parse_formula(&text).unwrap(), f);
        }
    }
}
