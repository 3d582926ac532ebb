//! Compares `parse_formula` with a shunting-yard reference on random token
//! strings over the propositional connectives.

use pgts_core::kernel::{parse_formula, Formula};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOKENS: [&str; 12] = [
    "A", "B", "True", "False", "~", "/\\", "\\/", "->", "<->", "(", ")", "¬",
];

fn binary_prec(tok: &str) -> Option<u8> {
    match tok {
        "/\\" => Some(4),
        "\\/" => Some(3),
        "->" => Some(2),
        "<->" => Some(1),
        _ => None,
    }
}

fn build(op: &str, a: Formula, b: Formula) -> Formula {
    match op {
        "/\\" => Formula::and(a, b),
        "\\/" => Formula::or(a, b),
        "->" => Formula::implies(a, b),
        _ => Formula::iff(a, b),
    }
}

fn reduce(ops: &mut Vec<&str>, out: &mut Vec<Formula>) {
    let op = ops.pop().unwrap();
    if op == "~" {
        let a = out.pop().unwrap();
        out.push(Formula::not(a));
    } else {
        let b = out.pop().unwrap();
        let a = out.pop().unwrap();
        out.push(build(op, a, b));
    }
}

/// Shunting-yard with prefix negation and right-associative binaries.
fn reference(tokens: &[&str]) -> Option<Formula> {
    let mut ops: Vec<&str> = Vec::new();
    let mut out: Vec<Formula> = Vec::new();
    let mut want_operand = true;
    for &tok in tokens {
        let tok = if tok == "¬" { "~" } else { tok };
        if want_operand {
            match tok {
                "A" | "B" => out.push(Formula::atom(tok)),
                "True" => out.push(Formula::Top),
                "False" => out.push(Formula::Bottom),
                "~" | "(" => {
                    ops.push(tok);
                    continue;
                }
                _ => return None,
            }
            want_operand = false;
            // a completed operand closes pending negations
            while ops.last() == Some(&"~") {
                reduce(&mut ops, &mut out);
            }
        } else if let Some(p) = binary_prec(tok) {
            // right associative: only pop strictly tighter operators
            while let Some(q) = ops.last().and_then(|o| binary_prec(o)) {
                if q > p {
                    reduce(&mut ops, &mut out);
                } else {
                    break;
                }
            }
            ops.push(tok);
            want_operand = true;
        } else if tok == ")" {
            loop {
                match ops.last() {
                    None => return None,
                    Some(&"(") => break,
                    _ => reduce(&mut ops, &mut out),
                }
            }
            ops.pop();
            while ops.last() == Some(&"~") {
                reduce(&mut ops, &mut out);
            }
        } else {
            return None;
        }
    }
    if want_operand {
        return None;
    }
    while let Some(&op) = ops.last() {
        if op == "(" {
            return None;
        }
        reduce(&mut ops, &mut out);
    }
    (out.len() == 1).then(|| out.pop().unwrap())
}

#[test]
fn reference_agrees_on_fixed_cases() {
    let cases = [
        ("A -> B -> A", "A -> (B -> A)"),
        ("A /\\ B \\/ A", "(A /\\ B) \\/ A"),
        ("~ A /\\ B", "(~A) /\\ B"),
        ("A <-> B <-> A", "A <-> (B <-> A)"),
        ("~ ~ ( A -> B )", "~(~(A -> B))"),
    ];
    for (text, bracketed) in cases {
        let toks: Vec<&str> = text.split_whitespace().collect();
        let want = reference(&toks).unwrap();
        assert_eq!(parse_formula(text).unwrap(), want, "{text}");
        assert_eq!(parse_formula(bracketed).unwrap(), want, "{bracketed}");
    }
}

#[test]
fn random_token_strings_match_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut accepted = 0;
    for _ in 0..20_000 {
        let len = rng.gen_range(1..=12);
        // mostly grammatical, with some noise
        let mut operand = true;
        let toks: Vec<&str> = (0..len)
            .map(|_| {
                let pool: &[&str] = match (rng.gen_bool(0.85), operand) {
                    (false, _) => &TOKENS,
                    (true, true) => &["A", "B", "True", "False", "~", "(", "¬"],
                    (true, false) => &["/\\", "\\/", "->", "<->", ")"],
                };
                let tok = pool[rng.gen_range(0..pool.len())];
                operand = !matches!(tok, "A" | "B" | "True" | "False" | ")");
                tok
            })
            .collect();
        let text = toks.join(" ");
        let got = parse_formula(&text).ok();
        assert_eq!(got, reference(&toks), "{text}");
        if let Some(f) = got {
            accepted += 1;
            assert_eq!(parse_formula(&f.to_string()).unwrap(), f);
        }
    }
    assert!(accepted > 1000, "only {accepted} well-formed strings");
}
