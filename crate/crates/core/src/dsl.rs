//! Text syntax for set expressions.
//!
//! ```text
//! expr := "fin" "{" rat { "," rat } "}"
//!       | "geom" "(" rat "," rat "," rat [ "," ("open" | "closed") ] ")"
//!       | "tail" "(" rat "," rat "," ("up" | "down") ")"
//!       | "affine" "(" expr "," rat "," rat ")"
//!       | "union" "(" expr "," expr { "," expr } ")"
//!       | "msum" "(" expr "," expr { "," expr } ")"
//!       | "iso" "(" expr ")"
//! rat  := [ "-" ] int [ "/" int ]
//! ```
//!
//! `geom(limit, scale, ratio)` defaults to `closed`. Whitespace is
//! insignificant.

use std::fmt::Write as _;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::expr::{Direction, SetExpr};
use crate::normalize::normalize;
use crate::rat::Rat;

/// Parses and validates (including the sum invariant) but keeps the
/// structure as written.
pub fn parse(text: &str) -> Result<SetExpr> {
    let mut p = Parser::new(text);
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.error("end of input"));
    }
    normalize(&e)?;
    Ok(e)
}

/// Canonical text.
pub fn render(e: &SetExpr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e);
    s
}

fn write_expr(s: &mut String, e: &SetExpr) {
    match e {
        SetExpr::Fin(ps) => {
            s.push_str("fin{");
            for (i, p) in ps.iter().enumerate() {
                if i > 0 {
                    s.push_str(", ");
                }
                let _ = write!(s, "{p}");
            }
            s.push('}');
        }
        SetExpr::Geom(g) => {
            let _ = write!(
                s,
                "geom({}, {}, {}, {})",
                g.limit,
                g.scale,
                g.ratio,
                if g.with_limit { "closed" } else { "open" }
            );
        }
        SetExpr::Tail(t) => {
            let dir = match t.dir {
                Direction::Up => "up",
                Direction::Down => "down",
            };
            let _ = write!(s, "tail({}, {}, {dir})", t.start, t.step);
        }
        SetExpr::Affine {
            child,
            scale,
            offset,
        } => {
            s.push_str("affine(");
            write_expr(s, child);
            let _ = write!(s, ", {scale}, {offset})");
        }
        SetExpr::Union(cs) | SetExpr::MSum(cs) => {
            s.push_str(if matches!(e, SetExpr::Union(_)) {
                "union("
            } else {
                "msum("
            });
            for (i, c) in cs.iter().enumerate() {
                if i > 0 {
                    s.push_str(", ");
                }
                write_expr(s, c);
            }
            s.push(')');
        }
        SetExpr::Iso(c) => {
            s.push_str("iso(");
            write_expr(s, c);
            s.push(')');
        }
    }
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn new(text: &str) -> Parser {
        Parser {
            chars: text.chars().collect(),
            pos: 0,
        }
    }

    fn position(&self) -> (usize, usize) {
        let mut line = 1;
        let mut col = 1;
        for &c in &self.chars[..self.pos.min(self.chars.len())] {
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        }
        (line, col)
    }

    fn found(&self) -> String {
        match self.chars.get(self.pos) {
            None => "end of input".into(),
            Some(c) if c.is_alphabetic() => {
                let w: String = self.chars[self.pos..]
                    .iter()
                    .take_while(|c| c.is_alphanumeric() || **c == '_')
                    .collect();
                format!("'{w}'")
            }
            Some(c) => format!("'{c}'"),
        }
    }

    fn error(&self, expected: &str) -> Error {
        let (line, column) = self.position();
        Error::Parse {
            line,
            column,
            message: format!("expected {expected}, found {}", self.found()),
        }
    }

    /// A validation failure reported at the start of the offending term.
    fn semantic(&self, at: usize, err: Error) -> Error {
        let here = Parser {
            chars: self.chars.clone(),
            pos: at,
        };
        let (line, column) = here.position();
        let message = match err {
            Error::Validation(m) => m,
            other => other.to_string(),
        };
        Error::Parse {
            line,
            column,
            message,
        }
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("'{c}'")))
        }
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        while self
            .chars
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_alphabetic())
        {
            self.pos += 1;
        }
        if self.pos == start {
            None
        } else {
            Some(self.chars[start..self.pos].iter().collect())
        }
    }

    fn keyword(&mut self, options: &[&str]) -> Result<String> {
        let start = self.pos;
        match self.ident() {
            Some(w) if options.contains(&w.as_str()) => Ok(w),
            _ => {
                self.pos = start;
                self.skip_ws();
                let list: Vec<String> = options.iter().map(|o| format!("'{o}'")).collect();
                Err(self.error(&list.join(" or ")))
            }
        }
    }

    fn int(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.error("an integer"));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        Ok(s.parse().expect("digits"))
    }

    fn rat(&mut self) -> Result<Rat> {
        self.skip_ws();
        let start = self.pos;
        let neg = self.eat('-');
        let n = self.int().map_err(|_| self.error("a rational number"))?;
        let d = if self.eat('/') {
            let d = self.int()?;
            if d == BigInt::from(0) {
                return Err(self.semantic(start, Error::Validation("zero denominator".into())));
            }
            d
        } else {
            BigInt::from(1)
        };
        let r = Rat::from_big(n, d);
        Ok(if neg { -r } else { r })
    }

    fn expr(&mut self) -> Result<SetExpr> {
        self.skip_ws();
        let start = self.pos;
        let head = self.keyword(&["fin", "geom", "tail", "affine", "union", "msum", "iso"])?;
        let built = match head.as_str() {
            "fin" => {
                self.expect('{')?;
                let mut ps = vec![self.rat()?];
                while self.eat(',') {
                    ps.push(self.rat()?);
                }
                self.expect('}')?;
                SetExpr::fin(ps)
            }
            "geom" => {
                self.expect('(')?;
                let c = self.rat()?;
                self.expect(',')?;
                let s = self.rat()?;
                self.expect(',')?;
                let q = self.rat()?;
                let closed = if self.eat(',') {
                    self.keyword(&["open", "closed"])? == "closed"
                } else {
                    true
                };
                self.expect(')')?;
                SetExpr::geom(c, s, q, closed)
            }
            "tail" => {
                self.expect('(')?;
                let a = self.rat()?;
                self.expect(',')?;
                let d = self.rat()?;
                self.expect(',')?;
                let dir = if self.keyword(&["up", "down"])? == "up" {
                    Direction::Up
                } else {
                    Direction::Down
                };
                self.expect(')')?;
                SetExpr::tail(a, d, dir)
            }
            "affine" => {
                self.expect('(')?;
                let child = self.expr()?;
                self.expect(',')?;
                let a = self.rat()?;
                self.expect(',')?;
                let b = self.rat()?;
                self.expect(')')?;
                SetExpr::affine(child, a, b)
            }
            "iso" => {
                self.expect('(')?;
                let child = self.expr()?;
                self.expect(')')?;
                Ok(SetExpr::iso(child))
            }
            _ => {
                self.expect('(')?;
                let mut cs = vec![self.expr()?];
                self.expect(',')?;
                cs.push(self.expr()?);
                while self.eat(',') {
                    cs.push(self.expr()?);
                }
                self.expect(')')?;
                if head == "union" {
                    SetExpr::union(cs)
                } else {
                    // The sum invariant is checked here so the error points
                    // at this term.
                    SetExpr::msum(cs).and_then(|e| normalize(&e).map(|_| e))
                }
            }
        };
        built.map_err(|e| self.semantic(start, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    #[test]
    fn parse_examples() {
        assert_eq!(
            parse("fin{1, 1/2}").unwrap(),
            SetExpr::Fin(vec![rat(1, 2), Rat::one()])
        );
        assert_eq!(
            parse("geom(0, 1, 1/2, closed)").unwrap(),
            SetExpr::geom(Rat::zero(), Rat::one(), rat(1, 2), true).unwrap()
        );
        assert_eq!(
            parse("geom(0,1,1/2)").unwrap(),
            parse("geom(0,1,1/2,closed)").unwrap()
        );
        let err = parse("geom(0,1,3/2)").unwrap_err().to_string();
        assert!(err.contains("ratio"), "{err}");
        assert!(err.starts_with("1:1:"), "{err}");
    }

    #[test]
    fn render_examples() {
        assert_eq!(
            render(&SetExpr::Fin(vec![rat(1, 2), Rat::one()])),
            "fin{1/2, 1}"
        );
        assert_eq!(
            render(&SetExpr::geom(Rat::zero(), Rat::one(), rat(1, 2), false).unwrap()),
            "geom(0, 1, 1/2, open)"
        );
    }

    #[test]
    fn nested_round_trip() {
        let text = "msum(union(tail(-3/2, 2, down), fin{0}), affine(geom(1, -2, -1/3, open), 3, -1), iso(msum(geom(0, 1, 1/2, closed), geom(0, 1, 1/2, closed))))";
        let e = parse(text);
        // iso(...) inside msum is rejected by validation.
        assert!(e.is_err());
        let ok = "union(tail(-3/2, 2, down), affine(geom(1, -2, -1/3, open), 3, -1), iso(msum(geom(0, 1, 1/2, closed), geom(0, 1, 1/2, closed))))";
        let e = parse(ok).unwrap();
        assert_eq!(render(&e), ok);
    }

    #[test]
    fn error_positions() {
        let cases = [
            ("fin{1, }", (1, 8), "rational"),
            ("geom(0, 1)", (1, 10), "','"),
            ("tail(0, 1, sideways)", (1, 12), "'up' or 'down'"),
            ("blob(1)", (1, 1), "'fin'"),
            ("fin{1}\n  extra", (2, 3), "end of input"),
            ("fin{1/0}", (1, 5), "zero denominator"),
            ("union(fin{1})", (1, 13), "','"),
            ("tail(0, -1, up)", (1, 1), "step"),
            (
                "union(fin{0},\n msum(tail(0, 1, up), tail(0, 1, down)))",
                (2, 2),
                "unbounded",
            ),
        ];
        for (text, (line, column), needle) in cases {
            match parse(text) {
                Err(Error::Parse {
                    line: l,
                    column: c,
                    message,
                }) => {
                    assert_eq!((l, c), (line, column), "{text}: {message}");
                    assert!(message.contains(needle), "{text}: {message}");
                }
                other => panic!("{text}: {other:?}"),
            }
        }
    }
}
