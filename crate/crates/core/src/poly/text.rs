//! Text form of polynomials.
//!
//! Terms are printed in descending graded-lex order, joined by `" + "` and
//! `" - "`, e.g. `3/2*Z0^2*Y5 - Z1*Y5^2`. The zero polynomial prints as `0`.
//! A frame is declared by a header line `vars: Z0,Z1,...`. The parser also
//! accepts the Unicode minus sign and arbitrary whitespace.

use std::fmt;
use std::sync::Arc;

use super::{Frame, Monomial, Poly};
use crate::error::Error;
use crate::field::Field;

fn write_monomial(f: &mut fmt::Formatter<'_>, frame: &Frame, m: &Monomial) -> fmt::Result {
    let mut first = true;
    for (i, &e) in m.exps().iter().enumerate() {
        if e == 0 {
            continue;
        }
        if !first {
            f.write_str("*")?;
        }
        first = false;
        f.write_str(frame.name(i))?;
        if e > 1 {
            write!(f, "^{e}")?;
        }
    }
    Ok(())
}

impl<F: Field> fmt::Display for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms().rev().enumerate() {
            let neg = c.is_negative();
            let mag = if neg { -c.clone() } else { c.clone() };
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if m.degree() == 0 {
                write!(f, "{mag}")?;
            } else {
                if !mag.is_one() {
                    write!(f, "{mag}*")?;
                }
                write_monomial(f, self.frame(), m)?;
            }
        }
        Ok(())
    }
}

impl<F: Field> Poly<F> {
    /// Header line followed by the expression.
    pub fn to_text(&self) -> String {
        format!("{}\n{}", self.frame().header(), self)
    }

    /// Parses an expression in the given frame.
    pub fn parse(ctx: &F::Context, frame: &Arc<Frame>, s: &str) -> Result<Poly<F>, Error> {
        Parser::new(s, 0).polynomial(ctx, frame)
    }

    /// Parses the output of [`Poly::to_text`].
    pub fn parse_text(ctx: &F::Context, s: &str) -> Result<Poly<F>, Error> {
        let (header, body) = s.split_once('\n').ok_or(Error::Parse { pos: s.chars().count(), msg: "missing expression line".into() })?;
        let frame = parse_header(header)?;
        let offset = header.chars().count() + 1;
        Parser::new(body, offset).polynomial(ctx, &frame)
    }
}

/// Parses `vars: A,B,C`.
pub fn parse_header(line: &str) -> Result<Arc<Frame>, Error> {
    let rest = line
        .trim_start()
        .strip_prefix("vars:")
        .ok_or(Error::Parse { pos: 0, msg: "expected header 'vars: ...'".into() })?;
    let mut names: Vec<String> = Vec::new();
    let mut pos = line.len() - rest.len();
    for raw in rest.split(',') {
        let name = raw.trim();
        if !is_identifier(name) {
            return Err(Error::Parse { pos, msg: format!("invalid variable name '{name}'") });
        }
        if names.iter().any(|n| n == name) {
            return Err(Error::Parse { pos, msg: format!("duplicate variable '{name}'") });
        }
        names.push(name.to_string());
        pos += raw.len() + 1;
    }
    Ok(Frame::new(names))
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    offset: usize,
}

impl Parser {
    fn new(s: &str, offset: usize) -> Parser {
        Parser { chars: s.chars().collect(), pos: 0, offset }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse { pos: self.offset + self.pos, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn sign(&mut self) -> Option<bool> {
        self.skip_ws();
        match self.peek() {
            Some('+') => {
                self.pos += 1;
                Some(false)
            }
            Some('-') | Some('\u{2212}') => {
                self.pos += 1;
                Some(true)
            }
            _ => None,
        }
    }

    fn polynomial<F: Field>(&mut self, ctx: &F::Context, frame: &Arc<Frame>) -> Result<Poly<F>, Error> {
        let mut out = Poly::zero(ctx, frame);
        let mut first = true;
        loop {
            self.skip_ws();
            if self.pos >= self.chars.len() {
                if first {
                    return Err(self.err("empty expression"));
                }
                break;
            }
            let neg = match self.sign() {
                Some(n) => n,
                None if first => false,
                None => return Err(self.err("expected '+' or '-' between terms")),
            };
            first = false;
            let (m, c) = self.term::<F>(ctx, frame)?;
            let c = if neg { -c } else { c };
            out.add_term(m, c);
        }
        Ok(out)
    }

    fn term<F: Field>(&mut self, ctx: &F::Context, frame: &Arc<Frame>) -> Result<(Monomial, F), Error> {
        self.skip_ws();
        let mut coeff = F::one(ctx);
        let mut exps = vec![0u32; frame.len()];
        let mut factors = 0usize;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(c) if c.is_ascii_digit() || c == '(' => {
                    if factors > 0 {
                        return Err(self.err("coefficient must come first in a term"));
                    }
                    coeff = self.coefficient::<F>(ctx)?;
                }
                Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                    let start = self.pos;
                    while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
                        self.pos += 1;
                    }
                    let name: String = self.chars[start..self.pos].iter().collect();
                    let idx = frame.index_of(&name).ok_or_else(|| Error::Parse {
                        pos: self.offset + start,
                        msg: format!("unknown variable '{name}'"),
                    })?;
                    self.skip_ws();
                    let e = if self.peek() == Some('^') {
                        self.pos += 1;
                        self.skip_ws();
                        self.unsigned()?
                    } else {
                        1
                    };
                    exps[idx] = exps[idx]
                        .checked_add(e)
                        .ok_or_else(|| self.err("exponent overflow"))?;
                }
                _ => return Err(self.err("expected a coefficient or a variable")),
            }
            factors += 1;
            self.skip_ws();
            if self.peek() == Some('*') {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok((Monomial::new(&exps), coeff))
    }

    fn unsigned(&mut self) -> Result<u32, Error> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer"));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().map_err(|_| Error::Parse { pos: self.offset + start, msg: format!("integer '{s}' out of range") })
    }

    fn group(&mut self) -> Result<(), Error> {
        let start = self.pos;
        let mut depth = 0usize;
        while let Some(c) = self.peek() {
            self.pos += 1;
            match c {
                '(' => depth += 1,
                ')' => {
                    depth -= 1;
                    if depth == 0 {
                        return Ok(());
                    }
                }
                _ => {}
            }
        }
        Err(Error::Parse { pos: self.offset + start, msg: "unbalanced parenthesis".into() })
    }

    fn coefficient<F: Field>(&mut self, ctx: &F::Context) -> Result<F, Error> {
        let start = self.pos;
        if self.peek() == Some('(') {
            self.group()?;
            let save = self.pos;
            self.skip_ws();
            if self.peek() == Some('/') {
                self.pos += 1;
                self.skip_ws();
                if self.peek() != Some('(') {
                    return Err(self.err("expected '(' after '/'"));
                }
                self.group()?;
            } else {
                self.pos = save;
            }
        } else {
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
            let save = self.pos;
            self.skip_ws();
            if self.peek() == Some('/') {
                self.pos += 1;
                self.skip_ws();
                let before = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
                if before == self.pos {
                    return Err(self.err("expected a denominator"));
                }
            } else {
                self.pos = save;
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        F::parse(ctx, &text).map_err(|msg| Error::Parse { pos: self.offset + start, msg })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Fp, PrimeField, Rational, Q};

    #[test]
    fn documented_example_round_trips() {
        let frame = Frame::new(["Z0", "Z1", "Y5"]);
        let s = "3/2*Z0^2*Y5 - Z1*Y5^2";
        let p = Poly::<Rational>::parse(&Q, &frame, s).unwrap();
        assert_eq!(p.to_string(), s);
        let text = p.to_text();
        assert_eq!(text, "vars: Z0,Z1,Y5\n3/2*Z0^2*Y5 - Z1*Y5^2");
        assert_eq!(Poly::<Rational>::parse_text(&Q, &text).unwrap(), p);
    }

    #[test]
    fn zero_prints_as_zero() {
        let frame = Frame::indexed("X", 2);
        let z = Poly::<Rational>::zero(&Q, &frame);
        assert_eq!(z.to_string(), "0");
        assert!(Poly::<Rational>::parse(&Q, &frame, "0").unwrap().is_zero());
    }

    #[test]
    fn unicode_minus_and_constants() {
        let frame = Frame::indexed("X", 2);
        let p = Poly::<Rational>::parse(&Q, &frame, "X0 \u{2212} 7/3 - X1").unwrap();
        assert_eq!(p.to_string(), "X0 - X1 - 7/3");
    }

    #[test]
    fn errors_carry_positions() {
        let frame = Frame::indexed("X", 2);
        match Poly::<Rational>::parse(&Q, &frame, "X0 + X7") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(Poly::<Rational>::parse(&Q, &frame, "X0 X1"), Err(Error::Parse { pos: 3, .. })));
        assert!(matches!(Poly::<Rational>::parse(&Q, &frame, ""), Err(Error::Parse { .. })));
        assert!(matches!(Poly::<Rational>::parse(&Q, &frame, "X0^"), Err(Error::Parse { pos: 3, .. })));
        assert!(parse_header("vars: A,A").is_err());
        assert!(parse_header("names: A").is_err());
    }

    #[test]
    fn prime_field_residues() {
        let f = PrimeField::new(7).unwrap();
        let frame = Frame::indexed("X", 1);
        let p = Poly::<Fp>::parse(&f, &frame, "-X0^2 + 1/2").unwrap();
        assert_eq!(p.to_string(), "6*X0^2 + 4");
    }
}
