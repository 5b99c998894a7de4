//! Recursive-descent parser for the concrete formula syntax.
//!
//! ```text
//! formula := unary (('&' | '+_' prob) unary)*
//! unary   := 'T' | '!' unary | '(' formula ')'
//!          | '(' label ')' ['_' prob] unary | '<' time '>' ['_' prob] unary
//! ```
//!
//! Prefix operators bind tighter than the binary ones, which share one
//! precedence level and associate to the left. `(T)` is a parenthesised
//! constant, so no label may be called `T`.

use num_traits::Signed;

use super::formula::{Formula, Instance};
use crate::error::{Error, Result};
use crate::numeric::{format_rational, one, parse_rational, Rational};
use crate::timealg::TimeValue;

pub fn parse_formula(text: &str) -> Result<Formula> {
    parse_formula_with(text, None)
}

/// Parses and, when `alphabet` is given, rejects labels outside it.
pub fn parse_formula_with(text: &str, alphabet: Option<&[String]>) -> Result<Formula> {
    let mut p = Parser { text, pos: 0, alphabet, instance: None };
    let f = p.formula()?;
    p.skip_ws();
    if p.pos < text.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(f)
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
    alphabet: Option<&'a [String]>,
    instance: Option<Instance>,
}

impl<'a> Parser<'a> {
    fn error(&self, message: impl Into<String>) -> Error {
        self.error_at(self.pos, message)
    }

    fn error_at(&self, offset: usize, message: impl Into<String>) -> Error {
        Error::Parse { offset, message: message.into() }
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.text.len() - trimmed.len();
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    fn note_instance(&mut self, i: Instance, offset: usize) -> Result<()> {
        match self.instance {
            None => {
                self.instance = Some(i);
                Ok(())
            }
            Some(j) if j == i => Ok(()),
            Some(j) => Err(self.error_at(offset, format!("{i} operator in a {j} formula"))),
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        let mut left = self.unary()?;
        loop {
            self.skip_ws();
            let start = self.pos;
            if self.eat('&') {
                self.note_instance(Instance::Boolean, start)?;
                let right = self.unary()?;
                left = Formula::and(left, right);
            } else if self.rest().starts_with("+_") {
                self.pos += 2;
                let p = self.probability()?;
                self.note_instance(Instance::Quantitative, start)?;
                let right = self.unary()?;
                left = Formula::mix(p, left, right);
            } else {
                return Ok(left);
            }
        }
    }

    fn unary(&mut self) -> Result<Formula> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            Some('T') if !self.ident_continues(start + 1) => {
                self.pos += 1;
                Ok(Formula::top())
            }
            Some('!') => {
                self.pos += 1;
                self.note_instance(Instance::Boolean, start)?;
                Ok(Formula::not(self.unary()?))
            }
            Some('<') => {
                self.pos += 1;
                self.skip_ws();
                let at = self.pos;
                let text = self.number_text();
                let time: TimeValue = text
                    .parse()
                    .map_err(|_| self.error_at(at, format!("expected a nonnegative time, found `{text}`")))?;
                self.expect('>')?;
                let threshold = self.threshold(start)?;
                let arg = self.unary()?;
                Ok(Formula::delay(time, threshold, arg))
            }
            Some('(') => {
                self.pos += 1;
                self.skip_ws();
                let save = self.pos;
                if let Some(label) = self.ident() {
                    if label != "T" && self.eat(')') {
                        if let Some(alphabet) = self.alphabet {
                            if !alphabet.iter().any(|b| b == label) {
                                return Err(Error::UnknownLabel(label.to_string()));
                            }
                        }
                        let threshold = self.threshold(start)?;
                        let arg = self.unary()?;
                        return Ok(Formula::label(label, threshold, arg));
                    }
                }
                self.pos = save;
                let inner = self.formula()?;
                self.expect(')')?;
                Ok(inner)
            }
            Some(c) => Err(self.error(format!("unexpected `{c}`"))),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn threshold(&mut self, op_start: usize) -> Result<Option<Rational>> {
        self.skip_ws();
        if self.peek() == Some('_') {
            self.pos += 1;
            let p = self.probability()?;
            self.note_instance(Instance::Boolean, op_start)?;
            Ok(Some(p))
        } else {
            self.note_instance(Instance::Quantitative, op_start)?;
            Ok(None)
        }
    }

    fn probability(&mut self) -> Result<Rational> {
        self.skip_ws();
        let at = self.pos;
        let text = self.number_text();
        let p = parse_rational(text).map_err(|_| self.error_at(at, format!("expected a probability, found `{text}`")))?;
        if p.is_negative() || p > one() {
            return Err(self.error_at(at, format!("probability {} outside [0,1]", format_rational(&p))));
        }
        Ok(p)
    }

    fn number_text(&mut self) -> &'a str {
        let rest = self.rest();
        let len = rest.find(|c: char| !(c.is_ascii_digit() || c == '.' || c == '/')).unwrap_or(rest.len());
        self.pos += len;
        &rest[..len]
    }

    fn ident_continues(&self, at: usize) -> bool {
        self.text[at..].chars().next().is_some_and(|c| c.is_alphanumeric() || c == '_' || c == '-')
    }

    fn ident(&mut self) -> Option<&'a str> {
        let rest = self.rest();
        let first = rest.chars().next()?;
        if !(first.is_alphanumeric() || first == '_') {
            return None;
        }
        let len = rest.find(|c: char| !(c.is_alphanumeric() || c == '_' || c == '-')).unwrap_or(rest.len());
        self.pos += len;
        Some(&rest[..len])
    }
}
