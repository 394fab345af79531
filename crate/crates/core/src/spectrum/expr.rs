//! Evaluator for the radical expressions used in presentation files:
//! numbers, `pi`, `sqrt`, `sin`, `cos`, `+ - * / ^` and parentheses.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("cannot evaluate {input:?} at offset {offset}: {reason}")]
pub struct ExprError {
    pub input: String,
    pub offset: usize,
    pub reason: String,
}

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, reason: impl Into<String>) -> ExprError {
        ExprError { input: self.src.to_string(), offset: self.pos, reason: reason.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), ExprError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<f64, ExprError> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if c == b'+' { acc + rhs } else { acc - rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<f64, ExprError> {
        let mut acc = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = if c == b'*' { acc * rhs } else { acc / rhs };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<f64, ExprError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<f64, ExprError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(base.powf(exp));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<f64, ExprError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                self.expect(b')')?;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.pos;
                while self.pos < self.bytes.len()
                    && (self.bytes[self.pos].is_ascii_digit()
                        || self.bytes[self.pos] == b'.'
                        || matches!(self.bytes[self.pos], b'e' | b'E')
                        || (matches!(self.bytes[self.pos], b'+' | b'-')
                            && matches!(self.bytes[self.pos - 1], b'e' | b'E')))
                {
                    self.pos += 1;
                }
                self.src[start..self.pos].parse().map_err(|_| {
                    self.pos = start;
                    self.error("malformed number")
                })
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = &self.src[start..self.pos];
                if name == "pi" {
                    return Ok(std::f64::consts::PI);
                }
                let f: fn(f64) -> f64 = match name {
                    "sqrt" => f64::sqrt,
                    "sin" => f64::sin,
                    "cos" => f64::cos,
                    _ => {
                        self.pos = start;
                        return Err(self.error(format!("unknown name {name:?}")));
                    }
                };
                self.expect(b'(')?;
                let v = self.expr()?;
                self.expect(b')')?;
                Ok(f(v))
            }
            _ => Err(self.error("expected a value")),
        }
    }
}

pub fn evaluate(src: &str) -> Result<f64, ExprError> {
    let mut p = Parser { src, bytes: src.as_bytes(), pos: 0 };
    let v = p.expr()?;
    if p.peek().is_some() {
        return Err(p.error("trailing input"));
    }
    if !v.is_finite() {
        return Err(p.error("value is not finite"));
    }
    Ok(v)
}
