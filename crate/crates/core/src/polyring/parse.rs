use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use super::{Monomial, Polynomial, Scalar};

/// Syntax error at a 0-based character offset into the input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} at column {}", .position + 1)]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

/// Parses a polynomial in `num_vars` variables.
///
/// Grammar (whitespace insignificant):
///
/// ```text
/// expr   := ['+'|'-'] term (('+'|'-') term)*
/// term   := factor ('*' factor)*
/// factor := atom ('^' positive-integer)?
/// atom   := integer ('/' positive-integer)? | variable | '(' expr ')'
/// variable := 'X' digits | 'x' | 'y' | 'z' | 'w'
/// ```
pub fn parse_poly(text: &str, num_vars: usize) -> Result<Polynomial, super::PolyError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        num_vars,
        end: text.chars().count(),
    };
    let p = parser.expr()?;
    if let Some(tok) = parser.tokens.get(parser.pos) {
        return Err(parser.error_at(tok.pos, "unexpected token").into());
    }
    Ok(p)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Var(usize),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    pos: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '+' => Tok::Plus,
            '-' | '\u{2212}' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '0'..='9' => {
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                out.push(Token {
                    tok: Tok::Int(digits.parse().expect("ascii digits")),
                    pos: start,
                });
                continue;
            }
            'X' => {
                i += 1;
                let digits_start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if digits_start == i {
                    return Err(ParseError {
                        position: start,
                        message: "expected variable index after 'X'".into(),
                    });
                }
                let digits: String = chars[digits_start..i].iter().collect();
                let index = digits.parse().map_err(|_| ParseError {
                    position: start,
                    message: "variable index too large".into(),
                })?;
                out.push(Token {
                    tok: Tok::Var(index),
                    pos: start,
                });
                continue;
            }
            'x' => Tok::Var(0),
            'y' => Tok::Var(1),
            'z' => Tok::Var(2),
            'w' => Tok::Var(3),
            other => {
                return Err(ParseError {
                    position: start,
                    message: format!("unexpected character '{other}'"),
                })
            }
        };
        out.push(Token { tok, pos: start });
        i += 1;
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    num_vars: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn here(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |t| t.pos)
    }

    fn error_at(&self, position: usize, message: &str) -> ParseError {
        ParseError {
            position,
            message: message.to_string(),
        }
    }

    fn expr(&mut self) -> Result<Polynomial, super::PolyError> {
        let mut negate = false;
        match self.peek() {
            Some(Tok::Minus) => {
                negate = true;
                self.pos += 1;
            }
            Some(Tok::Plus) => self.pos += 1,
            _ => {}
        }
        let first = self.term()?;
        let mut acc = if negate { -first } else { first };
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, super::PolyError> {
        let mut acc = self.factor()?;
        while let Some(Tok::Star) = self.peek() {
            self.pos += 1;
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial, super::PolyError> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.pos += 1;
            let at = self.here();
            let e = self.positive_int()?;
            let e: u32 = e
                .try_into()
                .map_err(|_| self.error_at(at, "exponent too large"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn positive_int(&mut self) -> Result<BigInt, ParseError> {
        let at = self.here();
        match self.peek().cloned() {
            Some(Tok::Int(v)) if !v.is_zero() => {
                self.pos += 1;
                Ok(v)
            }
            Some(Tok::Int(_)) => Err(self.error_at(at, "expected positive integer")),
            _ => Err(self.error_at(at, "expected integer")),
        }
    }

    fn atom(&mut self) -> Result<Polynomial, super::PolyError> {
        let at = self.here();
        match self.peek().cloned() {
            Some(Tok::Int(num)) => {
                self.pos += 1;
                let mut value = Scalar::from_integer(num);
                if let Some(Tok::Slash) = self.peek() {
                    self.pos += 1;
                    let den = self.positive_int()?;
                    value /= Scalar::from_integer(den);
                }
                Ok(Polynomial::constant(value, self.num_vars))
            }
            Some(Tok::Var(index)) => {
                self.pos += 1;
                if index >= self.num_vars {
                    return Err(super::PolyError::VarOutOfRange {
                        index,
                        num_vars: self.num_vars,
                    });
                }
                Ok(Polynomial::monomial(
                    Monomial::var(self.num_vars, index),
                    Scalar::from_integer(1.into()),
                ))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => Err(self.error_at(self.here(), "expected ')'").into()),
                }
            }
            Some(_) => Err(self.error_at(at, "unexpected token").into()),
            None => Err(self.error_at(at, "unexpected end of input").into()),
        }
    }
}
