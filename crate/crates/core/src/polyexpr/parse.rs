use super::{Poly, PolyError, Vars};
use crate::fields::{Elem, Field};

/// Largest accepted exponent literal.
const MAX_EXPONENT: u32 = 1 << 16;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, PolyError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let pos = i + 1;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => out.push((Tok::Plus, pos)),
            b'-' => out.push((Tok::Minus, pos)),
            b'*' => out.push((Tok::Star, pos)),
            b'^' => out.push((Tok::Caret, pos)),
            b'(' => out.push((Tok::LParen, pos)),
            b')' => out.push((Tok::RParen, pos)),
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((Tok::Int(text[start..i].to_string()), pos));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), pos));
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(PolyError::Syntax { pos, msg: format!("unexpected character '{ch}'") });
            }
        }
        i += 1;
    }
    out.push((Tok::End, text.len() + 1));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    vars: &'a Vars,
    field: &'a Field,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn syntax<T>(&self, msg: &str) -> Result<T, PolyError> {
        let found = match self.peek() {
            Tok::End => "end of input".to_string(),
            t => format!("{t:?}"),
        };
        Err(PolyError::Syntax { pos: self.pos(), msg: format!("{msg}, found {found}") })
    }

    fn expr(&mut self) -> Result<Poly, PolyError> {
        let negate = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let mut acc = self.term()?;
        if negate {
            acc = -&acc;
        }
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    let t = self.term()?;
                    acc = &acc + &t;
                }
                Tok::Minus => {
                    self.bump();
                    let t = self.term()?;
                    acc = &acc - &t;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly, PolyError> {
        let mut acc = self.factor()?;
        while *self.peek() == Tok::Star {
            self.bump();
            let f = self.factor()?;
            acc = &acc * &f;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly, PolyError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        match self.peek().clone() {
            Tok::Int(digits) => {
                let pos = self.pos();
                self.bump();
                let k = digits
                    .parse::<u32>()
                    .ok()
                    .filter(|&k| k <= MAX_EXPONENT)
                    .ok_or(PolyError::Syntax { pos, msg: format!("exponent {digits} is too large") })?;
                Ok(base.pow(k))
            }
            Tok::Minus => Err(PolyError::NegativeExponent { pos: self.pos() }),
            _ => self.syntax("expected a nonnegative integer exponent"),
        }
    }

    fn atom(&mut self) -> Result<Poly, PolyError> {
        match self.peek().clone() {
            Tok::Int(digits) => {
                self.bump();
                let p = self.field.characteristic();
                let r = digits.bytes().fold(0u64, |acc, d| (acc * 10 + u64::from(d - b'0')) % p);
                Ok(Poly::constant(self.field, self.vars, Elem(r as u32)))
            }
            Tok::Ident(name) => {
                let pos = self.pos();
                self.bump();
                if name == "g" {
                    let g = self.field.generator().ok_or(PolyError::GeneratorInPrimeField { pos })?;
                    return Ok(Poly::constant(self.field, self.vars, g));
                }
                match self.vars.iter().position(|v| *v == name) {
                    Some(i) => Ok(Poly::var(self.field, self.vars, i)),
                    None => Err(PolyError::UnknownVariable { name, pos }),
                }
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return self.syntax("expected ')'");
                }
                self.bump();
                Ok(inner)
            }
            _ => self.syntax("expected a number, variable, 'g' or '('"),
        }
    }
}

/// Parses `text` into a canonical polynomial over `field` in the variables `vars`.
pub fn parse_poly(text: &str, vars: &Vars, field: &Field) -> Result<Poly, PolyError> {
    let toks = lex(text)?;
    let mut parser = Parser { toks, at: 0, vars, field };
    let p = parser.expr()?;
    if *parser.peek() != Tok::End {
        return parser.syntax("expected an operator or end of input");
    }
    Ok(p)
}
