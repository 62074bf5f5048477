//! Text shorthand for polynomials, e.g. `z0^2 + z1^2 + z2^2` or
//! `(1+2i)*z0*z1^2 - 3*z2^3`.
//!
//! Supports `+`, `-`, `*`, integer powers `^n`, parentheses, real literals,
//! imaginary literals (`2i`, `i`) and variables `z<k>`. The expanded result
//! must be homogeneous.

use num_complex::Complex64;

use super::{sparse_mul, Exponents, HomogeneousPolynomial, Sparse};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Imag(f64),
    Var(usize),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        match ch {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push(Token::Plus);
                i += 1;
            }
            '-' => {
                out.push(Token::Minus);
                i += 1;
            }
            '*' => {
                out.push(Token::Star);
                i += 1;
            }
            '^' => {
                out.push(Token::Caret);
                i += 1;
            }
            '(' => {
                out.push(Token::LParen);
                i += 1;
            }
            ')' => {
                out.push(Token::RParen);
                i += 1;
            }
            'z' => {
                let start = i + 1;
                let mut j = start;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                if j == start {
                    return Err(Error::Input(format!("variable without index at offset {i}")));
                }
                let idx: String = chars[start..j].iter().collect();
                let idx = idx
                    .parse()
                    .map_err(|_| Error::Input(format!("bad variable index '{idx}'")))?;
                out.push(Token::Var(idx));
                i = j;
            }
            'i' => {
                out.push(Token::Imag(1.0));
                i += 1;
            }
            c if c.is_ascii_digit() || c == '.' => {
                let start = i;
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_digit() || chars[j] == '.') {
                    j += 1;
                }
                // exponent part, e.g. 1e-3
                if j < chars.len() && (chars[j] == 'e' || chars[j] == 'E') {
                    let mut k = j + 1;
                    if k < chars.len() && (chars[k] == '+' || chars[k] == '-') {
                        k += 1;
                    }
                    if k < chars.len() && chars[k].is_ascii_digit() {
                        while k < chars.len() && chars[k].is_ascii_digit() {
                            k += 1;
                        }
                        j = k;
                    }
                }
                let lit: String = chars[start..j].iter().collect();
                let value: f64 = lit.parse().map_err(|_| Error::Input(format!("bad number '{lit}'")))?;
                if j < chars.len() && chars[j] == 'i' {
                    out.push(Token::Imag(value));
                    j += 1;
                } else {
                    out.push(Token::Num(value));
                }
                i = j;
            }
            other => return Err(Error::Input(format!("unexpected character '{other}' at offset {i}"))),
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    num_vars: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn constant(&self, c: Complex64) -> Sparse {
        let mut s = Sparse::new();
        s.insert(vec![0; self.num_vars], c);
        s
    }

    fn expr(&mut self) -> Result<Sparse> {
        let mut acc = match self.peek() {
            Some(Token::Minus) => {
                self.pos += 1;
                negate(self.term()?)
            }
            Some(Token::Plus) => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    add_into(&mut acc, self.term()?);
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    add_into(&mut acc, negate(self.term()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Sparse> {
        let mut acc = self.power()?;
        while self.peek() == Some(&Token::Star) {
            self.pos += 1;
            let rhs = self.power()?;
            acc = sparse_mul(&acc, &rhs);
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Sparse> {
        let base = self.atom()?;
        if self.peek() != Some(&Token::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let exp = match self.next() {
            Some(Token::Num(v)) if v >= 0.0 && v.fract() == 0.0 => v as u32,
            other => return Err(Error::Input(format!("expected integer exponent, got {other:?}"))),
        };
        let mut out = self.constant(Complex64::new(1.0, 0.0));
        for _ in 0..exp {
            out = sparse_mul(&out, &base);
        }
        Ok(out)
    }

    fn atom(&mut self) -> Result<Sparse> {
        match self.next() {
            Some(Token::Num(v)) => Ok(self.constant(Complex64::new(v, 0.0))),
            Some(Token::Imag(v)) => Ok(self.constant(Complex64::new(0.0, v))),
            Some(Token::Var(k)) => {
                let mut e: Exponents = vec![0; self.num_vars];
                e[k] = 1;
                let mut s = Sparse::new();
                s.insert(e, Complex64::new(1.0, 0.0));
                Ok(s)
            }
            Some(Token::LParen) => {
                let inner = self.expr()?;
                match self.next() {
                    Some(Token::RParen) => Ok(inner),
                    other => Err(Error::Input(format!("expected ')', got {other:?}"))),
                }
            }
            Some(Token::Minus) => Ok(negate(self.atom()?)),
            other => Err(Error::Input(format!("unexpected token {other:?}"))),
        }
    }
}

fn negate(mut s: Sparse) -> Sparse {
    for c in s.values_mut() {
        *c = -*c;
    }
    s
}

fn add_into(acc: &mut Sparse, rhs: Sparse) {
    for (e, c) in rhs {
        *acc.entry(e).or_default() += c;
    }
}

/// Parses the text shorthand. The number of variables is the larger of
/// `num_vars` (when given) and one plus the highest variable index used.
pub fn parse_polynomial(text: &str, num_vars: Option<usize>) -> Result<HomogeneousPolynomial> {
    let tokens = tokenize(text)?;
    let max_index = tokens
        .iter()
        .filter_map(|t| match t {
            Token::Var(k) => Some(*k),
            _ => None,
        })
        .max()
        .ok_or_else(|| Error::Input("polynomial uses no variables".into()))?;
    let n = num_vars.unwrap_or(0).max(max_index + 1);
    if let Some(declared) = num_vars {
        if max_index + 1 > declared {
            return Err(Error::Input(format!(
                "variable z{max_index} exceeds the {declared} declared variables"
            )));
        }
    }
    let mut parser = Parser {
        tokens,
        pos: 0,
        num_vars: n,
    };
    let sparse = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return Err(Error::Input(format!("trailing input starting at token {}", parser.pos)));
    }
    HomogeneousPolynomial::new(n, sparse)
}
