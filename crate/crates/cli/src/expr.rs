//! Monomial sums over `x` with decimal or rational coefficients, optionally
//! scaled by powers of `eps`: `x`, `x + x^2 - eps`, `1/3 x^2 - 0.5*eps*x`.

use divergent_core::{Error, FormalSeries, Result};

#[derive(Debug, Clone, PartialEq)]
struct Monomial {
    coeff: f64,
    x_pow: usize,
    eps_pow: i32,
}

/// A parsed right-hand side `g(x)` whose coefficients may depend on `eps`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    terms: Vec<Monomial>,
    source: String,
}

impl Polynomial {
    pub fn parse(text: &str) -> Result<Self> {
        let mut p = Parser {
            src: text,
            chars: text.chars().filter(|c| !c.is_whitespace()).collect(),
            pos: 0,
        };
        let terms = p.sum()?;
        Ok(Polynomial {
            terms,
            source: text.trim().to_string(),
        })
    }

    pub fn degree(&self) -> usize {
        self.terms.iter().map(|t| t.x_pow).max().unwrap_or(0)
    }

    pub fn uses_eps(&self) -> bool {
        self.terms.iter().any(|t| t.eps_pow != 0)
    }

    /// Dense coefficients `g_0..g_order` at the given `eps`; `order` is raised
    /// to the degree if needed.
    pub fn series(&self, eps: f64, order: usize) -> Result<FormalSeries> {
        let mut c = vec![0.0; order.max(self.degree()) + 1];
        for t in &self.terms {
            c[t.x_pow] += t.coeff * eps.powi(t.eps_pow);
        }
        FormalSeries::from_real(0, &c, self.source.clone())
    }
}

struct Parser<'a> {
    src: &'a str,
    chars: Vec<char>,
    pos: usize,
}

impl Parser<'_> {
    fn fail(&self, what: &str) -> Error {
        Error::Configuration(format!(
            "cannot parse '{}' as a sum of monomials: {what} at position {}",
            self.src, self.pos
        ))
    }

    fn peek(&self) -> Option<char> {
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

    fn sum(&mut self) -> Result<Vec<Monomial>> {
        if self.chars.is_empty() {
            return Err(self.fail("empty expression"));
        }
        let mut terms = Vec::new();
        let mut sign = if self.eat('-') {
            -1.0
        } else {
            self.eat('+');
            1.0
        };
        loop {
            let mut t = self.term()?;
            t.coeff *= sign;
            terms.push(t);
            sign = match self.peek() {
                None => return Ok(terms),
                Some('+') => 1.0,
                Some('-') => -1.0,
                Some(_) => return Err(self.fail("expected '+' or '-'")),
            };
            self.pos += 1;
        }
    }

    /// Factors separated by `*` or simply juxtaposed (`2x^3`).
    fn term(&mut self) -> Result<Monomial> {
        let mut m = Monomial {
            coeff: 1.0,
            x_pow: 0,
            eps_pow: 0,
        };
        let mut factors = 0;
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_digit() || c == '.' => m.coeff *= self.rational()?,
                Some('x') => {
                    self.pos += 1;
                    m.x_pow += self.exponent()?;
                }
                Some('e') if self.chars[self.pos..].starts_with(&['e', 'p', 's']) => {
                    self.pos += 3;
                    m.eps_pow += self.exponent()? as i32;
                }
                _ if factors == 0 => return Err(self.fail("expected a number, 'x' or 'eps'")),
                _ => return Ok(m),
            }
            factors += 1;
            self.eat('*');
        }
    }

    fn exponent(&mut self) -> Result<usize> {
        if !self.eat('^') {
            return Ok(1);
        }
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        digits
            .parse()
            .map_err(|_| self.fail("expected a non-negative integer exponent"))
    }

    fn number(&mut self) -> Result<f64> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit() || c == '.') {
            self.pos += 1;
        }
        // scientific notation: 1e-3, 2.5E4
        if matches!(self.peek(), Some('e' | 'E')) && !self.chars[self.pos..].starts_with(&['e', 'p', 's']) {
            self.pos += 1;
            if matches!(self.peek(), Some('+' | '-')) {
                self.pos += 1;
            }
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse().map_err(|_| self.fail("malformed number"))
    }

    fn rational(&mut self) -> Result<f64> {
        let num = self.number()?;
        if !self.eat('/') {
            return Ok(num);
        }
        let den = self.number()?;
        if den == 0.0 {
            return Err(self.fail("zero denominator"));
        }
        Ok(num / den)
    }
}
