//! Small recursive-descent parser for rational expressions in T.

use super::field::FqElem;
use super::poly::Poly;
use super::ExactError;

type Frac = (Poly, Poly);

struct Parser<'a> {
    p: u32,
    chars: Vec<char>,
    pos: usize,
    src: &'a str,
}

pub fn parse_rational(p: u32, s: &str) -> Result<(Poly, Poly), ExactError> {
    let mut parser = Parser { p, chars: s.chars().filter(|c| !c.is_whitespace()).collect(), pos: 0, src: s };
    let out = parser.expr()?;
    if parser.pos != parser.chars.len() {
        return Err(parser.err("trailing input"));
    }
    Ok(out)
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> ExactError {
        ExactError::Parse(format!("{msg} at position {} in {:?}", self.pos, self.src))
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Frac, ExactError> {
        let mut acc = match self.peek() {
            Some('-') => {
                self.pos += 1;
                let (n, d) = self.term()?;
                (-&n, d)
            }
            Some('+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        while let Some(c) = self.peek() {
            if c != '+' && c != '-' {
                break;
            }
            self.pos += 1;
            let (n, d) = self.term()?;
            let n = if c == '-' { -&n } else { n };
            acc = (&(&acc.0 * &d) + &(&n * &acc.1), &acc.1 * &d);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Frac, ExactError> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    let (n, d) = self.power()?;
                    acc = (&acc.0 * &n, &acc.1 * &d);
                }
                Some('/') => {
                    self.pos += 1;
                    let (n, d) = self.power()?;
                    if n.is_zero() {
                        return Err(self.err("division by zero"));
                    }
                    acc = (&acc.0 * &d, &acc.1 * &n);
                }
                Some(c) if c == 'T' || c == '(' || c.is_ascii_digit() => {
                    let (n, d) = self.power()?;
                    acc = (&acc.0 * &n, &acc.1 * &d);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Frac, ExactError> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let k = self.integer()?;
            return Ok((base.0.pow(k), base.1.pow(k)));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<u64, ExactError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().map_err(|_| self.err("integer overflow"))
    }

    fn atom(&mut self) -> Result<Frac, ExactError> {
        let p = self.p;
        match self.peek() {
            Some('T') => {
                self.pos += 1;
                Ok((Poly::t(p), Poly::one(p)))
            }
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let k = self.integer()?;
                let c = FqElem::new((k % p as u64) as i64, p);
                Ok((Poly::constant(c), Poly::one(p)))
            }
            _ => Err(self.err("unexpected token")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction() {
        let (n, d) = parse_rational(5, "1/T^2").unwrap();
        assert!(n.is_one());
        assert_eq!(d, Poly::new(5, &[0, 0, 1]));
    }

    #[test]
    fn implicit_product_and_negation() {
        let (n, d) = parse_rational(5, "-3T(T+1)").unwrap();
        assert!(d.is_one());
        assert_eq!(n, Poly::new(5, &[0, -3, -3]));
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_rational(5, "T+").is_err());
        assert!(parse_rational(5, "T)").is_err());
    }
}
