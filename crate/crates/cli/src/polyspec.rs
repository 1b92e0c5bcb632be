//! Polynomial input: signed terms `[coef][x[^exp]]` with integer or `p/q`
//! coefficients, whitespace ignored, or a coefficient list `c0,c1,...`.
//! `Polynomial`'s `Display` output is accepted, so printing and re-parsing
//! is a fixed point.

use steinforge::{Polynomial, Rational};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpecError {
    #[error("empty polynomial")]
    Empty,
    /// `position` is the 1-based character column in the input.
    #[error("syntax error at column {position}: found {found}, expected {}", expected.join(" or "))]
    Syntax {
        position: usize,
        found: String,
        expected: Vec<&'static str>,
    },
    #[error("invalid coefficient `{text}` at column {position}: {reason}")]
    Coefficient {
        position: usize,
        text: String,
        reason: String,
    },
}

struct Cursor {
    chars: Vec<(usize, char)>,
    at: usize,
    end_column: usize,
}

impl Cursor {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.at).map(|&(_, c)| c)
    }

    fn column(&self) -> usize {
        self.chars.get(self.at).map_or(self.end_column, |&(p, _)| p)
    }

    fn bump(&mut self) {
        self.at += 1;
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            s.push(c);
            self.bump();
        }
        s
    }

    fn error(&self, expected: Vec<&'static str>) -> SpecError {
        SpecError::Syntax {
            position: self.column(),
            found: self.peek().map_or("end of input".into(), |c| format!("'{c}'")),
            expected,
        }
    }
}

pub fn parse_polynomial(text: &str) -> Result<Polynomial, SpecError> {
    let chars: Vec<(usize, char)> = text
        .chars()
        .enumerate()
        .filter(|(_, c)| !c.is_whitespace())
        .map(|(i, c)| (i + 1, c))
        .collect();
    if chars.is_empty() {
        return Err(SpecError::Empty);
    }
    let mut cur = Cursor {
        chars,
        at: 0,
        end_column: text.chars().count() + 1,
    };
    let mut coeffs: Vec<Rational> = Vec::new();
    let mut first = true;
    while cur.peek().is_some() {
        let negative = if cur.eat('-') {
            true
        } else if cur.eat('+') || first {
            false
        } else {
            return Err(cur.error(vec!["'+'", "'-'", "end of input"]));
        };
        first = false;
        let (exp, mut c) = term(&mut cur)?;
        if negative {
            c = -c;
        }
        if coeffs.len() <= exp {
            coeffs.resize(exp + 1, Rational::zero());
        }
        coeffs[exp] = &coeffs[exp] + &c;
    }
    Ok(Polynomial::from_coeffs(coeffs))
}

/// One unsigned term; returns its exponent and coefficient.
fn term(cur: &mut Cursor) -> Result<(usize, Rational), SpecError> {
    let start = cur.column();
    let numer = cur.digits();
    let coef = if numer.is_empty() {
        None
    } else {
        let mut text = numer;
        if cur.eat('/') {
            let denom = cur.digits();
            if denom.is_empty() {
                return Err(cur.error(vec!["denominator digits"]));
            }
            text = format!("{text}/{denom}");
        }
        let value: Rational = text.parse().map_err(|e: steinforge::Error| SpecError::Coefficient {
            position: start,
            text: text.clone(),
            reason: e.to_string(),
        })?;
        Some(value)
    };
    if coef.is_some() {
        cur.eat('*');
    }
    if !cur.eat('x') {
        return coef
            .map(|c| (0, c))
            .ok_or_else(|| cur.error(vec!["coefficient", "'x'"]));
    }
    let exp = if cur.eat('^') {
        let at = cur.column();
        let digits = cur.digits();
        if digits.is_empty() {
            return Err(cur.error(vec!["exponent digits"]));
        }
        digits.parse::<usize>().map_err(|e| SpecError::Coefficient {
            position: at,
            text: digits.clone(),
            reason: format!("exponent out of range: {e}"),
        })?
    } else {
        1
    };
    Ok((exp, coef.unwrap_or_else(Rational::one)))
}

/// `c0,c1,...` in increasing degree.
pub fn parse_coefficients(text: &str) -> Result<Polynomial, SpecError> {
    if text.trim().is_empty() {
        return Err(SpecError::Empty);
    }
    let mut column = 1;
    let mut coeffs = Vec::new();
    for item in text.split(',') {
        let value = item.trim().parse::<Rational>().map_err(|e| SpecError::Coefficient {
            position: column,
            text: item.trim().to_string(),
            reason: e.to_string(),
        })?;
        coeffs.push(value);
        column += item.chars().count() + 1;
    }
    Ok(Polynomial::from_coeffs(coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn published_examples() {
        assert_eq!(
            parse_polynomial("x^3 - 3x").unwrap(),
            Polynomial::from_ints(&[0, -3, 0, 1])
        );
        assert_eq!(
            parse_coefficients("3,0,-6,0,1").unwrap(),
            Polynomial::from_ints(&[3, 0, -6, 0, 1])
        );
        assert_eq!(
            parse_polynomial("1/2x^2 + x").unwrap(),
            Polynomial::from_coeffs(vec![Rational::zero(), Rational::one(), Rational::new(1, 2)])
        );
    }

    #[test]
    fn forms() {
        assert_eq!(parse_polynomial(" - x ").unwrap(), Polynomial::from_ints(&[0, -1]));
        assert_eq!(
            parse_polynomial("2*x^2+x^2-7").unwrap(),
            Polynomial::from_ints(&[-7, 0, 3])
        );
        assert_eq!(parse_polynomial("x - x").unwrap(), Polynomial::zero());
        assert_eq!(parse_polynomial("0").unwrap(), Polynomial::zero());
        assert_eq!(
            parse_polynomial("-3/6").unwrap(),
            Polynomial::from_coeffs(vec![Rational::new(-1, 2)])
        );
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(parse_polynomial("   "), Err(SpecError::Empty));
        assert_eq!(
            parse_polynomial("x^2 + y"),
            Err(SpecError::Syntax {
                position: 7,
                found: "'y'".into(),
                expected: vec!["coefficient", "'x'"],
            })
        );
        assert!(matches!(
            parse_polynomial("x 2"),
            Err(SpecError::Syntax { position: 3, .. })
        ));
        assert!(matches!(
            parse_polynomial("x^"),
            Err(SpecError::Syntax { position: 3, .. })
        ));
        assert!(matches!(
            parse_polynomial("1/0x"),
            Err(SpecError::Coefficient { position: 1, .. })
        ));
        assert!(matches!(parse_polynomial("3/"), Err(SpecError::Syntax { .. })));
        assert!(matches!(
            parse_coefficients("1, a"),
            Err(SpecError::Coefficient { position: 3, .. })
        ));
    }

    proptest! {
        #[test]
        fn print_parse_is_a_fixed_point(c in prop::collection::vec((-20i64..20, 1i64..6), 0..7)) {
            let p = Polynomial::from_coeffs(c.iter().map(|&(n, d)| Rational::new(n, d)).collect());
            let printed = p.to_string();
            let back = parse_polynomial(&printed).unwrap();
            prop_assert_eq!(&back, &p);
            prop_assert_eq!(back.to_string(), printed);
        }
    }
}
