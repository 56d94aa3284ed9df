//! Complex numbers on the command line: `a`, `bi`, `a+bi`, `a-bi`, with an
//! implied unit coefficient allowed before `i`.

use num_complex::Complex64;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseComplexError {
    pub input: String,
    /// Byte offset of the offending character.
    pub position: usize,
    pub message: String,
}

impl fmt::Display for ParseComplexError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} in complex number", self.message)?;
        writeln!(f, "  {}", self.input)?;
        write!(f, "  {}^", " ".repeat(self.input[..self.position].chars().count()))
    }
}

impl std::error::Error for ParseComplexError {}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<u8> {
        self.text.as_bytes().get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> usize {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        self.pos - start
    }

    /// An unsigned decimal or scientific literal; `None` if no mantissa
    /// digits are present (the cursor is left unchanged).
    fn unsigned(&mut self) -> Option<&'a str> {
        let start = self.pos;
        let mut mantissa = self.digits();
        if self.eat(b'.') {
            mantissa += self.digits();
        }
        if mantissa == 0 {
            self.pos = start;
            return None;
        }
        let before_exp = self.pos;
        if self.eat(b'e') || self.eat(b'E') {
            let _ = self.eat(b'+') || self.eat(b'-');
            if self.digits() == 0 {
                self.pos = before_exp;
            }
        }
        Some(&self.text[start..self.pos])
    }
}

/// Parse `text` as a complex number. NaN and infinities are rejected.
pub fn parse_complex(text: &str) -> Result<Complex64, ParseComplexError> {
    let err = |position: usize, message: &str| ParseComplexError {
        input: text.to_string(),
        position,
        message: message.to_string(),
    };
    let mut cur = Cursor { text, pos: 0 };
    let value = |s: &str, at: usize| -> Result<f64, ParseComplexError> {
        let v: f64 = s.parse().map_err(|_| err(at, "invalid number"))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(err(at, "number is not finite"))
        }
    };

    let sign = |cur: &mut Cursor| {
        if cur.eat(b'-') {
            -1.0
        } else {
            cur.eat(b'+');
            1.0
        }
    };

    if text.is_empty() {
        return Err(err(0, "empty input"));
    }
    let first_sign = sign(&mut cur);
    let at = cur.pos;
    let first = cur.unsigned();
    if cur.eat(b'i') {
        let im = match first {
            Some(s) => first_sign * value(s, at)?,
            None => first_sign,
        };
        if cur.pos != text.len() {
            return Err(err(cur.pos, "unexpected character after imaginary part"));
        }
        return Ok(Complex64::new(0.0, im));
    }
    let Some(first) = first else {
        return Err(err(at, "expected a number"));
    };
    let re = first_sign * value(first, at)?;
    if cur.pos == text.len() {
        return Ok(Complex64::new(re, 0.0));
    }
    let sign_at = cur.pos;
    if !matches!(cur.peek(), Some(b'+' | b'-')) {
        return Err(err(sign_at, "expected '+' or '-' before the imaginary part"));
    }
    let second_sign = sign(&mut cur);
    let at = cur.pos;
    let second = cur.unsigned();
    if !cur.eat(b'i') {
        return Err(err(cur.pos, "expected 'i' after the imaginary part"));
    }
    let im = match second {
        Some(s) => second_sign * value(s, at)?,
        None => second_sign,
    };
    if cur.pos != text.len() {
        return Err(err(cur.pos, "unexpected character after imaginary part"));
    }
    Ok(Complex64::new(re, im))
}

fn fmt_part(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{a}")
    } else {
        format!("{a:e}")
    }
}

/// Inverse of [`parse_complex`] for finite values, always `a±bi`.
pub fn format_complex(z: Complex64) -> String {
    let re_sign = if z.re.is_sign_negative() { "-" } else { "" };
    let im_sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{re_sign}{}{im_sign}{}i", fmt_part(z.re), fmt_part(z.im))
}
