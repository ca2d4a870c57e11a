//! Character cursor shared by the wrapper-language parsers.

use std::fmt;

use thiserror::Error;

/// Line/column (1-based) of a parse failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("syntax error at {location}: {message}")]
pub struct SyntaxError {
    pub location: Location,
    pub message: String,
}

#[derive(Clone)]
pub(crate) struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    pub fn location(&self) -> Location {
        let before = &self.src[..self.pos];
        let line = before.matches('\n').count() + 1;
        let column = before.rfind('\n').map_or(before.chars().count(), |i| {
            before[i + 1..].chars().count()
        }) + 1;
        Location { line, column }
    }

    pub fn error<T>(&self, message: impl Into<String>) -> Result<T, SyntaxError> {
        Err(SyntaxError {
            location: self.location(),
            message: message.into(),
        })
    }

    pub fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    pub fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.src.len()
    }

    /// Skips whitespace and `%`/`//` line comments.
    pub fn skip_ws(&mut self) {
        loop {
            let rest = self.rest();
            let trimmed = rest.trim_start();
            self.pos += rest.len() - trimmed.len();
            if trimmed.starts_with('%') || trimmed.starts_with("//") {
                let skip = trimmed.find('\n').unwrap_or(trimmed.len());
                self.pos += skip;
            } else {
                break;
            }
        }
    }

    pub fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    /// Peek without skipping whitespace first.
    pub fn peek_raw(&self) -> Option<char> {
        self.rest().chars().next()
    }

    pub fn bump(&mut self) -> Option<char> {
        let ch = self.rest().chars().next()?;
        self.pos += ch.len_utf8();
        Some(ch)
    }

    pub fn looking_at(&mut self, s: &str) -> bool {
        self.skip_ws();
        self.rest().starts_with(s)
    }

    pub fn eat(&mut self, s: &str) -> bool {
        if self.looking_at(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, s: &str) -> Result<(), SyntaxError> {
        if self.eat(s) {
            Ok(())
        } else {
            let found = self.rest().chars().next().map_or("end of input".to_string(), |c| format!("'{c}'"));
            self.error(format!("expected '{s}', found {found}"))
        }
    }

    /// Matches a keyword not followed by an identifier character.
    pub fn eat_keyword(&mut self, kw: &str) -> bool {
        if !self.looking_at(kw) {
            return false;
        }
        let after = self.rest()[kw.len()..].chars().next();
        if after.is_some_and(is_ident_char) {
            return false;
        }
        self.pos += kw.len();
        true
    }

    /// Identifier: letter or `_` followed by alphanumerics, `_`, `-`, `'`.
    pub fn ident(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let rest = self.rest();
        let mut chars = rest.char_indices();
        match chars.next() {
            Some((_, c)) if c.is_alphabetic() || c == '_' => {}
            _ => return None,
        }
        // '-' continues an identifier only before another identifier char,
        // so `a->b` lexes as `a`, `->`, `b`.
        let bytes = rest.as_bytes();
        let len = chars
            .find(|&(i, c)| {
                !is_ident_char(c)
                    || (c == '-' && !bytes.get(i + 1).is_some_and(|&b| (b as char).is_ascii_alphanumeric()))
            })
            .map_or(rest.len(), |(i, _)| i);
        self.pos += len;
        Some(&rest[..len])
    }

    pub fn expect_ident(&mut self, what: &str) -> Result<&'a str, SyntaxError> {
        match self.ident() {
            Some(s) => Ok(s),
            None => self.error(format!("expected {what}")),
        }
    }

    pub fn number(&mut self) -> Option<usize> {
        self.skip_ws();
        let rest = self.rest();
        let len = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
        if len == 0 {
            return None;
        }
        let n = rest[..len].parse().ok()?;
        self.pos += len;
        Some(n)
    }

    /// Double-quoted string with `\"`, `\\`, `\n`, `\t` escapes.
    pub fn string(&mut self) -> Result<String, SyntaxError> {
        self.skip_ws();
        if self.peek_raw() != Some('"') {
            return self.error("expected string literal");
        }
        self.pos += 1;
        let mut out = String::new();
        loop {
            match self.bump() {
                None => return self.error("unterminated string literal"),
                Some('"') => return Ok(out),
                Some('\\') => match self.bump() {
                    Some('n') => out.push('\n'),
                    Some('t') => out.push('\t'),
                    Some(c @ ('"' | '\\')) => out.push(c),
                    _ => return self.error("bad escape in string literal"),
                },
                Some(c) => out.push(c),
            }
        }
    }

    pub fn finish(&mut self) -> Result<(), SyntaxError> {
        if self.at_end() {
            Ok(())
        } else {
            let c = self.rest().chars().next().unwrap_or(' ');
            self.error(format!("unexpected '{c}'"))
        }
    }
}

pub(crate) fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '\'')
}

/// Quotes a string so that [`Cursor::string`] reads it back.
pub fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strings_round_trip() {
        for s in ["", "item", "a \"q\" \\ b\n"] {
            let q = quote(s);
            assert_eq!(Cursor::new(&q).string().unwrap(), s);
        }
    }

    #[test]
    fn location_tracks_lines() {
        let mut c = Cursor::new("ab\n  cd");
        c.ident();
        c.skip_ws();
        assert_eq!(c.location(), Location { line: 2, column: 3 });
    }

    #[test]
    fn keywords_need_a_boundary() {
        let mut c = Cursor::new("txtx");
        assert!(!c.eat_keyword("txt"));
        let mut c = Cursor::new("txt.");
        assert!(c.eat_keyword("txt"));
    }

    #[test]
    fn arrow_is_not_part_of_an_identifier() {
        let mut c = Cursor::new("tr->td my-tag");
        assert_eq!(c.ident(), Some("tr"));
        assert!(c.eat("->"));
        assert_eq!(c.ident(), Some("td"));
        assert_eq!(c.ident(), Some("my-tag"));
    }
}
