//! Shared cursor for the small call-style grammars used by rule, set and
//! family literals (`name(arg, arg, ...)`).

use crate::error::{Error, Result};

pub(crate) struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub(crate) fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    pub(crate) fn err(&self, message: impl Into<String>) -> Error {
        Error::parse(self.src, self.pos, message)
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    pub(crate) fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    pub(crate) fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{c}'")))
        }
    }

    pub(crate) fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let len = rest
            .char_indices()
            .find(|&(_, c)| !(c.is_ascii_alphanumeric() || c == '_' || c == '-'))
            .map(|(i, _)| i)
            .unwrap_or(rest.len());
        if len == 0 || !rest.starts_with(|c: char| c.is_ascii_alphabetic()) {
            return Err(self.err("expected a name"));
        }
        self.pos += len;
        Ok(rest[..len].to_ascii_lowercase())
    }

    fn digits(&mut self) -> &'a str {
        let rest = &self.src[self.pos..];
        let len = rest
            .char_indices()
            .find(|&(_, c)| !c.is_ascii_digit())
            .map(|(i, _)| i)
            .unwrap_or(rest.len());
        self.pos += len;
        &rest[..len]
    }

    pub(crate) fn uint(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        let d = self.digits();
        if d.is_empty() {
            return Err(self.err("expected a non-negative integer"));
        }
        d.parse().map_err(|_| Error::parse(self.src, start, "integer out of range"))
    }

    pub(crate) fn int(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        let neg = self.eat('-');
        if !neg {
            self.eat('+');
        }
        self.skip_ws();
        let d = self.digits();
        if d.is_empty() {
            return Err(self.err("expected an integer"));
        }
        let v: i64 = d
            .parse()
            .map_err(|_| Error::parse(self.src, start, "integer out of range"))?;
        Ok(if neg { -v } else { v })
    }

    /// Comma-separated unsigned integers up to (not including) `close`.
    pub(crate) fn uint_list(&mut self, close: char) -> Result<Vec<u64>> {
        let mut out = Vec::new();
        if self.peek() == Some(close) {
            return Ok(out);
        }
        loop {
            out.push(self.uint()?);
            if !self.eat(',') {
                break;
            }
        }
        Ok(out)
    }

    pub(crate) fn finish(&mut self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(c) => Err(self.err(format!("unexpected trailing '{c}'"))),
        }
    }

    pub(crate) fn pos(&self) -> usize {
        self.pos
    }

    pub(crate) fn set_pos(&mut self, pos: usize) {
        self.pos = pos;
    }
}

/// Parse a comma-separated list of positive integers such as `2,3`.
pub fn parse_vector(text: &str) -> Result<Vec<u64>> {
    let mut c = Cursor::new(text);
    let v = c.uint_list('\0')?;
    c.finish()?;
    if v.is_empty() {
        return Err(Error::parse(text, 0, "empty vector"));
    }
    Ok(v)
}
