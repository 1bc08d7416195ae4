//! Tokenizer for the Prolog-like surface syntax shared by fact files and the
//! pattern DSL: `name(arg, ...)`, `%` line comments, integer literals.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok<'a> {
    /// Lowercase-initial identifier.
    Ident(&'a str),
    /// Uppercase-initial identifier.
    Var(&'a str),
    Wild,
    Int(i128),
    LParen,
    RParen,
    Comma,
    Dot,
    Colon,
}

impl fmt::Display for Tok<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) | Tok::Var(s) => write!(f, "`{s}`"),
            Tok::Wild => f.write_str("`_`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Colon => f.write_str("`:`"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexError {
    pub pos: Pos,
    pub msg: String,
}

pub struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    at: usize,
    line: usize,
    line_start: usize,
}

impl<'a> Lexer<'a> {
    pub fn new(src: &'a str) -> Self {
        Lexer {
            src,
            bytes: src.as_bytes(),
            at: 0,
            line: 1,
            line_start: 0,
        }
    }

    pub fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            col: self.at - self.line_start + 1,
        }
    }

    fn skip_trivia(&mut self) {
        while let Some(&b) = self.bytes.get(self.at) {
            match b {
                b'\n' => {
                    self.at += 1;
                    self.line += 1;
                    self.line_start = self.at;
                }
                b' ' | b'\t' | b'\r' => self.at += 1,
                b'%' => {
                    while self.bytes.get(self.at).is_some_and(|&c| c != b'\n') {
                        self.at += 1;
                    }
                }
                _ => break,
            }
        }
    }

    /// Next token with its starting position, `None` at end of input.
    pub fn next_token(&mut self) -> Result<Option<(Pos, Tok<'a>)>, LexError> {
        self.skip_trivia();
        let pos = self.pos();
        let Some(&b) = self.bytes.get(self.at) else {
            return Ok(None);
        };
        let single = match b {
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b',' => Some(Tok::Comma),
            b'.' => Some(Tok::Dot),
            b':' => Some(Tok::Colon),
            _ => None,
        };
        if let Some(t) = single {
            self.at += 1;
            return Ok(Some((pos, t)));
        }
        if b == b'-' || b.is_ascii_digit() {
            let start = self.at;
            self.at += 1;
            while self.bytes.get(self.at).is_some_and(u8::is_ascii_digit) {
                self.at += 1;
            }
            let text = &self.src[start..self.at];
            return text
                .parse::<i128>()
                .map(|n| Some((pos, Tok::Int(n))))
                .map_err(|_| LexError {
                    pos,
                    msg: format!("malformed integer `{text}`"),
                });
        }
        if b == b'_' || b.is_ascii_alphabetic() {
            let start = self.at;
            while self
                .bytes
                .get(self.at)
                .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_')
            {
                self.at += 1;
            }
            let word = &self.src[start..self.at];
            let tok = if word == "_" {
                Tok::Wild
            } else if b.is_ascii_uppercase() {
                Tok::Var(word)
            } else if b == b'_' {
                return Err(LexError {
                    pos,
                    msg: format!("named wildcard `{word}` is not supported; use `_`"),
                });
            } else {
                Tok::Ident(word)
            };
            return Ok(Some((pos, tok)));
        }
        let ch = self.src[self.at..].chars().next().unwrap_or('?');
        Err(LexError {
            pos,
            msg: format!("unexpected character `{ch}`"),
        })
    }
}
