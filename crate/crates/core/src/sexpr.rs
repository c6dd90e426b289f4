//! Minimal s-expression reader shared by the structure, formula and theory
//! parsers. Comments start with ';' and run to end of line.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
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
pub enum Sexp {
    Atom(String, Pos),
    List(Vec<Sexp>, Pos),
}

impl Sexp {
    pub fn pos(&self) -> Pos {
        match self {
            Sexp::Atom(_, p) | Sexp::List(_, p) => *p,
        }
    }

    pub fn atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(s, _) => Some(s),
            Sexp::List(..) => None,
        }
    }

    pub fn list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(items, _) => Some(items),
            Sexp::Atom(..) => None,
        }
    }
}

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum SexpError {
    #[error("{pos}: unexpected ')'")]
    UnexpectedClose { pos: Pos },
    #[error("{pos}: unclosed '('")]
    UnclosedParen { pos: Pos },
    #[error("{pos}: expected a single expression, found trailing input")]
    TrailingInput { pos: Pos },
    #[error("empty input")]
    Empty,
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    at: usize,
    line: usize,
    col: usize,
}

#[derive(Debug)]
enum Token {
    Open(Pos),
    Close(Pos),
    Atom(String, Pos),
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src, bytes: src.as_bytes(), at: 0, line: 1, col: 1 }
    }

    fn bump(&mut self) {
        if self.bytes[self.at] == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        self.at += 1;
    }

    fn next_token(&mut self) -> Option<Token> {
        loop {
            if self.at >= self.bytes.len() {
                return None;
            }
            match self.bytes[self.at] {
                b' ' | b'\t' | b'\r' | b'\n' => self.bump(),
                b';' => {
                    while self.at < self.bytes.len() && self.bytes[self.at] != b'\n' {
                        self.bump();
                    }
                }
                _ => break,
            }
        }
        let pos = Pos { line: self.line, col: self.col };
        match self.bytes[self.at] {
            b'(' => {
                self.bump();
                Some(Token::Open(pos))
            }
            b')' => {
                self.bump();
                Some(Token::Close(pos))
            }
            _ => {
                let start = self.at;
                while self.at < self.bytes.len()
                    && !matches!(self.bytes[self.at], b' ' | b'\t' | b'\r' | b'\n' | b'(' | b')' | b';')
                {
                    self.bump();
                }
                Some(Token::Atom(self.src[start..self.at].to_string(), pos))
            }
        }
    }
}

/// Parse a whole source text into a sequence of top-level s-expressions.
pub fn parse_many(src: &str) -> Result<Vec<Sexp>, SexpError> {
    let mut lexer = Lexer::new(src);
    let mut stack: Vec<(Vec<Sexp>, Pos)> = Vec::new();
    let mut top = Vec::new();
    while let Some(tok) = lexer.next_token() {
        match tok {
            Token::Open(pos) => stack.push((Vec::new(), pos)),
            Token::Close(pos) => {
                let (items, open_pos) = stack.pop().ok_or(SexpError::UnexpectedClose { pos })?;
                let node = Sexp::List(items, open_pos);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(node),
                    None => top.push(node),
                }
            }
            Token::Atom(s, pos) => {
                let node = Sexp::Atom(s, pos);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(node),
                    None => top.push(node),
                }
            }
        }
    }
    if let Some((_, pos)) = stack.pop() {
        return Err(SexpError::UnclosedParen { pos });
    }
    Ok(top)
}

/// Parse exactly one s-expression; trailing input is an error.
pub fn parse_one(src: &str) -> Result<Sexp, SexpError> {
    let mut items = parse_many(src)?;
    match items.len() {
        0 => Err(SexpError::Empty),
        1 => Ok(items.pop().unwrap()),
        _ => Err(SexpError::TrailingInput { pos: items[1].pos() }),
    }
}
