//! Tokens of the `.gct` format.

use super::{DslError, ErrorKind, Pos};
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    /// `d/dx`
    FrameSym(String),
    Number(f64),
    Str(String),
    Punct(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) | Tok::FrameSym(s) => write!(f, "`{s}`"),
            Tok::Number(x) => write!(f, "number {x}"),
            Tok::Str(s) => write!(f, "string {s:?}"),
            Tok::Punct(p) => write!(f, "`{p}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

const PUNCTS: [&str; 16] = [
    "->", ".", ";", ",", "(", ")", "[", "]", "{", "}", "=", "+", "-", "*", "/", "^",
];

pub fn tokenize(text: &str) -> Result<Vec<Token>, DslError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, to: usize| {
        while *i < to {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c.is_whitespace() {
            let to = i + 1;
            advance(&mut i, &mut line, &mut col, to);
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                let to = i + 1;
                advance(&mut i, &mut line, &mut col, to);
            }
            continue;
        }
        if c == 'd' && chars.get(i + 1) == Some(&'/') && chars.get(i + 2) == Some(&'d') {
            let start = i + 3;
            let mut end = start;
            while end < chars.len() && is_ident_char(chars[end]) {
                end += 1;
            }
            if end > start && is_ident_start(chars[start]) {
                let name: String = chars[start..end].iter().collect();
                out.push(Token {
                    tok: Tok::FrameSym(format!("d/d{name}")),
                    pos,
                });
                advance(&mut i, &mut line, &mut col, end);
                continue;
            }
        }
        if is_ident_start(c) {
            let mut end = i;
            while end < chars.len() && is_ident_char(chars[end]) {
                end += 1;
            }
            out.push(Token {
                tok: Tok::Ident(chars[i..end].iter().collect()),
                pos,
            });
            advance(&mut i, &mut line, &mut col, end);
            continue;
        }
        if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(char::is_ascii_digit)) {
            let mut end = i;
            while end < chars.len() && (chars[end].is_ascii_digit() || chars[end] == '.') {
                end += 1;
            }
            if end < chars.len() && (chars[end] == 'e' || chars[end] == 'E') {
                let mut e = end + 1;
                if e < chars.len() && (chars[e] == '+' || chars[e] == '-') {
                    e += 1;
                }
                if e < chars.len() && chars[e].is_ascii_digit() {
                    while e < chars.len() && chars[e].is_ascii_digit() {
                        e += 1;
                    }
                    end = e;
                }
            }
            let lit: String = chars[i..end].iter().collect();
            let value = lit
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| DslError::new(pos, ErrorKind::BadNumber(lit.clone())))?;
            out.push(Token {
                tok: Tok::Number(value),
                pos,
            });
            advance(&mut i, &mut line, &mut col, end);
            continue;
        }
        if c == '"' {
            let mut end = i + 1;
            while end < chars.len() && chars[end] != '"' && chars[end] != '\n' {
                end += 1;
            }
            if end >= chars.len() || chars[end] != '"' {
                return Err(DslError::new(pos, ErrorKind::UnterminatedString));
            }
            out.push(Token {
                tok: Tok::Str(chars[i + 1..end].iter().collect()),
                pos,
            });
            advance(&mut i, &mut line, &mut col, end + 1);
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        match PUNCTS.iter().find(|p| rest.starts_with(**p)) {
            Some(p) => {
                out.push(Token {
                    tok: Tok::Punct(p),
                    pos,
                });
                let to = i + p.len();
                advance(&mut i, &mut line, &mut col, to);
            }
            None => return Err(DslError::new(pos, ErrorKind::UnexpectedChar(c))),
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        pos: Pos { line, col },
    });
    Ok(out)
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}
