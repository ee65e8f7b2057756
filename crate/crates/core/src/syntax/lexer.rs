use std::fmt;

use super::{ParseError, ParseErrorKind};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// A set literal such as `{}` or `{u,v}` used as a data constant name.
    SetLit(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Dot,
    Plus,
    Slash,
    Eq,
    /// `---` (three or more dashes).
    Bar,
    Dash,
    Arrow,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) | Tok::SetLit(s) => write!(f, "`{s}`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Slash => f.write_str("`/`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Bar => f.write_str("`---`"),
            Tok::Dash => f.write_str("`-`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

pub fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let mut push = |tok: Tok, len: usize, i: &mut usize, col: &mut usize| {
            out.push(Token { tok, line: tl, col: tc });
            *i += len;
            *col += len;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '{' => match set_literal(&chars[i..]) {
                Some(len) => {
                    let text: String = chars[i..i + len].iter().collect();
                    push(Tok::SetLit(text), len, &mut i, &mut col);
                }
                None => push(Tok::LBrace, 1, &mut i, &mut col),
            },
            '}' => push(Tok::RBrace, 1, &mut i, &mut col),
            '(' => push(Tok::LParen, 1, &mut i, &mut col),
            ')' => push(Tok::RParen, 1, &mut i, &mut col),
            ',' => push(Tok::Comma, 1, &mut i, &mut col),
            '.' => push(Tok::Dot, 1, &mut i, &mut col),
            '+' => push(Tok::Plus, 1, &mut i, &mut col),
            '/' => push(Tok::Slash, 1, &mut i, &mut col),
            '=' => push(Tok::Eq, 1, &mut i, &mut col),
            '-' => {
                let dashes = chars[i..].iter().take_while(|&&c| c == '-').count();
                if dashes >= 3 {
                    push(Tok::Bar, dashes, &mut i, &mut col);
                } else if chars.get(i + 1) == Some(&'>') {
                    push(Tok::Arrow, 2, &mut i, &mut col);
                } else {
                    push(Tok::Dash, 1, &mut i, &mut col);
                }
            }
            c if is_ident_char(c) => {
                let len = chars[i..].iter().take_while(|&&c| is_ident_char(c)).count();
                let text: String = chars[i..i + len].iter().collect();
                push(Tok::Ident(text), len, &mut i, &mut col);
            }
            other => {
                return Err(ParseError {
                    line,
                    col,
                    kind: ParseErrorKind::Syntax(format!("unexpected character {other:?}")),
                })
            }
        }
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

/// Length of a set literal starting at `s[0] == '{'`: `{}` or `{` followed by
/// identifier characters and commas, closed without whitespace.
fn set_literal(s: &[char]) -> Option<usize> {
    match s.get(1) {
        Some('}') => Some(2),
        Some(&c) if is_ident_char(c) => {
            let body = s[1..].iter().take_while(|&&c| is_ident_char(c) || c == ',').count();
            (s.get(1 + body) == Some(&'}')).then_some(body + 2)
        }
        _ => None,
    }
}
