//! Tokens of the specification language.

use super::DslError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Semi,
    Colon,
    Arrow,
    Eq,
    EqEq,
    Dot,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Bar,
    FatArrow,
    Comma,
    Plus,
    Caret,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Semi => "`;`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Eq => "`=`".into(),
            Tok::EqEq => "`==`".into(),
            Tok::Dot => "`.`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrack => "`[`".into(),
            Tok::RBrack => "`]`".into(),
            Tok::Bar => "`|`".into(),
            Tok::FatArrow => "`=>`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Caret => "`^`".into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

fn ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\'' || c == '@'
}

pub fn lex(src: &str) -> Result<Vec<(Tok, Span)>, DslError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let span = Span { line, col };
        let adv = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            adv(1, &mut i, &mut col);
            continue;
        }
        if c == '#' || (c == '/' && chars.get(i + 1) == Some(&'/')) {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if ident_char(c) {
            let start = i;
            while i < chars.len() && ident_char(chars[i]) {
                i += 1;
            }
            // `Y+E` is a single name
            if chars.get(i) == Some(&'+')
                && chars.get(i + 1) == Some(&'E')
                && !chars.get(i + 2).is_some_and(|&d| ident_char(d))
            {
                i += 2;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            out.push((Tok::Ident(s), span));
            continue;
        }
        let two: String = chars[i..chars.len().min(i + 2)].iter().collect();
        let (tok, n) = match two.as_str() {
            "->" => (Tok::Arrow, 2),
            "==" => (Tok::EqEq, 2),
            "=>" => (Tok::FatArrow, 2),
            _ => match c {
                ';' => (Tok::Semi, 1),
                ':' => (Tok::Colon, 1),
                '=' => (Tok::Eq, 1),
                '.' => (Tok::Dot, 1),
                '(' => (Tok::LParen, 1),
                ')' => (Tok::RParen, 1),
                '[' => (Tok::LBrack, 1),
                ']' => (Tok::RBrack, 1),
                '|' => (Tok::Bar, 1),
                ',' => (Tok::Comma, 1),
                '+' => (Tok::Plus, 1),
                '^' => (Tok::Caret, 1),
                other => {
                    return Err(DslError::syntax(span, format!("unexpected character `{other}`")))
                }
            },
        };
        out.push((tok, span));
        adv(n, &mut i, &mut col);
    }
    Ok(out)
}
