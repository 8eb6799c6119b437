use super::{DslError, Pos};

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Str(String),
    Num(f64),
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Lt,
    Gt,
    Eq,
    Comma,
    Colon,
    DotDot,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier {s:?}"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::Num(n) => format!("number {n}"),
            Tok::LBrace => "'{'".into(),
            Tok::RBrace => "'}'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::LBracket => "'['".into(),
            Tok::RBracket => "']'".into(),
            Tok::Lt => "'<'".into(),
            Tok::Gt => "'>'".into(),
            Tok::Eq => "'='".into(),
            Tok::Comma => "','".into(),
            Tok::Colon => "':'".into(),
            Tok::DotDot => "'..'".into(),
            Tok::Eof => "end of file".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Spanned {
    pub tok: Tok,
    pub pos: Pos,
}

/// Tokenizes a `.bdd` or `.scene` source. `//` starts a line comment.
pub fn lex(text: &str) -> Result<Vec<Spanned>, DslError> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else if c.is_some() {
                col += 1;
            }
            c
        }};
    }

    while let Some(&c) = chars.peek() {
        let pos = Pos { line, col };
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                bump!();
            }
            '/' => {
                bump!();
                if chars.peek() == Some(&'/') {
                    while let Some(&n) = chars.peek() {
                        if n == '\n' {
                            break;
                        }
                        bump!();
                    }
                } else {
                    return Err(DslError::Syntax {
                        line: pos.line,
                        col: pos.col,
                        expected: "'//' comment".into(),
                        found: "'/'".into(),
                    });
                }
            }
            '{' => {
                bump!();
                out.push(Spanned { tok: Tok::LBrace, pos });
            }
            '}' => {
                bump!();
                out.push(Spanned { tok: Tok::RBrace, pos });
            }
            '(' => {
                bump!();
                out.push(Spanned { tok: Tok::LParen, pos });
            }
            ')' => {
                bump!();
                out.push(Spanned { tok: Tok::RParen, pos });
            }
            '[' => {
                bump!();
                out.push(Spanned { tok: Tok::LBracket, pos });
            }
            ']' => {
                bump!();
                out.push(Spanned { tok: Tok::RBracket, pos });
            }
            '<' => {
                bump!();
                out.push(Spanned { tok: Tok::Lt, pos });
            }
            '>' => {
                bump!();
                out.push(Spanned { tok: Tok::Gt, pos });
            }
            '=' => {
                bump!();
                out.push(Spanned { tok: Tok::Eq, pos });
            }
            ',' => {
                bump!();
                out.push(Spanned { tok: Tok::Comma, pos });
            }
            ':' => {
                bump!();
                out.push(Spanned { tok: Tok::Colon, pos });
            }
            '.' => {
                bump!();
                if chars.peek() == Some(&'.') {
                    bump!();
                    out.push(Spanned { tok: Tok::DotDot, pos });
                } else {
                    return Err(DslError::Syntax {
                        line: pos.line,
                        col: pos.col,
                        expected: "'..'".into(),
                        found: "'.'".into(),
                    });
                }
            }
            '"' => {
                bump!();
                let mut s = String::new();
                loop {
                    match bump!() {
                        Some('"') => break,
                        Some(ch) => s.push(ch),
                        None => {
                            return Err(DslError::Syntax {
                                line: pos.line,
                                col: pos.col,
                                expected: "closing '\"'".into(),
                                found: "end of file".into(),
                            })
                        }
                    }
                }
                out.push(Spanned { tok: Tok::Str(s), pos });
            }
            c if c.is_ascii_digit() || c == '-' || c == '+' => {
                let mut s = String::new();
                s.push(bump!().expect("peeked"));
                if (s == "-" || s == "+") && !chars.peek().map(|n| n.is_ascii_digit()).unwrap_or(false) {
                    return Err(DslError::Syntax {
                        line: pos.line,
                        col: pos.col,
                        expected: "a number".into(),
                        found: format!("'{s}'"),
                    });
                }
                while let Some(&n) = chars.peek() {
                    if n.is_ascii_digit() || n == '.' || n == 'e' || n == 'E' {
                        // Keep `..` out of numbers so ranges lex cleanly.
                        if n == '.' {
                            let mut ahead = chars.clone();
                            ahead.next();
                            if ahead.peek() == Some(&'.') {
                                break;
                            }
                        }
                        s.push(bump!().expect("peeked"));
                        if s.ends_with(['e', 'E']) {
                            if let Some(&sign) = chars.peek() {
                                if sign == '+' || sign == '-' {
                                    s.push(bump!().expect("peeked"));
                                }
                            }
                        }
                    } else {
                        break;
                    }
                }
                let value: f64 = s.parse().map_err(|_| DslError::Syntax {
                    line: pos.line,
                    col: pos.col,
                    expected: "a number".into(),
                    found: format!("{s:?}"),
                })?;
                if !value.is_finite() {
                    return Err(DslError::Syntax {
                        line: pos.line,
                        col: pos.col,
                        expected: "a finite number".into(),
                        found: s,
                    });
                }
                out.push(Spanned { tok: Tok::Num(value), pos });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                s.push(bump!().expect("peeked"));
                while let Some(&n) = chars.peek() {
                    if n.is_ascii_alphanumeric() || n == '_' || n == '-' {
                        s.push(bump!().expect("peeked"));
                    } else {
                        break;
                    }
                }
                out.push(Spanned { tok: Tok::Ident(s), pos });
            }
            other => {
                return Err(DslError::Syntax {
                    line: pos.line,
                    col: pos.col,
                    expected: "a token".into(),
                    found: format!("'{other}'"),
                });
            }
        }
    }
    out.push(Spanned { tok: Tok::Eof, pos: Pos { line, col } });
    Ok(out)
}
