//! Tokenizer for surface scripts. Newlines terminate statements except
//! inside parentheses and square brackets; `#` comments to end of line.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Str(String),
    Newline,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Colon,
    Star,
    Plus,
    Minus,
    Eq,
    EqEq,
    Ge,
    Le,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(v) => write!(f, "`{v}`"),
            Tok::Str(_) => write!(f, "string"),
            Tok::Newline => write!(f, "end of line"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::LBracket => write!(f, "`[`"),
            Tok::RBracket => write!(f, "`]`"),
            Tok::LBrace => write!(f, "`{{`"),
            Tok::RBrace => write!(f, "`}}`"),
            Tok::Comma => write!(f, "`,`"),
            Tok::Semi => write!(f, "`;`"),
            Tok::Colon => write!(f, "`:`"),
            Tok::Star => write!(f, "`*`"),
            Tok::Plus => write!(f, "`+`"),
            Tok::Minus => write!(f, "`-`"),
            Tok::Eq => write!(f, "`=`"),
            Tok::EqEq => write!(f, "`==`"),
            Tok::Ge => write!(f, "`>=`"),
            Tok::Le => write!(f, "`<=`"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, thiserror::Error)]
#[error("lex error at {line}:{col}: {msg}")]
pub struct LexError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, LexError> {
    let mut out = Vec::new();
    let mut depth = 0usize; // ( and [ nesting; newlines are soft inside
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let chars: Vec<char> = raw.chars().collect();
        let mut i = 0usize;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            match c {
                '#' => break,
                ' ' | '\t' | '\r' => {
                    i += 1;
                }
                '(' => {
                    depth += 1;
                    out.push(Token {
                        tok: Tok::LParen,
                        line,
                        col,
                    });
                    i += 1;
                }
                ')' => {
                    depth = depth.saturating_sub(1);
                    out.push(Token {
                        tok: Tok::RParen,
                        line,
                        col,
                    });
                    i += 1;
                }
                '[' => {
                    depth += 1;
                    out.push(Token {
                        tok: Tok::LBracket,
                        line,
                        col,
                    });
                    i += 1;
                }
                ']' => {
                    depth = depth.saturating_sub(1);
                    out.push(Token {
                        tok: Tok::RBracket,
                        line,
                        col,
                    });
                    i += 1;
                }
                '{' => {
                    out.push(Token {
                        tok: Tok::LBrace,
                        line,
                        col,
                    });
                    i += 1;
                }
                '}' => {
                    out.push(Token {
                        tok: Tok::RBrace,
                        line,
                        col,
                    });
                    i += 1;
                }
                ',' => {
                    out.push(Token {
                        tok: Tok::Comma,
                        line,
                        col,
                    });
                    i += 1;
                }
                ';' => {
                    out.push(Token {
                        tok: Tok::Semi,
                        line,
                        col,
                    });
                    i += 1;
                }
                ':' => {
                    out.push(Token {
                        tok: Tok::Colon,
                        line,
                        col,
                    });
                    i += 1;
                }
                '*' => {
                    out.push(Token {
                        tok: Tok::Star,
                        line,
                        col,
                    });
                    i += 1;
                }
                '+' => {
                    out.push(Token {
                        tok: Tok::Plus,
                        line,
                        col,
                    });
                    i += 1;
                }
                '-' => {
                    out.push(Token {
                        tok: Tok::Minus,
                        line,
                        col,
                    });
                    i += 1;
                }
                '=' => {
                    if chars.get(i + 1) == Some(&'=') {
                        out.push(Token {
                            tok: Tok::EqEq,
                            line,
                            col,
                        });
                        i += 2;
                    } else {
                        out.push(Token {
                            tok: Tok::Eq,
                            line,
                            col,
                        });
                        i += 1;
                    }
                }
                '>' => {
                    if chars.get(i + 1) == Some(&'=') {
                        out.push(Token {
                            tok: Tok::Ge,
                            line,
                            col,
                        });
                        i += 2;
                    } else {
                        return Err(LexError {
                            line,
                            col,
                            msg: "expected `>=`".into(),
                        });
                    }
                }
                '<' => {
                    if chars.get(i + 1) == Some(&'=') {
                        out.push(Token {
                            tok: Tok::Le,
                            line,
                            col,
                        });
                        i += 2;
                    } else {
                        return Err(LexError {
                            line,
                            col,
                            msg: "expected `<=`".into(),
                        });
                    }
                }
                '"' => {
                    let start = i + 1;
                    let mut j = start;
                    while j < chars.len() && chars[j] != '"' {
                        j += 1;
                    }
                    if j == chars.len() {
                        return Err(LexError {
                            line,
                            col,
                            msg: "unterminated string".into(),
                        });
                    }
                    let s: String = chars[start..j].iter().collect();
                    out.push(Token {
                        tok: Tok::Str(s),
                        line,
                        col,
                    });
                    i = j + 1;
                }
                _ if c.is_ascii_digit() => {
                    let start = i;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    let s: String = chars[start..i].iter().collect();
                    let v = s.parse::<i64>().map_err(|_| LexError {
                        line,
                        col,
                        msg: format!("integer `{s}` out of range"),
                    })?;
                    out.push(Token {
                        tok: Tok::Int(v),
                        line,
                        col,
                    });
                }
                _ if c.is_ascii_alphabetic() || c == '_' => {
                    let start = i;
                    while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                        i += 1;
                    }
                    let s: String = chars[start..i].iter().collect();
                    out.push(Token {
                        tok: Tok::Ident(s),
                        line,
                        col,
                    });
                }
                _ => {
                    return Err(LexError {
                        line,
                        col,
                        msg: format!("unexpected character `{c}`"),
                    });
                }
            }
        }
        if depth == 0 {
            out.push(Token {
                tok: Tok::Newline,
                line,
                col: chars.len() + 1,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenizes_statements() {
        let toks = tokenize("surface ruled q = 1 e = 3 fibers Q1 # comment\n").unwrap();
        let idents: Vec<String> = toks
            .iter()
            .filter_map(|t| match &t.tok {
                Tok::Ident(s) => Some(s.clone()),
                _ => None,
            })
            .collect();
        assert_eq!(idents, vec!["surface", "ruled", "q", "e", "fibers", "Q1"]);
        assert!(matches!(toks.last().unwrap().tok, Tok::Newline));
    }

    #[test]
    fn newlines_soft_inside_parens() {
        let toks = tokenize("assert intersect(Cp,\n  negK) == 0\n").unwrap();
        let newlines = toks.iter().filter(|t| t.tok == Tok::Newline).count();
        assert_eq!(newlines, 1);
    }

    #[test]
    fn reports_positions() {
        let err = tokenize("let x = @").unwrap_err();
        assert_eq!((err.line, err.col), (1, 9));
    }
}
