//! Recursive-descent parser for the formula DSL.
//!
//! ```text
//! formula := "sup" IDENT "." formula | "inf" IDENT "." formula | term
//! term    := "min" "(" formula {"," formula} ")"
//!          | "max" "(" formula {"," formula} ")"
//!          | "monus" "(" formula "," formula ")"
//!          | "absdiff" "(" formula "," formula ")"
//!          | "d" "(" IDENT "," IDENT ")"
//!          | NUMBER
//! ```

use crate::error::{Error, Result};
use crate::logic::formula::Formula;

const KEYWORDS: [&str; 7] = ["sup", "inf", "min", "max", "monus", "absdiff", "d"];

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Ident(s) => format!("identifier '{s}'"),
        Tok::Number(s) => format!("number '{s}'"),
        Tok::LParen => "'('".into(),
        Tok::RParen => "')'".into(),
        Tok::Comma => "','".into(),
        Tok::Dot => "'.'".into(),
        Tok::Eof => "end of input".into(),
    }
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let (mut line, mut column) = (1, 1);
    let mut pos = 0;
    while pos < chars.len() {
        let c = chars[pos];
        let (start_line, start_col, start_pos) = (line, column, pos);
        if c == '\n' {
            line += 1;
            column = 1;
            pos += 1;
            continue;
        }
        if c.is_whitespace() {
            column += 1;
            pos += 1;
            continue;
        }
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            '.' if !chars.get(pos + 1).is_some_and(char::is_ascii_digit) => Some(Tok::Dot),
            _ => None,
        };
        let tok = if let Some(tok) = single {
            pos += 1;
            tok
        } else if c.is_ascii_alphabetic() {
            let start = pos;
            while pos < chars.len() && chars[pos].is_ascii_alphanumeric() {
                pos += 1;
            }
            Tok::Ident(chars[start..pos].iter().collect())
        } else if c.is_ascii_digit() || c == '.' {
            let start = pos;
            while pos < chars.len() && chars[pos].is_ascii_digit() {
                pos += 1;
            }
            if pos < chars.len() && chars[pos] == '.' {
                pos += 1;
                let frac = pos;
                while pos < chars.len() && chars[pos].is_ascii_digit() {
                    pos += 1;
                }
                if frac == pos {
                    return Err(Error::Syntax {
                        line: start_line,
                        column: start_col,
                        message: "expected digits after decimal point".into(),
                    });
                }
            }
            Tok::Number(chars[start..pos].iter().collect())
        } else {
            return Err(Error::Syntax {
                line,
                column,
                message: format!("unexpected character '{c}'"),
            });
        };
        column += pos - start_pos;
        tokens.push(Token {
            tok,
            line: start_line,
            column: start_col,
        });
    }
    tokens.push(Token {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error_at(token: &Token, message: String) -> Error {
        Error::Syntax {
            line: token.line,
            column: token.column,
            message,
        }
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        let t = self.next();
        if t.tok == want {
            Ok(())
        } else {
            Err(Self::error_at(
                &t,
                format!("expected {}, found {}", describe(&want), describe(&t.tok)),
            ))
        }
    }

    fn variable(&mut self) -> Result<String> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(name) if !KEYWORDS.contains(&name.as_str()) => Ok(name.clone()),
            Tok::Ident(name) => Err(Self::error_at(
                &t,
                format!("keyword '{name}' cannot be used as a variable"),
            )),
            other => Err(Self::error_at(
                &t,
                format!("expected a variable, found {}", describe(other)),
            )),
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        let t = self.next();
        let keyword = match &t.tok {
            Tok::Ident(s) => s.clone(),
            Tok::Number(text) => {
                let value: f64 = text.parse().map_err(|_| {
                    Self::error_at(&t, format!("malformed number '{text}'"))
                })?;
                return Formula::constant(value);
            }
            other => {
                return Err(Self::error_at(
                    &t,
                    format!("expected a formula, found {}", describe(other)),
                ))
            }
        };
        match keyword.as_str() {
            "sup" | "inf" => {
                let var = self.variable()?;
                self.expect(Tok::Dot)?;
                let body = self.formula()?;
                Ok(if keyword == "sup" {
                    Formula::sup(var, body)
                } else {
                    Formula::inf(var, body)
                })
            }
            "min" | "max" => {
                let args = self.arguments()?;
                Ok(if keyword == "min" {
                    Formula::Min(args)
                } else {
                    Formula::Max(args)
                })
            }
            "monus" | "absdiff" => {
                let args = self.arguments()?;
                let [a, b]: [Formula; 2] = args.try_into().map_err(|args: Vec<Formula>| {
                    Self::error_at(
                        &t,
                        format!("'{keyword}' takes 2 arguments, got {}", args.len()),
                    )
                })?;
                Ok(if keyword == "monus" {
                    Formula::monus(a, b)
                } else {
                    Formula::abs_diff(a, b)
                })
            }
            "d" => {
                self.expect(Tok::LParen)?;
                let u = self.variable()?;
                self.expect(Tok::Comma)?;
                let v = self.variable()?;
                self.expect(Tok::RParen)?;
                Ok(Formula::Dist(u, v))
            }
            other => Err(Self::error_at(&t, format!("unknown connective '{other}'"))),
        }
    }

    fn arguments(&mut self) -> Result<Vec<Formula>> {
        self.expect(Tok::LParen)?;
        let mut args = vec![self.formula()?];
        loop {
            let t = self.next();
            match &t.tok {
                Tok::Comma => args.push(self.formula()?),
                Tok::RParen => return Ok(args),
                other => {
                    return Err(Self::error_at(
                        &t,
                        format!("expected ',' or ')', found {}", describe(other)),
                    ))
                }
            }
        }
    }
}

/// Parses DSL text into a formula.
pub fn parse(text: &str) -> Result<Formula> {
    let mut parser = Parser {
        tokens: lex(text)?,
        pos: 0,
    };
    let formula = parser.formula()?;
    let t = parser.peek();
    if t.tok != Tok::Eof {
        return Err(Parser::error_at(
            t,
            format!("unexpected {} after formula", describe(&t.tok)),
        ));
    }
    Ok(formula)
}
