use super::{DslError, DslErrorKind, Expr, Position, SequenceDef};
use crate::exactarith::Integer;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(Integer),
    LParen,
    RParen,
    Eq,
    DotDot,
    Comma,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(v) => format!("`{v}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Eq => "`=`".into(),
            Tok::DotDot => "`..`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, Position)>, DslError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let pos = Position { line, column: col };
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => advance(1, &mut i, &mut col),
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    advance(1, &mut i, &mut col);
                }
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    advance(1, &mut i, &mut col);
                }
                let text: String = chars[start..i].iter().collect();
                let v = text.parse::<Integer>().expect("digits parse");
                out.push((Tok::Int(v), pos));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    advance(1, &mut i, &mut col);
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
            }
            '.' => {
                if chars.get(i + 1) == Some(&'.') {
                    out.push((Tok::DotDot, pos));
                    advance(2, &mut i, &mut col);
                } else {
                    return Err(DslError::at(DslErrorKind::Lexical, pos, "expected `..`"));
                }
            }
            _ => {
                let tok = match c {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '=' => Tok::Eq,
                    ',' => Tok::Comma,
                    '+' => Tok::Plus,
                    '-' => Tok::Minus,
                    '*' => Tok::Star,
                    '/' => Tok::Slash,
                    '^' => Tok::Caret,
                    other => {
                        return Err(DslError::at(
                            DslErrorKind::Lexical,
                            pos,
                            format!("unexpected character `{other}`"),
                        ))
                    }
                };
                out.push((tok, pos));
                advance(1, &mut i, &mut col);
            }
        }
    }
    out.push((Tok::Eof, Position { line, column: col }));
    Ok(out)
}

const KEYWORDS: [&str; 4] = ["seq", "sum", "binom", "fact"];

struct Parser {
    toks: Vec<(Tok, Position)>,
    at: usize,
    /// Summation variable, once bound.
    index: Option<String>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Position {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if t != Tok::Eof {
            self.at += 1;
        }
        t
    }

    fn syntax(&self, expected: &str) -> DslError {
        DslError::at(
            DslErrorKind::Syntax,
            self.pos(),
            format!("expected {expected}, found {}", self.peek().describe()),
        )
    }

    fn expect(&mut self, tok: Tok) -> Result<(), DslError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.syntax(&tok.describe()))
        }
    }

    fn keyword(&mut self, word: &str) -> Result<(), DslError> {
        match self.peek() {
            Tok::Ident(s) if s == word => {
                self.bump();
                Ok(())
            }
            _ => Err(self.syntax(&format!("`{word}`"))),
        }
    }

    fn ident(&mut self) -> Result<String, DslError> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.syntax("an identifier")),
        }
    }

    fn def(&mut self) -> Result<SequenceDef, DslError> {
        self.keyword("seq")?;
        let name = self.ident()?;
        self.expect(Tok::LParen)?;
        self.keyword("n")?;
        self.expect(Tok::RParen)?;
        self.expect(Tok::Eq)?;
        self.keyword("sum")?;
        self.expect(Tok::LParen)?;
        let index_pos = self.pos();
        let index = self.ident()?;
        if index == "n" {
            return Err(DslError::at(
                DslErrorKind::Syntax,
                index_pos,
                "summation index must differ from `n`",
            ));
        }
        self.expect(Tok::Eq)?;
        let lower = self.expr()?;
        self.expect(Tok::DotDot)?;
        let upper = self.expr()?;
        self.expect(Tok::RParen)?;
        self.index = Some(index.clone());
        let body = self.expr()?;
        if *self.peek() != Tok::Eof {
            return Err(self.syntax("end of input"));
        }
        Ok(SequenceDef { name, index, lower, upper, body })
    }

    fn expr(&mut self) -> Result<Expr, DslError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, DslError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, DslError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            Ok(Expr::Neg(Box::new(self.power()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, DslError> {
        let base = self.atom()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            Ok(Expr::Pow(Box::new(base), Box::new(self.unary()?)))
        } else {
            Ok(base)
        }
    }

    fn call_args(&mut self, count: usize) -> Result<Vec<Expr>, DslError> {
        self.expect(Tok::LParen)?;
        let mut args = vec![self.expr()?];
        while args.len() < count {
            self.expect(Tok::Comma)?;
            args.push(self.expr()?);
        }
        self.expect(Tok::RParen)?;
        Ok(args)
    }

    fn atom(&mut self) -> Result<Expr, DslError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(Expr::Int(v))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                match name.as_str() {
                    "binom" => {
                        let mut args = self.call_args(2)?.into_iter();
                        let a = args.next().expect("two args");
                        let b = args.next().expect("two args");
                        Ok(Expr::Binom(Box::new(a), Box::new(b)))
                    }
                    "fact" => {
                        let a = self.call_args(1)?.pop().expect("one arg");
                        Ok(Expr::Fact(Box::new(a)))
                    }
                    "n" => Ok(Expr::N),
                    other if self.index.as_deref() == Some(other) => Ok(Expr::Index),
                    other => Err(DslError::at(
                        DslErrorKind::UnknownIdentifier,
                        pos,
                        format!("`{other}` is not bound here"),
                    )),
                }
            }
            _ => Err(self.syntax("an expression")),
        }
    }
}

/// Parses one definition; comments (`#` to end of line) and blank lines are
/// ignored.
pub fn parse(src: &str) -> Result<SequenceDef, DslError> {
    let toks = lex(src)?;
    Parser { toks, at: 0, index: None }.def()
}
