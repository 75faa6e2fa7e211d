use super::{NotationError, SourceSpan};
use crate::series::Rational;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Number(Rational),
    Str(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Colon,
    Bar,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Eq,
    Le,
    Gt,
    DotDot,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(r) => format!("number {r}"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::Eof => "end of input".into(),
            other => format!("`{}`", other.symbol()),
        }
    }

    pub fn symbol(&self) -> &'static str {
        match self {
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::Colon => ":",
            Tok::Bar => "|",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Caret => "^",
            Tok::Eq => "=",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::DotDot => "..",
            Tok::Ident(_) => "identifier",
            Tok::Number(_) => "number",
            Tok::Str(_) => "string",
            Tok::Eof => "end of input",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.src[self.pos..].chars();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn span_from(&self, start: (usize, usize, usize)) -> SourceSpan {
        SourceSpan {
            start: start.0,
            end: self.pos,
            line: start.1,
            column: start.2,
        }
    }
}

fn digits(c: &mut Cursor) -> String {
    let mut s = String::new();
    while let Some(d) = c.peek().filter(char::is_ascii_digit) {
        s.push(d);
        c.bump();
    }
    s
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, NotationError> {
    let mut c = Cursor {
        src,
        pos: 0,
        line: 1,
        col: 1,
    };
    let mut out = Vec::new();
    loop {
        while let Some(ch) = c.peek() {
            if ch.is_whitespace() {
                c.bump();
            } else if ch == '#' {
                while c.peek().is_some_and(|x| x != '\n') {
                    c.bump();
                }
            } else {
                break;
            }
        }
        let start = (c.pos, c.line, c.col);
        let Some(ch) = c.bump() else {
            out.push(Token {
                tok: Tok::Eof,
                span: c.span_from(start),
            });
            return Ok(out);
        };
        let tok = match ch {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            ',' => Tok::Comma,
            ';' => Tok::Semi,
            ':' => Tok::Colon,
            '|' => Tok::Bar,
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '=' => Tok::Eq,
            '>' => Tok::Gt,
            'λ' => Tok::Ident("l".into()),
            '<' if c.peek() == Some('=') => {
                c.bump();
                Tok::Le
            }
            '.' if c.peek() == Some('.') => {
                c.bump();
                Tok::DotDot
            }
            '"' => {
                let mut s = String::new();
                loop {
                    match c.bump() {
                        Some('"') => break,
                        Some('\\') => match c.bump() {
                            Some(e) => s.push(e),
                            None => break,
                        },
                        Some(x) => s.push(x),
                        None => {
                            return Err(NotationError::parse(
                                c.span_from(start),
                                "unterminated string",
                                vec!["`\"`".into()],
                            ))
                        }
                    }
                }
                Tok::Str(s)
            }
            d if d.is_ascii_digit() => {
                let mut num = d.to_string();
                num.push_str(&digits(&mut c));
                let numer: i64 = num.parse().map_err(|_| {
                    NotationError::parse(c.span_from(start), "integer literal too large", vec![])
                })?;
                if c.peek() == Some('/') && c.peek2().is_some_and(|x| x.is_ascii_digit()) {
                    c.bump();
                    let den: i64 = digits(&mut c).parse().map_err(|_| {
                        NotationError::parse(c.span_from(start), "integer literal too large", vec![])
                    })?;
                    if den == 0 {
                        return Err(NotationError::parse(c.span_from(start), "zero denominator", vec![]));
                    }
                    Tok::Number(Rational::new(numer, den))
                } else {
                    Tok::Number(Rational::from_integer(numer))
                }
            }
            a if a.is_alphabetic() || a == '_' => {
                let mut s = a.to_string();
                while let Some(x) = c.peek().filter(|x| x.is_alphanumeric() || *x == '_') {
                    s.push(x);
                    c.bump();
                }
                Tok::Ident(s)
            }
            other => {
                return Err(NotationError::parse(
                    c.span_from(start),
                    &format!("unexpected character {other:?}"),
                    vec![],
                ))
            }
        };
        out.push(Token {
            tok,
            span: c.span_from(start),
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_literals_need_adjacent_digits() {
        let toks: Vec<Tok> = tokenize("3/2 3 / 2 a/2 λ 0 .. m").unwrap().into_iter().map(|t| t.tok).collect();
        assert_eq!(
            toks,
            vec![
                Tok::Number(Rational::new(3, 2)),
                Tok::Number(Rational::from_integer(3)),
                Tok::Slash,
                Tok::Number(Rational::from_integer(2)),
                Tok::Ident("a".into()),
                Tok::Slash,
                Tok::Number(Rational::from_integer(2)),
                Tok::Ident("l".into()),
                Tok::Number(Rational::from_integer(0)),
                Tok::DotDot,
                Tok::Ident("m".into()),
                Tok::Eof,
            ]
        );
    }

    #[test]
    fn spans_track_lines_and_columns() {
        let toks = tokenize("a\n  +b").unwrap();
        assert_eq!((toks[1].span.line, toks[1].span.column), (2, 3));
        assert_eq!(toks[1].span.start, 4);
        assert!(tokenize("a $ b").is_err());
    }
}
