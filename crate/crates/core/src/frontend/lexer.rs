use super::{DiagCode, ParseDiagnostic, SourceSpan};

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    /// Unsigned decimal integer, kept as text so overflow is reported where
    /// the value is consumed.
    Int(String),
    Real(String),
    Str(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Semi,
    Colon,
    Comma,
    Eq,
    Arrow,
    BiArrow,
    Le,
    Ge,
    Plus,
    Star,
    DotDot,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(s) | Tok::Real(s) => format!("number `{s}`"),
            Tok::Str(s) => format!("string \"{s}\""),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.symbol()),
        }
    }

    pub(crate) fn symbol(&self) -> &'static str {
        match self {
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Semi => ";",
            Tok::Colon => ":",
            Tok::Comma => ",",
            Tok::Eq => "=",
            Tok::Arrow => "->",
            Tok::BiArrow => "<->",
            Tok::Le => "<=",
            Tok::Ge => ">=",
            Tok::Plus => "+",
            Tok::Star => "*",
            Tok::DotDot => "..",
            _ => "?",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
    pub length: usize,
}

struct Cursor<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
    file: &'a str,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn error(&self, line: usize, column: usize, length: usize, message: String) -> ParseDiagnostic {
        ParseDiagnostic::error(
            DiagCode::Lexical,
            message,
            SourceSpan {
                file: self.file.to_string(),
                line,
                column,
                length: length.max(1),
            },
        )
    }
}

pub(crate) fn tokenize(file: &str, source: &str) -> Result<Vec<Token>, ParseDiagnostic> {
    let mut cur = Cursor {
        chars: source.chars().collect(),
        pos: 0,
        line: 1,
        column: 1,
        file,
    };
    let mut out = Vec::new();
    loop {
        // whitespace and comments
        while let Some(c) = cur.peek() {
            if c.is_whitespace() {
                cur.bump();
            } else if c == '/' && cur.peek_at(1) == Some('/') {
                while cur.peek().is_some_and(|c| c != '\n') {
                    cur.bump();
                }
            } else {
                break;
            }
        }
        let (line, column, start) = (cur.line, cur.column, cur.pos);
        let Some(c) = cur.peek() else {
            out.push(Token {
                tok: Tok::Eof,
                line,
                column,
                length: 0,
            });
            return Ok(out);
        };
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(c) = cur.peek().filter(|c| c.is_ascii_alphanumeric() || *c == '_') {
                s.push(c);
                cur.bump();
            }
            Tok::Ident(s)
        } else if c.is_ascii_digit() {
            lex_number(&mut cur)
        } else if c == '"' {
            cur.bump();
            let mut s = String::new();
            loop {
                match cur.bump() {
                    Some('"') => break,
                    Some('\\') => match cur.bump() {
                        Some(e @ ('"' | '\\')) => s.push(e),
                        _ => {
                            return Err(cur.error(
                                cur.line,
                                cur.column.saturating_sub(1).max(1),
                                1,
                                "invalid escape in string literal".into(),
                            ))
                        }
                    },
                    Some('\n') | None => {
                        return Err(cur.error(
                            line,
                            column,
                            cur.pos - start,
                            "unterminated string literal".into(),
                        ))
                    }
                    Some(c) => s.push(c),
                }
            }
            Tok::Str(s)
        } else {
            let two = (c, cur.peek_at(1));
            let (tok, width) = match two {
                ('<', Some('-')) if cur.peek_at(2) == Some('>') => (Tok::BiArrow, 3),
                ('-', Some('>')) => (Tok::Arrow, 2),
                ('<', Some('=')) => (Tok::Le, 2),
                ('>', Some('=')) => (Tok::Ge, 2),
                ('.', Some('.')) => (Tok::DotDot, 2),
                ('{', _) => (Tok::LBrace, 1),
                ('}', _) => (Tok::RBrace, 1),
                ('(', _) => (Tok::LParen, 1),
                (')', _) => (Tok::RParen, 1),
                ('[', _) => (Tok::LBracket, 1),
                (']', _) => (Tok::RBracket, 1),
                (';', _) => (Tok::Semi, 1),
                (':', _) => (Tok::Colon, 1),
                (',', _) => (Tok::Comma, 1),
                ('=', _) => (Tok::Eq, 1),
                ('+', _) => (Tok::Plus, 1),
                ('*', _) => (Tok::Star, 1),
                _ => {
                    return Err(cur.error(line, column, 1, format!("unexpected character `{c}`")))
                }
            };
            for _ in 0..width {
                cur.bump();
            }
            tok
        };
        out.push(Token {
            tok,
            line,
            column,
            length: cur.pos - start,
        });
    }
}

fn lex_number(cur: &mut Cursor<'_>) -> Tok {
    let mut s = String::new();
    let mut real = false;
    let digits = |cur: &mut Cursor<'_>, s: &mut String| {
        while let Some(d) = cur.peek().filter(char::is_ascii_digit) {
            s.push(d);
            cur.bump();
        }
    };
    digits(cur, &mut s);
    // `64..4096` is a range, not a fraction.
    if cur.peek() == Some('.') && cur.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
        real = true;
        s.push('.');
        cur.bump();
        digits(cur, &mut s);
    }
    if matches!(cur.peek(), Some('e' | 'E')) {
        let sign = matches!(cur.peek_at(1), Some('+' | '-'));
        let first_digit = cur.peek_at(if sign { 2 } else { 1 });
        if first_digit.is_some_and(|c| c.is_ascii_digit()) {
            real = true;
            s.push('e');
            cur.bump();
            if sign {
                s.push(cur.bump().unwrap_or('+'));
            }
            digits(cur, &mut s);
        }
    }
    if real {
        Tok::Real(s)
    } else {
        Tok::Int(s)
    }
}
