use super::ast::Span;
use super::diagnostic::{Code, Diagnostic};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(u64),
    Hex(u64),
    Str(String),
    /// Punctuation and operators, stored as their source text.
    Punct(&'static str),
    Eof,
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

// Longest first so that maximal munch falls out of a linear scan.
const PUNCT: &[&str] = &[
    "=>", "==", "!=", "<=", ">=", "+=", "-=", "*=", "/=", "++", "--", "&&", "||", "{", "}", "(",
    ")", "[", "]", ";", ",", ".", "=", "<", ">", "+", "-", "*", "/", "%", "!",
];

pub fn tokenize(src: &str) -> Result<Vec<Token>, Diagnostic> {
    Lexer { src, bytes: src.as_bytes(), pos: 0, line: 1, col: 1 }.run()
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    line: u32,
    col: u32,
}

impl Lexer<'_> {
    fn run(mut self) -> Result<Vec<Token>, Diagnostic> {
        let mut out = Vec::new();
        loop {
            self.skip_trivia()?;
            let (start, line, col) = (self.pos, self.line, self.col);
            let Some(&b) = self.bytes.get(self.pos) else {
                out.push(Token { tok: Tok::Eof, span: self.span_from(start, line, col) });
                return Ok(out);
            };
            let tok = if b.is_ascii_alphabetic() || b == b'_' {
                while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_') {
                    self.bump();
                }
                Tok::Ident(self.src[start..self.pos].to_string())
            } else if b.is_ascii_digit() {
                self.number(start, line, col)?
            } else if b == b'"' {
                self.string(start, line, col)?
            } else if let Some(p) = PUNCT.iter().find(|p| self.src[self.pos..].starts_with(**p)) {
                for _ in 0..p.len() {
                    self.bump();
                }
                Tok::Punct(p)
            } else {
                let ch = self.src[self.pos..].chars().next().unwrap_or('?');
                return Err(Diagnostic::error(
                    Code::E0001,
                    Span::new(start as u32, (start + ch.len_utf8()) as u32, line, col),
                    format!("unexpected character `{ch}`"),
                ));
            };
            out.push(Token { tok, span: self.span_from(start, line, col) });
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn bump(&mut self) {
        if let Some(c) = self.src[self.pos..].chars().next() {
            self.pos += c.len_utf8();
            if c == '\n' {
                self.line += 1;
                self.col = 1;
            } else {
                self.col += 1;
            }
        }
    }

    fn span_from(&self, start: usize, line: u32, col: u32) -> Span {
        Span::new(start as u32, self.pos as u32, line, col)
    }

    fn skip_trivia(&mut self) -> Result<(), Diagnostic> {
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_whitespace() => self.bump(),
                Some(b'/') if self.bytes.get(self.pos + 1) == Some(&b'/') => {
                    while self.peek().is_some_and(|c| c != b'\n') {
                        self.bump();
                    }
                }
                Some(b'/') if self.bytes.get(self.pos + 1) == Some(&b'*') => {
                    let (start, line, col) = (self.pos, self.line, self.col);
                    self.bump();
                    self.bump();
                    loop {
                        if self.pos >= self.bytes.len() {
                            return Err(Diagnostic::error(
                                Code::E0001,
                                self.span_from(start, line, col),
                                "unterminated block comment",
                            ));
                        }
                        if self.src[self.pos..].starts_with("*/") {
                            self.bump();
                            self.bump();
                            break;
                        }
                        self.bump();
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn number(&mut self, start: usize, line: u32, col: u32) -> Result<Tok, Diagnostic> {
        let hex = self.src[self.pos..].starts_with("0x") || self.src[self.pos..].starts_with("0X");
        if hex {
            self.bump();
            self.bump();
            while self.peek().is_some_and(|c| c.is_ascii_hexdigit()) {
                self.bump();
            }
        } else {
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.bump();
            }
        }
        if self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_') {
            return Err(Diagnostic::error(
                Code::E0001,
                self.span_from(start, line, col),
                "malformed numeric literal",
            ));
        }
        let text = &self.src[start..self.pos];
        let parsed = if hex {
            let digits = text[2..].trim_start_matches('0');
            if text.len() == 2 {
                None
            } else if digits.is_empty() {
                Some(0)
            } else {
                u64::from_str_radix(digits, 16).ok()
            }
            .map(Tok::Hex)
        } else {
            text.parse::<u64>().ok().map(Tok::Int)
        };
        parsed.ok_or_else(|| {
            Diagnostic::error(
                Code::E0001,
                self.span_from(start, line, col),
                format!("literal `{text}` does not fit in a 64-bit word"),
            )
        })
    }

    fn string(&mut self, start: usize, line: u32, col: u32) -> Result<Tok, Diagnostic> {
        self.bump();
        let mut value = String::new();
        loop {
            let Some(c) = self.src[self.pos..].chars().next() else {
                return Err(Diagnostic::error(
                    Code::E0001,
                    self.span_from(start, line, col),
                    "unterminated string literal",
                ));
            };
            match c {
                '"' => {
                    self.bump();
                    return Ok(Tok::Str(value));
                }
                '\n' => {
                    return Err(Diagnostic::error(
                        Code::E0001,
                        self.span_from(start, line, col),
                        "newline in string literal",
                    ))
                }
                '\\' => {
                    self.bump();
                    let esc = self.src[self.pos..].chars().next();
                    let decoded = match esc {
                        Some('n') => '\n',
                        Some('t') => '\t',
                        Some('"') => '"',
                        Some('\\') => '\\',
                        _ => {
                            return Err(Diagnostic::error(
                                Code::E0001,
                                self.span_from(start, line, col),
                                "invalid escape sequence",
                            ))
                        }
                    };
                    self.bump();
                    value.push(decoded);
                }
                _ => {
                    self.bump();
                    value.push(c);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        tokenize(src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn maximal_munch() {
        assert_eq!(
            toks("a+=b++>=c"),
            vec![
                Tok::Ident("a".into()),
                Tok::Punct("+="),
                Tok::Ident("b".into()),
                Tok::Punct("++"),
                Tok::Punct(">="),
                Tok::Ident("c".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn literals_and_comments() {
        assert_eq!(
            toks("// hi\n 900 /* x */ 0x00ff \"a\\\"b\""),
            vec![Tok::Int(900), Tok::Hex(255), Tok::Str("a\"b".into()), Tok::Eof]
        );
    }

    #[test]
    fn positions_are_one_based() {
        let t = tokenize("\n  foo").unwrap();
        assert_eq!((t[0].span.line, t[0].span.col, t[0].span.start), (2, 3, 3));
    }

    #[test]
    fn rejects_overflow_and_garbage() {
        assert!(tokenize("99999999999999999999999").is_err());
        assert!(tokenize("a # b").is_err());
        assert!(tokenize("\"open").is_err());
        assert!(tokenize("12ab").is_err());
    }
}
