use super::source::{Diagnostic, SourceDocument, Span};

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Ident(String),
    Str(String),
    Int(i64),
    Double(f64),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Colon,
    Comma,
    Dot,
    Arrow,
    Eq,
    Lt,
    Gt,
    Le,
    Ge,
    Question,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Str(_) => "string literal".into(),
            Tok::Int(_) | Tok::Double(_) => "number".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Gt => "`>`".into(),
            Tok::Le => "`<=`".into(),
            Tok::Ge => "`>=`".into(),
            Tok::Question => "`?`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

pub fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

pub fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Splits a document into tokens. Unrecognised characters are reported and
/// skipped; the result always ends with `Eof`.
pub fn tokenize(doc: &SourceDocument, diags: &mut Vec<Diagnostic>) -> Vec<Token> {
    let text = doc.text();
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some((start, c)) = chars.next() {
        let single = |tok| Token {
            tok,
            span: Span::new(start, start + c.len_utf8()),
        };
        match c {
            c if c.is_whitespace() => {}
            '#' => {
                while let Some(&(_, c)) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                }
            }
            '{' => out.push(single(Tok::LBrace)),
            '}' => out.push(single(Tok::RBrace)),
            '(' => out.push(single(Tok::LParen)),
            ')' => out.push(single(Tok::RParen)),
            ':' => out.push(single(Tok::Colon)),
            ',' => out.push(single(Tok::Comma)),
            '.' => out.push(single(Tok::Dot)),
            '=' => out.push(single(Tok::Eq)),
            '?' => out.push(single(Tok::Question)),
            '<' | '>' => {
                let (tok, len) = if chars.peek().map(|p| p.1) == Some('=') {
                    chars.next();
                    (if c == '<' { Tok::Le } else { Tok::Ge }, 2)
                } else {
                    (if c == '<' { Tok::Lt } else { Tok::Gt }, 1)
                };
                out.push(Token {
                    tok,
                    span: Span::new(start, start + len),
                });
            }
            '-' => match chars.peek().map(|p| p.1) {
                Some('>') => {
                    chars.next();
                    out.push(Token {
                        tok: Tok::Arrow,
                        span: Span::new(start, start + 2),
                    });
                }
                Some(d) if d.is_ascii_digit() => {
                    out.push(number(text, start, &mut chars, diags, doc));
                }
                _ => diags.push(doc.error(Span::new(start, start + c.len_utf8()), "unexpected `-`").with_hint("`->` or a negative number")),
            },
            '"' => {
                let mut value = String::new();
                let mut closed = false;
                while let Some((i, c)) = chars.next() {
                    match c {
                        '"' => {
                            closed = true;
                            break;
                        }
                        '\\' => match chars.next() {
                            Some((_, '"')) => value.push('"'),
                            Some((_, '\\')) => value.push('\\'),
                            Some((_, 'n')) => value.push('\n'),
                            Some((_, 't')) => value.push('\t'),
                            Some((_, 'r')) => value.push('\r'),
                            Some((j, other)) => {
                                diags.push(doc.error(
                                    Span::new(i, j + other.len_utf8()),
                                    format!("unknown escape `\\{other}`"),
                                ));
                            }
                            None => break,
                        },
                        c => value.push(c),
                    }
                }
                let end = chars.peek().map_or(text.len(), |p| p.0);
                if !closed {
                    diags.push(doc.error(Span::new(start, start + 1), "unterminated string literal"));
                }
                out.push(Token {
                    tok: Tok::Str(value),
                    span: Span::new(start, end),
                });
            }
            d if d.is_ascii_digit() => out.push(number(text, start, &mut chars, diags, doc)),
            c if is_ident_start(c) => {
                let mut end = start + 1;
                while let Some(&(i, c)) = chars.peek() {
                    if !is_ident_char(c) {
                        break;
                    }
                    end = i + 1;
                    chars.next();
                }
                out.push(Token {
                    tok: Tok::Ident(text[start..end].to_string()),
                    span: Span::new(start, end),
                });
            }
            other => diags.push(doc.error(Span::new(start, start + c.len_utf8()), format!("unexpected character `{}`", other.escape_default()))),
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        span: Span::new(text.len(), text.len()),
    });
    out
}

fn number(
    text: &str,
    start: usize,
    chars: &mut std::iter::Peekable<std::str::CharIndices<'_>>,
    diags: &mut Vec<Diagnostic>,
    doc: &SourceDocument,
) -> Token {
    let mut end = start + 1;
    let mut fractional = false;
    while let Some(&(i, c)) = chars.peek() {
        if c.is_ascii_digit() {
            end = i + 1;
            chars.next();
        } else if c == '.' && !fractional {
            // only a decimal point when a digit follows
            let mut ahead = chars.clone();
            ahead.next();
            if !ahead.peek().is_some_and(|p| p.1.is_ascii_digit()) {
                break;
            }
            fractional = true;
            end = i + 1;
            chars.next();
        } else {
            break;
        }
    }
    let span = Span::new(start, end);
    let lexeme = &text[start..end];
    let tok = if fractional {
        Tok::Double(lexeme.parse().unwrap_or(0.0))
    } else {
        match lexeme.parse() {
            Ok(i) => Tok::Int(i),
            Err(_) => {
                diags.push(doc.error(span, format!("integer `{lexeme}` is out of range")));
                Tok::Int(0)
            }
        }
    };
    Token { tok, span }
}
