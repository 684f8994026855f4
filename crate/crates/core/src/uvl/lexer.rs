use crate::diagnostic::Location;

use super::SyntaxError;

/// Columns per tab stop when measuring indentation.
pub(super) const TAB_WIDTH: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub(super) enum TokenKind {
    Ident(String),
    Int(i64),
    Real(f64),
    Str(String),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Comma,
    DotDot,
    Bang,
    Amp,
    Pipe,
    Implies,
    Iff,
    Gt,
    Ge,
    Lt,
    Le,
    EqEq,
    Ne,
    Plus,
    Minus,
    Star,
    Slash,
}

impl TokenKind {
    pub(super) fn describe(&self) -> String {
        match self {
            TokenKind::Ident(name) => format!("`{name}`"),
            TokenKind::Int(v) => format!("`{v}`"),
            TokenKind::Real(v) => format!("`{v:?}`"),
            TokenKind::Str(s) => format!("string {s:?}"),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            TokenKind::LBrace => "{",
            TokenKind::RBrace => "}",
            TokenKind::LBracket => "[",
            TokenKind::RBracket => "]",
            TokenKind::LParen => "(",
            TokenKind::RParen => ")",
            TokenKind::Comma => ",",
            TokenKind::DotDot => "..",
            TokenKind::Bang => "!",
            TokenKind::Amp => "&",
            TokenKind::Pipe => "|",
            TokenKind::Implies => "=>",
            TokenKind::Iff => "<=>",
            TokenKind::Gt => ">",
            TokenKind::Ge => ">=",
            TokenKind::Lt => "<",
            TokenKind::Le => "<=",
            TokenKind::EqEq => "==",
            TokenKind::Ne => "!=",
            TokenKind::Plus => "+",
            TokenKind::Minus => "-",
            TokenKind::Star => "*",
            TokenKind::Slash => "/",
            TokenKind::Ident(_) | TokenKind::Int(_) | TokenKind::Real(_) | TokenKind::Str(_) => "",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(super) struct Token {
    pub kind: TokenKind,
    pub location: Location,
    /// Byte range within the line text.
    pub start: usize,
    pub end: usize,
}

/// A non-blank source line.
#[derive(Debug, Clone)]
pub(super) struct Line {
    pub number: usize,
    /// Indentation width in columns, tabs expanded to the next multiple of `TAB_WIDTH`.
    pub indent: usize,
    pub text: String,
    pub tokens: Vec<Token>,
}

impl Line {
    pub(super) fn location(&self) -> Location {
        self.tokens
            .first()
            .map(|t| t.location)
            .unwrap_or(Location::new(self.number, 1))
    }

    pub(super) fn end_location(&self) -> Location {
        Location::new(self.number, self.text.chars().count() + 1)
    }
}

pub(super) fn lex(source: &str) -> Result<Vec<Line>, SyntaxError> {
    let mut lines = Vec::new();
    for (idx, raw) in source.lines().enumerate() {
        let number = idx + 1;
        let text = raw.strip_suffix('\r').unwrap_or(raw);
        let tokens = lex_line(text, number)?;
        if tokens.is_empty() {
            continue;
        }
        lines.push(Line {
            number,
            indent: indent_width(text),
            text: text.to_string(),
            tokens,
        });
    }
    Ok(lines)
}

fn indent_width(text: &str) -> usize {
    let mut width = 0;
    for c in text.chars() {
        match c {
            ' ' => width += 1,
            '\t' => width = (width / TAB_WIDTH + 1) * TAB_WIDTH,
            _ => break,
        }
    }
    width
}

fn lex_line(text: &str, number: usize) -> Result<Vec<Token>, SyntaxError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    let byte_at = |i: usize| chars.get(i).map(|&(b, _)| b).unwrap_or(text.len());
    let peek = |i: usize| chars.get(i).map(|&(_, c)| c);

    while i < chars.len() {
        let c = chars[i].1;
        let location = Location::new(number, i + 1);
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '/' && peek(i + 1) == Some('/') {
            break;
        }
        let start = i;
        let kind = if c.is_ascii_alphabetic() || c == '_' {
            while peek(i).is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
                i += 1;
            }
            TokenKind::Ident(text[byte_at(start)..byte_at(i)].to_string())
        } else if c.is_ascii_digit() {
            while peek(i).is_some_and(|c| c.is_ascii_digit()) {
                i += 1;
            }
            let is_real = peek(i) == Some('.') && peek(i + 1).is_some_and(|c| c.is_ascii_digit());
            if is_real {
                i += 1;
                while peek(i).is_some_and(|c| c.is_ascii_digit()) {
                    i += 1;
                }
            }
            let lexeme = &text[byte_at(start)..byte_at(i)];
            if peek(i).is_some_and(|c| c.is_ascii_alphabetic() || c == '_') {
                return Err(SyntaxError::Lex {
                    location,
                    message: format!("identifiers cannot start with a digit: `{lexeme}...`"),
                });
            }
            if is_real {
                TokenKind::Real(lexeme.parse().map_err(|_| SyntaxError::Lex {
                    location,
                    message: format!("invalid real literal `{lexeme}`"),
                })?)
            } else {
                TokenKind::Int(lexeme.parse().map_err(|_| SyntaxError::Lex {
                    location,
                    message: format!("integer literal `{lexeme}` out of range"),
                })?)
            }
        } else if c == '"' || c == '\'' {
            let quote = c;
            i += 1;
            let mut value = String::new();
            loop {
                match peek(i) {
                    None => {
                        return Err(SyntaxError::Lex {
                            location,
                            message: "unterminated string literal".into(),
                        })
                    }
                    Some('\\') => {
                        match peek(i + 1) {
                            Some(escaped) => value.push(escaped),
                            None => {
                                return Err(SyntaxError::Lex {
                                    location,
                                    message: "unterminated string literal".into(),
                                })
                            }
                        }
                        i += 2;
                    }
                    Some(ch) if ch == quote => {
                        i += 1;
                        break;
                    }
                    Some(ch) => {
                        value.push(ch);
                        i += 1;
                    }
                }
            }
            TokenKind::Str(value)
        } else {
            let two: String = chars[i..chars.len().min(i + 3)].iter().map(|&(_, c)| c).collect();
            let (kind, len) = if two.starts_with("<=>") {
                (TokenKind::Iff, 3)
            } else if two.starts_with("=>") {
                (TokenKind::Implies, 2)
            } else if two.starts_with(">=") {
                (TokenKind::Ge, 2)
            } else if two.starts_with("<=") {
                (TokenKind::Le, 2)
            } else if two.starts_with("==") {
                (TokenKind::EqEq, 2)
            } else if two.starts_with("!=") {
                (TokenKind::Ne, 2)
            } else if two.starts_with("..") {
                (TokenKind::DotDot, 2)
            } else {
                let kind = match c {
                    '{' => TokenKind::LBrace,
                    '}' => TokenKind::RBrace,
                    '[' => TokenKind::LBracket,
                    ']' => TokenKind::RBracket,
                    '(' => TokenKind::LParen,
                    ')' => TokenKind::RParen,
                    ',' => TokenKind::Comma,
                    '!' => TokenKind::Bang,
                    '&' => TokenKind::Amp,
                    '|' => TokenKind::Pipe,
                    '>' => TokenKind::Gt,
                    '<' => TokenKind::Lt,
                    '+' => TokenKind::Plus,
                    '-' => TokenKind::Minus,
                    '*' => TokenKind::Star,
                    '/' => TokenKind::Slash,
                    other => {
                        return Err(SyntaxError::Lex {
                            location,
                            message: format!("unexpected character `{other}`"),
                        })
                    }
                };
                (kind, 1)
            };
            i += len;
            kind
        };
        tokens.push(Token {
            kind,
            location,
            start: byte_at(start),
            end: byte_at(i),
        });
    }
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(text: &str) -> Vec<TokenKind> {
        lex_line(text, 1).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn tabs_expand_to_tab_stops() {
        assert_eq!(indent_width("\tA"), 4);
        assert_eq!(indent_width("  \tA"), 4);
        assert_eq!(indent_width("\t  A"), 6);
        assert_eq!(indent_width("            A"), 12);
    }

    #[test]
    fn cardinality_range_is_not_a_real() {
        assert_eq!(
            kinds("[2..3]"),
            vec![
                TokenKind::LBracket,
                TokenKind::Int(2),
                TokenKind::DotDot,
                TokenKind::Int(3),
                TokenKind::RBracket
            ]
        );
        assert_eq!(kinds("1.5"), vec![TokenKind::Real(1.5)]);
    }

    #[test]
    fn operators_use_longest_match() {
        assert_eq!(
            kinds("a <=> b => !c <= d"),
            vec![
                TokenKind::Ident("a".into()),
                TokenKind::Iff,
                TokenKind::Ident("b".into()),
                TokenKind::Implies,
                TokenKind::Bang,
                TokenKind::Ident("c".into()),
                TokenKind::Le,
                TokenKind::Ident("d".into()),
            ]
        );
    }

    #[test]
    fn comments_and_blank_lines_are_dropped() {
        let lines = lex("features\n\n  A // root\n   // nothing\n").unwrap();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[1].tokens.len(), 1);
        assert_eq!(lines[1].number, 3);
    }

    #[test]
    fn bad_characters_are_located() {
        let err = lex("features\n  A $").unwrap_err();
        assert_eq!(err.location(), Location::new(2, 5));
        let err = lex("  9lives").unwrap_err();
        assert!(err.message().contains("digit"));
    }
}
