//! Parser for the IVML subset this crate emits.

use crate::diagnostic::Location;

use super::{EnumDef, IvmlDecl, IvmlError, IvmlExpr, IvmlOp, IvmlProject, IvmlType, VarDecl, KEYWORDS, UNSUPPORTED};

/// Parses IVML text restricted to the declaration and expression forms the
/// emitter produces.
///
/// `not (x)` and `(includes(...) <> true)` both parse to the same negation node.
pub fn parse_ivml_subset(text: &str) -> Result<IvmlProject, IvmlError> {
    parse_ivml_with_locations(text).map(|(project, _)| project)
}

/// Like [`parse_ivml_subset`], also returning the start location of each declaration.
pub fn parse_ivml_with_locations(text: &str) -> Result<(IvmlProject, Vec<Location>), IvmlError> {
    let tokens = lex(text)?;
    let end = tokens
        .last()
        .map(|t| t.location)
        .unwrap_or(Location::new(1, 1));
    let mut parser = Parser {
        tokens,
        pos: 0,
        end,
    };
    parser.project()
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Real(f64),
    Str(String),
    Punct(&'static str),
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(v) => format!("`{v}`"),
            Tok::Real(v) => format!("`{v:?}`"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::Punct(p) => format!("`{p}`"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    location: Location,
}

const PUNCTUATION: &[&str] = &[
    "<>", "!=", "==", ">=", "<=", "->", "(", ")", "{", "}", ";", ",", ".", ">", "<", "+", "-", "*", "/", "=", ":",
];

fn syntax(location: Location, message: impl Into<String>) -> IvmlError {
    IvmlError::Syntax {
        location,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<Token>, IvmlError> {
    let mut tokens = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, n: usize| {
        for _ in 0..n {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        }
    };

    while i < chars.len() {
        let c = chars[i];
        let location = Location::new(line, col);
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, 1);
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut col, 1);
            }
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            advance(&mut i, &mut line, &mut col, 2);
            loop {
                if i >= chars.len() {
                    return Err(syntax(location, "unterminated block comment"));
                }
                if chars[i] == '*' && chars.get(i + 1) == Some(&'/') {
                    advance(&mut i, &mut line, &mut col, 2);
                    break;
                }
                advance(&mut i, &mut line, &mut col, 1);
            }
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            let mut n = 0;
            while chars.get(i + n).is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_') {
                n += 1;
            }
            advance(&mut i, &mut line, &mut col, n);
            Tok::Ident(chars[start..i].iter().collect())
        } else if c.is_ascii_digit() {
            let mut n = 0;
            while chars.get(i + n).is_some_and(|c| c.is_ascii_digit()) {
                n += 1;
            }
            let is_real = chars.get(i + n) == Some(&'.') && chars.get(i + n + 1).is_some_and(|c| c.is_ascii_digit());
            if is_real {
                n += 1;
                while chars.get(i + n).is_some_and(|c| c.is_ascii_digit()) {
                    n += 1;
                }
            }
            advance(&mut i, &mut line, &mut col, n);
            let lexeme: String = chars[start..i].iter().collect();
            if is_real {
                Tok::Real(lexeme.parse().map_err(|_| syntax(location, format!("invalid number `{lexeme}`")))?)
            } else {
                Tok::Int(lexeme.parse().map_err(|_| syntax(location, format!("integer `{lexeme}` out of range")))?)
            }
        } else if c == '"' {
            advance(&mut i, &mut line, &mut col, 1);
            let mut value = String::new();
            loop {
                match chars.get(i) {
                    None | Some('\n') => return Err(syntax(location, "unterminated string literal")),
                    Some('"') => {
                        advance(&mut i, &mut line, &mut col, 1);
                        break;
                    }
                    Some('\\') if i + 1 < chars.len() => {
                        value.push(chars[i + 1]);
                        advance(&mut i, &mut line, &mut col, 2);
                    }
                    Some(&ch) => {
                        value.push(ch);
                        advance(&mut i, &mut line, &mut col, 1);
                    }
                }
            }
            Tok::Str(value)
        } else {
            let punct = PUNCTUATION
                .iter()
                .find(|p| p.chars().enumerate().all(|(k, pc)| chars.get(i + k) == Some(&pc)))
                .ok_or_else(|| syntax(location, format!("unexpected character `{c}`")))?;
            advance(&mut i, &mut line, &mut col, punct.len());
            Tok::Punct(punct)
        };
        tokens.push(Token { tok, location });
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: Location,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, offset: usize) -> Option<&Tok> {
        self.tokens.get(self.pos + offset).map(|t| &t.tok)
    }

    fn location(&self) -> Location {
        self.tokens.get(self.pos).map(|t| t.location).unwrap_or(self.end)
    }

    fn next(&mut self) -> Result<Token, IvmlError> {
        let tok = self
            .tokens
            .get(self.pos)
            .cloned()
            .ok_or_else(|| syntax(self.end, "unexpected end of input"))?;
        self.pos += 1;
        Ok(tok)
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Some(Tok::Punct(q)) if *q == p)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == w)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &str) -> Result<(), IvmlError> {
        let t = self.next()?;
        match t.tok {
            Tok::Punct(q) if q == p => Ok(()),
            other => Err(syntax(t.location, format!("expected `{p}`, found {}", other.describe()))),
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, IvmlError> {
        let t = self.next()?;
        match t.tok {
            Tok::Ident(s) if UNSUPPORTED.contains(&s.as_str()) => Err(IvmlError::Unsupported {
                location: t.location,
                construct: s,
            }),
            Tok::Ident(s) => Ok(s),
            other => Err(syntax(t.location, format!("expected {what}, found {}", other.describe()))),
        }
    }

    fn project(&mut self) -> Result<(IvmlProject, Vec<Location>), IvmlError> {
        if !self.is_word("project") {
            if let Some(Tok::Ident(word)) = self.peek() {
                if UNSUPPORTED.contains(&word.as_str()) {
                    return Err(IvmlError::Unsupported {
                        location: self.location(),
                        construct: word.clone(),
                    });
                }
            }
            return Err(syntax(self.location(), "expected `project`"));
        }
        self.pos += 1;
        let name = self.ident("a project name")?;
        self.expect_punct("{")?;
        let mut declarations = Vec::new();
        let mut locations = Vec::new();
        while !self.is_punct("}") {
            if self.peek().is_none() {
                return Err(syntax(self.end, "unterminated project body, expected `}`"));
            }
            locations.push(self.location());
            declarations.push(self.declaration()?);
        }
        self.pos += 1;
        self.eat_punct(";");
        if let Some(t) = self.tokens.get(self.pos) {
            return Err(syntax(t.location, format!("unexpected {} after project", t.tok.describe())));
        }
        Ok((IvmlProject { name, declarations }, locations))
    }

    fn declaration(&mut self) -> Result<IvmlDecl, IvmlError> {
        let location = self.location();
        let decl = match self.peek().cloned() {
            Some(Tok::Ident(word)) if UNSUPPORTED.contains(&word.as_str()) => {
                return Err(IvmlError::Unsupported {
                    location,
                    construct: word,
                })
            }
            Some(Tok::Ident(word)) if word == "enum" => {
                self.pos += 1;
                let name = self.ident("an enum name")?;
                self.expect_punct("{")?;
                let mut literals = Vec::new();
                if !self.is_punct("}") {
                    loop {
                        literals.push(self.ident("an enum literal")?);
                        if !self.eat_punct(",") {
                            break;
                        }
                    }
                }
                self.expect_punct("}")?;
                IvmlDecl::Enum(EnumDef { name, literals })
            }
            Some(Tok::Ident(word)) if word == "setOf" => {
                self.pos += 1;
                self.expect_punct("(")?;
                let element = self.ident("an enum name")?;
                self.expect_punct(")")?;
                let name = self.ident("a variable name")?;
                IvmlDecl::Var(VarDecl {
                    name,
                    ty: IvmlType::SetOf(element),
                })
            }
            Some(Tok::Ident(word)) if self.starts_var_decl(&word) => {
                let ty = match word.as_str() {
                    "Boolean" => IvmlType::Boolean,
                    "Integer" => IvmlType::Integer,
                    "Real" => IvmlType::Real,
                    "String" => IvmlType::String,
                    "sequenceOf" => {
                        return Err(IvmlError::Unsupported {
                            location,
                            construct: word,
                        })
                    }
                    _ => IvmlType::Enum(word),
                };
                self.pos += 1;
                let name = self.ident("a variable name")?;
                if self.is_punct("=") {
                    return Err(IvmlError::Unsupported {
                        location: self.location(),
                        construct: "default value".into(),
                    });
                }
                IvmlDecl::Var(VarDecl { name, ty })
            }
            _ => return self.constraint(),
        };
        self.expect_punct(";")?;
        Ok(decl)
    }

    /// `Type name` where neither word is an operator or built-in.
    fn starts_var_decl(&self, first: &str) -> bool {
        const TYPES: [&str; 4] = ["Boolean", "Integer", "Real", "String"];
        let second_ok = matches!(self.peek_at(1), Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()));
        second_ok && (TYPES.contains(&first) || !KEYWORDS.contains(&first))
    }

    fn constraint(&mut self) -> Result<IvmlDecl, IvmlError> {
        let expr = self.expr()?;
        self.expect_punct(";")?;
        Ok(IvmlDecl::Constraint(expr))
    }

    fn expr(&mut self) -> Result<IvmlExpr, IvmlError> {
        let mut lhs = self.or_expr()?;
        loop {
            let op = if self.is_word("implies") {
                IvmlOp::Implies
            } else if self.is_word("iff") {
                IvmlOp::Iff
            } else {
                return Ok(lhs);
            };
            self.pos += 1;
            let rhs = self.or_expr()?;
            lhs = IvmlExpr::binary(op, lhs, rhs);
        }
    }

    fn or_expr(&mut self) -> Result<IvmlExpr, IvmlError> {
        let mut lhs = self.and_expr()?;
        while self.is_word("or") {
            self.pos += 1;
            let rhs = self.and_expr()?;
            lhs = IvmlExpr::binary(IvmlOp::Or, lhs, rhs);
        }
        if self.is_word("xor") {
            return Err(IvmlError::Unsupported {
                location: self.location(),
                construct: "xor".into(),
            });
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> Result<IvmlExpr, IvmlError> {
        let mut lhs = self.equality()?;
        while self.is_word("and") {
            self.pos += 1;
            let rhs = self.equality()?;
            lhs = IvmlExpr::binary(IvmlOp::And, lhs, rhs);
        }
        Ok(lhs)
    }

    fn equality(&mut self) -> Result<IvmlExpr, IvmlError> {
        let mut lhs = self.relational()?;
        loop {
            let op = if self.is_punct("==") {
                IvmlOp::Eq
            } else if self.is_punct("<>") || self.is_punct("!=") {
                IvmlOp::Ne
            } else {
                return Ok(lhs);
            };
            self.pos += 1;
            let rhs = self.relational()?;
            lhs = match (op, lhs, rhs) {
                // `includes(...) <> true` is the emitter's spelling of a negated membership test
                (IvmlOp::Ne, inc @ IvmlExpr::Includes { .. }, IvmlExpr::Bool(true)) => IvmlExpr::not(inc),
                (op, lhs, rhs) => IvmlExpr::binary(op, lhs, rhs),
            };
        }
    }

    fn relational(&mut self) -> Result<IvmlExpr, IvmlError> {
        let mut lhs = self.additive()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Punct(">")) => IvmlOp::Gt,
                Some(Tok::Punct(">=")) => IvmlOp::Ge,
                Some(Tok::Punct("<")) => IvmlOp::Lt,
                Some(Tok::Punct("<=")) => IvmlOp::Le,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.additive()?;
            lhs = IvmlExpr::binary(op, lhs, rhs);
        }
    }

    fn additive(&mut self) -> Result<IvmlExpr, IvmlError> {
        let mut lhs = self.multiplicative()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Punct("+")) => IvmlOp::Add,
                Some(Tok::Punct("-")) => IvmlOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.multiplicative()?;
            lhs = IvmlExpr::binary(op, lhs, rhs);
        }
    }

    fn multiplicative(&mut self) -> Result<IvmlExpr, IvmlError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Punct("*")) => IvmlOp::Mul,
                Some(Tok::Punct("/")) => IvmlOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = IvmlExpr::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<IvmlExpr, IvmlError> {
        if self.is_word("not") {
            self.pos += 1;
            return Ok(IvmlExpr::not(self.unary()?));
        }
        if self.is_punct("-") {
            let minus = self.next()?;
            let t = self.next()?;
            return match t.tok {
                Tok::Int(v) => Ok(IvmlExpr::Int(-v)),
                Tok::Real(v) => Ok(IvmlExpr::Real(-v)),
                _ => Err(syntax(minus.location, "unary minus is only supported on numeric literals")),
            };
        }
        self.primary()
    }

    fn call_arg(&mut self) -> Result<String, IvmlError> {
        self.expect_punct("(")?;
        let name = self.ident("a variable name")?;
        self.expect_punct(")")?;
        Ok(name)
    }

    fn primary(&mut self) -> Result<IvmlExpr, IvmlError> {
        let t = self.next()?;
        match t.tok {
            Tok::Int(v) => Ok(IvmlExpr::Int(v)),
            Tok::Real(v) => Ok(IvmlExpr::Real(v)),
            Tok::Str(s) => Ok(IvmlExpr::Str(s)),
            Tok::Punct("(") => {
                let inner = self.expr()?;
                self.expect_punct(")")?;
                Ok(inner)
            }
            Tok::Ident(word) => match word.as_str() {
                "true" => Ok(IvmlExpr::Bool(true)),
                "false" => Ok(IvmlExpr::Bool(false)),
                "isDefined" => Ok(IvmlExpr::IsDefined(self.call_arg()?)),
                "size" => Ok(IvmlExpr::Size(self.call_arg()?)),
                "floor" => {
                    self.expect_punct("(")?;
                    let inner = self.expr()?;
                    self.expect_punct(")")?;
                    Ok(IvmlExpr::Floor(Box::new(inner)))
                }
                "includes" => {
                    self.expect_punct("(")?;
                    let set = self.ident("a set variable")?;
                    self.expect_punct(",")?;
                    let enum_name = self.ident("an enum name")?;
                    self.expect_punct(".")?;
                    let literal = self.ident("an enum literal")?;
                    self.expect_punct(")")?;
                    Ok(IvmlExpr::Includes {
                        set,
                        enum_name,
                        literal,
                    })
                }
                w if UNSUPPORTED.contains(&w) => Err(IvmlError::Unsupported {
                    location: t.location,
                    construct: word,
                }),
                w if KEYWORDS.contains(&w) => Err(syntax(t.location, format!("unexpected keyword `{w}`"))),
                _ if self.is_punct(".") => {
                    self.pos += 1;
                    let literal = self.ident("an enum literal")?;
                    if self.is_punct("(") {
                        return Err(IvmlError::Unsupported {
                            location: self.location(),
                            construct: format!("operation call `{word}.{literal}(...)`"),
                        });
                    }
                    Ok(IvmlExpr::EnumLiteral {
                        enum_name: word,
                        literal,
                    })
                }
                _ if self.is_punct("(") || self.is_punct("->") => Err(IvmlError::Unsupported {
                    location: t.location,
                    construct: format!("operation `{word}`"),
                }),
                _ => Ok(IvmlExpr::Var(word)),
            },
            other => Err(syntax(t.location, format!("expected an expression, found {}", other.describe()))),
        }
    }
}
