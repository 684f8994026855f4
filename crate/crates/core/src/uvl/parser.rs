//! Indentation-sensitive recursive-descent parser for UVL.
//!
//! The feature section is a tree of alternating feature lines and group-keyword
//! lines. Each block's indentation is fixed by its first line; a dedent must land
//! exactly on an enclosing block's indentation.

use crate::diagnostic::Location;

use super::lexer::{lex, Line, Token, TokenKind};
use super::{
    Attribute, BinaryOp, Constraint, ConstraintExpr, FeatureNode, FeatureType, GroupKind,
    GroupNode, SyntaxError, UvlModel,
};

const GROUP_KEYWORDS: [&str; 4] = ["mandatory", "optional", "alternative", "or"];
const SECTION_KEYWORDS: [&str; 5] = ["namespace", "features", "constraints", "imports", "include"];

/// Parses UVL source text. Diagnostics name the input `<input>`.
pub fn parse_uvl(text: &str) -> Result<UvlModel, SyntaxError> {
    parse_uvl_named(text, "<input>")
}

/// Parses UVL source text, recording `source_name` for diagnostics.
pub fn parse_uvl_named(text: &str, source_name: &str) -> Result<UvlModel, SyntaxError> {
    let lines = lex(text)?;
    let mut parser = Parser { lines, pos: 0 };
    parser.parse_model(source_name)
}

fn parse_err(location: Location, message: impl Into<String>) -> SyntaxError {
    SyntaxError::Parse {
        location,
        message: message.into(),
    }
}

fn indent_err(location: Location, message: impl Into<String>) -> SyntaxError {
    SyntaxError::Lex {
        location,
        message: message.into(),
    }
}

struct Parser {
    lines: Vec<Line>,
    pos: usize,
}

/// Upper bound of a group cardinality before children are counted.
enum UpperBound {
    Fixed,
    Unbounded,
}

impl Parser {
    fn peek(&self) -> Option<&Line> {
        self.lines.get(self.pos)
    }

    fn peek_indent(&self) -> Option<usize> {
        self.peek().map(|l| l.indent)
    }

    fn advance(&mut self) -> Line {
        let line = self.lines[self.pos].clone();
        self.pos += 1;
        line
    }

    fn parse_model(&mut self, source_name: &str) -> Result<UvlModel, SyntaxError> {
        let mut namespace = None;
        let mut root = None;
        let mut constraints = None;

        while let Some(line) = self.peek() {
            if line.indent > 0 {
                return Err(indent_err(
                    line.location(),
                    "indented line outside of a `features` or `constraints` section",
                ));
            }
            let line = self.advance();
            let keyword = match &line.tokens[0].kind {
                TokenKind::Ident(word) => word.clone(),
                other => {
                    return Err(parse_err(
                        line.location(),
                        format!("expected a section keyword, found {}", other.describe()),
                    ))
                }
            };
            match keyword.as_str() {
                "namespace" => {
                    if namespace.is_some() || root.is_some() {
                        return Err(parse_err(
                            line.location(),
                            "`namespace` must appear once, before `features`",
                        ));
                    }
                    namespace = Some(expect_single_ident(&line, 1, "namespace name")?);
                }
                "features" => {
                    expect_end(&line, 1)?;
                    if root.is_some() {
                        return Err(parse_err(line.location(), "duplicate `features` section"));
                    }
                    root = Some(self.parse_features(&line)?);
                }
                "constraints" => {
                    expect_end(&line, 1)?;
                    if constraints.is_some() {
                        return Err(parse_err(line.location(), "duplicate `constraints` section"));
                    }
                    constraints = Some(self.parse_constraints()?);
                }
                "imports" | "include" => {
                    return Err(parse_err(
                        line.location(),
                        format!("unsupported section `{keyword}`"),
                    ))
                }
                other => {
                    return Err(parse_err(
                        line.location(),
                        format!("expected `namespace`, `features` or `constraints`, found `{other}`"),
                    ))
                }
            }
        }

        let root = root.ok_or_else(|| {
            let end = self
                .lines
                .last()
                .map(|l| Location::new(l.number + 1, 1))
                .unwrap_or(Location::new(1, 1));
            parse_err(end, "missing `features` section")
        })?;
        Ok(UvlModel {
            namespace,
            root,
            constraints: constraints.unwrap_or_default(),
            source_name: source_name.to_string(),
        })
    }

    fn parse_features(&mut self, header: &Line) -> Result<FeatureNode, SyntaxError> {
        let root_indent = match self.peek_indent() {
            Some(indent) if indent > 0 => indent,
            _ => return Err(parse_err(header.end_location(), "`features` section has no root feature")),
        };
        let root = self.parse_feature(root_indent)?;
        if let Some(line) = self.peek() {
            if line.indent == root_indent {
                return Err(parse_err(
                    line.location(),
                    format!("a model has exactly one root feature; `{}` is already the root", root.name),
                ));
            }
            if line.indent > 0 {
                return Err(indent_err(
                    line.location(),
                    format!("inconsistent indentation: column {} matches no enclosing block", line.indent + 1),
                ));
            }
        }
        Ok(root)
    }

    fn parse_feature(&mut self, indent: usize) -> Result<FeatureNode, SyntaxError> {
        let line = self.advance();
        let mut node = parse_feature_header(&line)?;

        let group_indent = match self.peek_indent() {
            Some(i) if i > indent => i,
            _ => return Ok(node),
        };
        while self.peek_indent() == Some(group_indent) {
            let group_line = self.advance();
            let (kind, upper) = parse_group_header(&group_line)?;
            let child_indent = match self.peek_indent() {
                Some(i) if i > group_indent => i,
                _ => {
                    return Err(parse_err(
                        group_line.location(),
                        format!("group `{}` has no child features", group_line.text.trim()),
                    ))
                }
            };
            let mut children = Vec::new();
            while self.peek_indent() == Some(child_indent) {
                children.push(self.parse_feature(child_indent)?);
            }
            if let Some(line) = self.peek().filter(|l| l.indent > group_indent) {
                return Err(indent_err(
                    line.location(),
                    format!(
                        "inconsistent indentation: expected column {} like the preceding siblings",
                        child_indent + 1
                    ),
                ));
            }
            let kind = match (kind, upper) {
                (GroupKind::Cardinality { lo, .. }, Some(UpperBound::Unbounded)) => GroupKind::Cardinality {
                    lo,
                    hi: children.len() as u32,
                },
                (kind, _) => kind,
            };
            node.groups.push(GroupNode {
                kind,
                children,
                location: group_line.location(),
            });
        }
        if let Some(line) = self.peek().filter(|l| l.indent > indent) {
            return Err(indent_err(
                line.location(),
                format!(
                    "inconsistent indentation: expected column {} like the preceding group keywords",
                    group_indent + 1
                ),
            ));
        }
        Ok(node)
    }

    fn parse_constraints(&mut self) -> Result<Vec<Constraint>, SyntaxError> {
        let mut out = Vec::new();
        let block_indent = match self.peek_indent() {
            Some(i) if i > 0 => i,
            _ => return Ok(out),
        };
        while let Some(line) = self.peek() {
            if line.indent == 0 {
                break;
            }
            if line.indent != block_indent {
                return Err(indent_err(
                    line.location(),
                    format!(
                        "inconsistent indentation: constraints in this block start at column {}",
                        block_indent + 1
                    ),
                ));
            }
            let line = self.advance();
            let mut expr_parser = ExprParser {
                tokens: &line.tokens,
                pos: 0,
                end: line.end_location(),
            };
            let expr = expr_parser.parse_expr()?;
            if let Some(tok) = expr_parser.peek() {
                return Err(parse_err(
                    tok.location,
                    format!("unexpected {} after constraint", tok.kind.describe()),
                ));
            }
            out.push(Constraint {
                expr,
                location: line.location(),
            });
        }
        Ok(out)
    }
}

fn expect_end(line: &Line, from: usize) -> Result<(), SyntaxError> {
    match line.tokens.get(from) {
        None => Ok(()),
        Some(tok) => Err(parse_err(
            tok.location,
            format!("unexpected {}", tok.kind.describe()),
        )),
    }
}

fn expect_single_ident(line: &Line, at: usize, what: &str) -> Result<String, SyntaxError> {
    match line.tokens.get(at) {
        Some(Token {
            kind: TokenKind::Ident(name),
            ..
        }) => {
            expect_end(line, at + 1)?;
            Ok(name.clone())
        }
        Some(tok) => Err(parse_err(
            tok.location,
            format!("expected {what}, found {}", tok.kind.describe()),
        )),
        None => Err(parse_err(line.end_location(), format!("expected {what}"))),
    }
}

fn is_reserved(word: &str) -> bool {
    GROUP_KEYWORDS.contains(&word)
        || SECTION_KEYWORDS.contains(&word)
        || matches!(word, "true" | "false" | "len" | "floor" | "cardinality")
}

fn parse_feature_header(line: &Line) -> Result<FeatureNode, SyntaxError> {
    let tokens = &line.tokens;
    let mut at = 0;
    let mut declared_type = FeatureType::Boolean;
    if let (Some(TokenKind::Ident(first)), Some(TokenKind::Ident(_))) =
        (tokens.first().map(|t| &t.kind), tokens.get(1).map(|t| &t.kind))
    {
        if let Some(ty) = FeatureType::from_keyword(first) {
            declared_type = ty;
            at = 1;
        }
    }
    let name_tok = &tokens[at];
    let name = match &name_tok.kind {
        TokenKind::Ident(name) if is_reserved(name) => {
            return Err(parse_err(
                name_tok.location,
                format!("expected a feature name, found keyword `{name}`"),
            ))
        }
        TokenKind::Ident(name) => name.clone(),
        TokenKind::LBracket => {
            return Err(parse_err(
                name_tok.location,
                "expected a feature name, found a cardinality",
            ))
        }
        other => {
            return Err(parse_err(
                name_tok.location,
                format!("expected a feature name, found {}", other.describe()),
            ))
        }
    };
    at += 1;

    let mut node = FeatureNode::new(name);
    node.declared_type = declared_type;
    node.location = name_tok.location;

    if let Some(tok) = tokens.get(at) {
        match &tok.kind {
            TokenKind::LBrace => {
                let (attributes, next) = parse_attributes(line, at)?;
                node.is_abstract = attributes
                    .iter()
                    .any(|a| a.key == "abstract" && a.value.as_deref().is_none_or(|v| v == "true"));
                node.attributes = attributes;
                at = next;
            }
            TokenKind::Ident(word) if word == "cardinality" => {
                return Err(parse_err(
                    tok.location,
                    "feature cardinalities (feature cloning) are not supported",
                ))
            }
            _ => {}
        }
    }
    expect_end(line, at)?;
    Ok(node)
}

/// Parses `{ key [value], ... }` starting at the `{` token. Returns the attributes
/// and the index after the closing brace.
fn parse_attributes(line: &Line, open: usize) -> Result<(Vec<Attribute>, usize), SyntaxError> {
    let tokens = &line.tokens;
    let mut at = open + 1;
    let mut attributes = Vec::new();
    loop {
        let tok = tokens
            .get(at)
            .ok_or_else(|| parse_err(line.end_location(), "unterminated attribute block"))?;
        let key = match &tok.kind {
            TokenKind::RBrace if attributes.is_empty() => return Ok((attributes, at + 1)),
            TokenKind::Ident(k) | TokenKind::Str(k) => k.clone(),
            other => {
                return Err(parse_err(
                    tok.location,
                    format!("expected an attribute name, found {}", other.describe()),
                ))
            }
        };
        at += 1;
        let value_start = at;
        let mut depth = 0usize;
        while let Some(t) = tokens.get(at) {
            match t.kind {
                TokenKind::LBrace | TokenKind::LBracket | TokenKind::LParen => depth += 1,
                TokenKind::RBracket | TokenKind::RParen => depth = depth.saturating_sub(1),
                TokenKind::RBrace if depth > 0 => depth -= 1,
                TokenKind::RBrace | TokenKind::Comma if depth == 0 => break,
                _ => {}
            }
            at += 1;
        }
        let value = (at > value_start)
            .then(|| line.text[tokens[value_start].start..tokens[at - 1].end].to_string());
        attributes.push(Attribute { key, value });
        match tokens.get(at).map(|t| &t.kind) {
            Some(TokenKind::Comma) => at += 1,
            Some(TokenKind::RBrace) => return Ok((attributes, at + 1)),
            _ => return Err(parse_err(line.end_location(), "unterminated attribute block")),
        }
    }
}

fn parse_group_header(line: &Line) -> Result<(GroupKind, Option<UpperBound>), SyntaxError> {
    let first = &line.tokens[0];
    let (kind, upper, next) = match &first.kind {
        TokenKind::Ident(word) => {
            let kind = match word.as_str() {
                "mandatory" => GroupKind::Mandatory,
                "optional" => GroupKind::Optional,
                "alternative" => GroupKind::Alternative,
                "or" => GroupKind::Or,
                _ => {
                    return Err(parse_err(
                        first.location,
                        format!(
                            "expected a group keyword (mandatory, optional, alternative, or, [n..m]), found `{word}`"
                        ),
                    ))
                }
            };
            (kind, None, 1)
        }
        TokenKind::LBracket => parse_cardinality(line)?,
        other => {
            return Err(parse_err(
                first.location,
                format!("expected a group keyword, found {}", other.describe()),
            ))
        }
    };
    expect_end(line, next)?;
    Ok((kind, upper))
}

fn parse_cardinality(line: &Line) -> Result<(GroupKind, Option<UpperBound>, usize), SyntaxError> {
    let tokens = &line.tokens;
    let bound = |at: usize| -> Result<u32, SyntaxError> {
        match tokens.get(at) {
            Some(Token {
                kind: TokenKind::Int(v),
                location,
                ..
            }) => u32::try_from(*v)
                .map_err(|_| parse_err(*location, format!("cardinality bound {v} out of range"))),
            Some(tok) => Err(parse_err(
                tok.location,
                format!("expected a cardinality bound, found {}", tok.kind.describe()),
            )),
            None => Err(parse_err(line.end_location(), "unterminated cardinality")),
        }
    };
    let close = |at: usize| -> Result<(), SyntaxError> {
        match tokens.get(at) {
            Some(Token {
                kind: TokenKind::RBracket,
                ..
            }) => Ok(()),
            Some(tok) => Err(parse_err(
                tok.location,
                format!("expected `]`, found {}", tok.kind.describe()),
            )),
            None => Err(parse_err(line.end_location(), "unterminated cardinality")),
        }
    };

    let lo = bound(1)?;
    match tokens.get(2).map(|t| &t.kind) {
        Some(TokenKind::RBracket) => Ok((GroupKind::Cardinality { lo, hi: lo }, Some(UpperBound::Fixed), 3)),
        Some(TokenKind::DotDot) => {
            if matches!(tokens.get(3).map(|t| &t.kind), Some(TokenKind::Star)) {
                close(4)?;
                return Ok((GroupKind::Cardinality { lo, hi: lo }, Some(UpperBound::Unbounded), 5));
            }
            let hi = bound(3)?;
            close(4)?;
            Ok((GroupKind::Cardinality { lo, hi }, Some(UpperBound::Fixed), 5))
        }
        Some(_) => {
            let tok = &tokens[2];
            Err(parse_err(
                tok.location,
                format!("expected `..` or `]`, found {}", tok.kind.describe()),
            ))
        }
        None => Err(parse_err(line.end_location(), "unterminated cardinality")),
    }
}

/// Precedence climbing over one constraint line.
///
/// Tightest to loosest: `!`, `* /`, `+ -`, comparisons, `&`, `|`, `=>`
/// (right-associative), `<=>`.
struct ExprParser<'a> {
    tokens: &'a [Token],
    pos: usize,
    end: Location,
}

impl<'a> ExprParser<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    fn peek_kind(&self) -> Option<&'a TokenKind> {
        self.peek().map(|t| &t.kind)
    }

    fn next(&mut self) -> Result<&'a Token, SyntaxError> {
        let tok = self
            .tokens
            .get(self.pos)
            .ok_or_else(|| parse_err(self.end, "unexpected end of constraint"))?;
        self.pos += 1;
        Ok(tok)
    }

    fn expect(&mut self, kind: TokenKind) -> Result<(), SyntaxError> {
        let tok = self.next()?;
        if tok.kind == kind {
            Ok(())
        } else {
            Err(parse_err(
                tok.location,
                format!("expected {}, found {}", kind.describe(), tok.kind.describe()),
            ))
        }
    }

    fn parse_expr(&mut self) -> Result<ConstraintExpr, SyntaxError> {
        self.parse_iff()
    }

    fn parse_iff(&mut self) -> Result<ConstraintExpr, SyntaxError> {
        let mut lhs = self.parse_implies()?;
        while self.peek_kind() == Some(&TokenKind::Iff) {
            self.pos += 1;
            let rhs = self.parse_implies()?;
            lhs = ConstraintExpr::binary(BinaryOp::Iff, lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_implies(&mut self) -> Result<ConstraintExpr, SyntaxError> {
        let lhs = self.parse_or()?;
        if self.peek_kind() == Some(&TokenKind::Implies) {
            self.pos += 1;
            let rhs = self.parse_implies()?;
            return Ok(ConstraintExpr::binary(BinaryOp::Implies, lhs, rhs));
        }
        Ok(lhs)
    }

    fn parse_or(&mut self) -> Result<ConstraintExpr, SyntaxError> {
        let mut lhs = self.parse_and()?;
        while self.peek_kind() == Some(&TokenKind::Pipe) {
            self.pos += 1;
            let rhs = self.parse_and()?;
            lhs = ConstraintExpr::binary(BinaryOp::Or, lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_and(&mut self) -> Result<ConstraintExpr, SyntaxError> {
        let mut lhs = self.parse_comparison()?;
        while self.peek_kind() == Some(&TokenKind::Amp) {
            self.pos += 1;
            let rhs = self.parse_comparison()?;
            lhs = ConstraintExpr::binary(BinaryOp::And, lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_comparison(&mut self) -> Result<ConstraintExpr, SyntaxError> {
        let lhs = self.parse_additive()?;
        let op = match self.peek_kind() {
            Some(TokenKind::Gt) => BinaryOp::Gt,
            Some(TokenKind::Ge) => BinaryOp::Ge,
            Some(TokenKind::Lt) => BinaryOp::Lt,
            Some(TokenKind::Le) => BinaryOp::Le,
            Some(TokenKind::EqEq) => BinaryOp::Eq,
            Some(TokenKind::Ne) => BinaryOp::Ne,
            _ => return Ok(lhs),
        };
        self.pos += 1;
        let rhs = self.parse_additive()?;
        if let Some(tok) = self.peek().filter(|t| {
            matches!(
                t.kind,
                TokenKind::Gt | TokenKind::Ge | TokenKind::Lt | TokenKind::Le | TokenKind::EqEq | TokenKind::Ne
            )
        }) {
            return Err(parse_err(
                tok.location,
                "comparison operators cannot be chained; add parentheses",
            ));
        }
        Ok(ConstraintExpr::binary(op, lhs, rhs))
    }

    fn parse_additive(&mut self) -> Result<ConstraintExpr, SyntaxError> {
        let mut lhs = self.parse_multiplicative()?;
        loop {
            let op = match self.peek_kind() {
                Some(TokenKind::Plus) => BinaryOp::Add,
                Some(TokenKind::Minus) => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.parse_multiplicative()?;
            lhs = ConstraintExpr::binary(op, lhs, rhs);
        }
    }

    fn parse_multiplicative(&mut self) -> Result<ConstraintExpr, SyntaxError> {
        let mut lhs = self.parse_unary()?;
        loop {
            let op = match self.peek_kind() {
                Some(TokenKind::Star) => BinaryOp::Mul,
                Some(TokenKind::Slash) => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.parse_unary()?;
            lhs = ConstraintExpr::binary(op, lhs, rhs);
        }
    }

    fn parse_unary(&mut self) -> Result<ConstraintExpr, SyntaxError> {
        match self.peek_kind() {
            Some(TokenKind::Bang) => {
                self.pos += 1;
                Ok(ConstraintExpr::not(self.parse_unary()?))
            }
            Some(TokenKind::Minus) => {
                let minus = self.next()?;
                let tok = self.next()?;
                match tok.kind {
                    TokenKind::Int(v) => Ok(ConstraintExpr::Int(-v)),
                    TokenKind::Real(v) => Ok(ConstraintExpr::Real(-v)),
                    _ => Err(parse_err(
                        minus.location,
                        "unary minus is only supported on numeric literals",
                    )),
                }
            }
            _ => self.parse_primary(),
        }
    }

    fn parse_primary(&mut self) -> Result<ConstraintExpr, SyntaxError> {
        let tok = self.next()?;
        match &tok.kind {
            TokenKind::Ident(word) => match word.as_str() {
                "true" => Ok(ConstraintExpr::Bool(true)),
                "false" => Ok(ConstraintExpr::Bool(false)),
                "len" | "floor" if self.peek_kind() == Some(&TokenKind::LParen) => {
                    self.pos += 1;
                    let arg = self.parse_expr()?;
                    self.expect(TokenKind::RParen)?;
                    Ok(if word == "len" {
                        ConstraintExpr::Len(Box::new(arg))
                    } else {
                        ConstraintExpr::Floor(Box::new(arg))
                    })
                }
                _ if is_reserved(word) => Err(parse_err(
                    tok.location,
                    format!("unexpected keyword `{word}` in constraint"),
                )),
                _ => Ok(ConstraintExpr::Feature(word.clone())),
            },
            TokenKind::Int(v) => Ok(ConstraintExpr::Int(*v)),
            TokenKind::Real(v) => Ok(ConstraintExpr::Real(*v)),
            TokenKind::Str(s) => Ok(ConstraintExpr::Str(s.clone())),
            TokenKind::LParen => {
                let inner = self.parse_expr()?;
                self.expect(TokenKind::RParen)?;
                Ok(inner)
            }
            other => Err(parse_err(
                tok.location,
                format!("expected an operand, found {}", other.describe()),
            )),
        }
    }
}
