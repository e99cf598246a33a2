use crate::error::{Error, Result, Span};

use super::ast::*;
use super::token::{Token, TokenKind};

/// Sides used for `2d` when lenient parsing is enabled.
pub const DEFAULT_SIDES: i64 = 6;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Accept `xd` without sides and treat it as `xd6`.
    pub default_missing_sides: bool,
}

/// Parses a token stream produced by [`tokenize`](super::tokenize).
pub fn parse(tokens: &[Token]) -> Result<RollExpression> {
    parse_with(tokens, ParseOptions::default())
}

pub fn parse_with(tokens: &[Token], options: ParseOptions) -> Result<RollExpression> {
    if tokens.is_empty() {
        return Err(Error::EmptyExpression);
    }
    let mut p = Parser {
        tokens,
        pos: 0,
        options,
        notes: Vec::new(),
    };
    let mut statements = vec![p.statement()?];
    while p.eat(&TokenKind::Semicolon).is_some() {
        statements.push(p.statement()?);
    }
    if let Some(t) = p.peek() {
        return Err(p.unexpected(t, "';' or end of input"));
    }
    Ok(RollExpression {
        statements,
        notes: p.notes,
    })
}

struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
    options: ParseOptions,
    notes: Vec<String>,
}

impl<'t> Parser<'t> {
    fn statement(&mut self) -> Result<Statement> {
        if self.eat(&TokenKind::Hash).is_some() {
            let name = self.macro_name()?;
            self.expect(&TokenKind::Assign, "'='")?;
            let body = self.expr()?;
            return Ok(Statement::MacroDefinition { name, body });
        }
        Ok(Statement::Expr(self.expr()?))
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek_kind() {
                Some(TokenKind::Plus) => MathOp::Add,
                Some(TokenKind::Minus) => MathOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek_kind() {
                Some(TokenKind::Star) => MathOp::Mul,
                Some(TokenKind::Slash) => MathOp::DivFloor,
                Some(TokenKind::Backslash) => MathOp::DivCeil,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(&TokenKind::Minus).is_some() {
            return Ok(Expr::Negate(Box::new(self.unary()?)));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<Expr> {
        let mut expr = self.primary()?;
        if !matches!(expr, Expr::Dice { .. }) {
            return Ok(expr);
        }
        while let Some(op) = self.dice_op()? {
            let done = op == DiceOp::Count;
            expr = Expr::DiceOp {
                child: Box::new(expr),
                op,
            };
            if done {
                break;
            }
        }
        Ok(expr)
    }

    fn primary(&mut self) -> Result<Expr> {
        let Some(tok) = self.peek() else {
            return Err(self.unexpected_end("an expression"));
        };
        match &tok.kind {
            TokenKind::Int(n) => {
                let n = *n;
                self.pos += 1;
                self.dice_tail(Some(Expr::Int(n)), tok.span)
            }
            TokenKind::LParen => {
                self.pos += 1;
                let mut items = vec![self.expr()?];
                while self.eat(&TokenKind::Semicolon).is_some() {
                    items.push(self.expr()?);
                }
                self.expect(&TokenKind::RParen, "')'")?;
                self.dice_tail(Some(Expr::Group(items)), tok.span)
            }
            TokenKind::Dice | TokenKind::Coin => self.dice_tail(None, tok.span),
            TokenKind::At => {
                self.pos += 1;
                Ok(Expr::MacroAccess(self.macro_name()?))
            }
            _ => Err(self.unexpected(tok, "an expression")),
        }
    }

    /// Continues a primary with `d<sides>` or a bare coin if one follows.
    fn dice_tail(&mut self, count: Option<Expr>, start: Span) -> Result<Expr> {
        let count = count.map(Box::new);
        if self.eat(&TokenKind::Coin).is_some() {
            return Ok(Expr::Dice {
                count,
                faces: Faces::Coin,
            });
        }
        let Some(d) = self.eat(&TokenKind::Dice) else {
            return Ok(match count {
                Some(c) => *c,
                None => unreachable!("dice_tail without count is only entered on 'd' or 'c'"),
            });
        };
        let faces = self.sides(d.span, start)?;
        Ok(Expr::Dice { count, faces })
    }

    fn sides(&mut self, d: Span, start: Span) -> Result<Faces> {
        let next = self.peek();
        match next.map(|t| &t.kind) {
            Some(TokenKind::Int(n)) => {
                let (n, span) = (*n, next.unwrap().span);
                self.pos += 1;
                if n == 0 {
                    return Err(Error::ZeroSides { span });
                }
                Ok(Faces::Standard(n))
            }
            Some(TokenKind::Minus) if next.unwrap().span.start == d.end => {
                let mut span = d.to(next.unwrap().span);
                self.pos += 1;
                if let Some(t) = self.peek().filter(|t| matches!(t.kind, TokenKind::Int(_))) {
                    span = span.to(t.span);
                    self.pos += 1;
                }
                Err(Error::NegativeSides { span })
            }
            Some(TokenKind::Percent) => {
                self.pos += 1;
                Ok(Faces::Percent)
            }
            Some(TokenKind::Fate) => {
                self.pos += 1;
                Ok(Faces::Fate)
            }
            Some(TokenKind::Coin) => {
                self.pos += 1;
                Ok(Faces::Coin)
            }
            Some(TokenKind::LBrace) => self.face_list(),
            _ if self.options.default_missing_sides => {
                self.notes.push(format!(
                    "sides missing at {}; defaulted to d{DEFAULT_SIDES}",
                    start.to(d)
                ));
                Ok(Faces::Standard(DEFAULT_SIDES))
            }
            _ => Err(Error::MissingSides { span: start.to(d) }),
        }
    }

    fn face_list(&mut self) -> Result<Faces> {
        let open = self.expect(&TokenKind::LBrace, "'{'")?.span;
        let mut numeric = Vec::new();
        let mut symbolic = Vec::new();
        loop {
            let Some(tok) = self.peek() else {
                return Err(self.unexpected_end("a face"));
            };
            match &tok.kind {
                TokenKind::Symbol(s) => {
                    symbolic.push(s.clone());
                    self.pos += 1;
                }
                TokenKind::Int(_) | TokenKind::Minus => numeric.push(self.face_item()?),
                _ => return Err(self.unexpected(tok, "a face")),
            }
            if self.eat(&TokenKind::Comma).is_some() {
                continue;
            }
            let close = self.expect(&TokenKind::RBrace, "',' or '}'")?.span;
            if !numeric.is_empty() && !symbolic.is_empty() {
                return Err(Error::MixedFaces {
                    span: open.to(close),
                });
            }
            return Ok(if symbolic.is_empty() {
                Faces::Numeric(numeric)
            } else {
                Faces::Symbolic(symbolic)
            });
        }
    }

    fn face_item(&mut self) -> Result<FaceItem> {
        let (lo, lo_span) = self.signed_int()?;
        if self.eat(&TokenKind::Range).is_none() {
            return Ok(FaceItem::Single(lo));
        }
        let (hi, hi_span) = self.signed_int()?;
        if lo > hi {
            return Err(Error::EmptyRange {
                span: lo_span.to(hi_span),
                start: lo,
                end: hi,
            });
        }
        Ok(FaceItem::Range(lo, hi))
    }

    fn signed_int(&mut self) -> Result<(i64, Span)> {
        let minus = self.eat(&TokenKind::Minus).map(|t| t.span);
        let Some(tok) = self.peek() else {
            return Err(self.unexpected_end("an integer"));
        };
        let TokenKind::Int(n) = tok.kind else {
            return Err(self.unexpected(tok, "an integer"));
        };
        self.pos += 1;
        Ok(match minus {
            // i64::MIN has no positive literal, so -n always fits.
            Some(m) => (-n, m.to(tok.span)),
            None => (n, tok.span),
        })
    }

    fn dice_op(&mut self) -> Result<Option<DiceOp>> {
        let Some(tok) = self.peek() else {
            return Ok(None);
        };
        let op = match tok.kind {
            TokenKind::Keep | TokenKind::Drop => {
                self.pos += 1;
                let which = if tok.kind == TokenKind::Keep {
                    Selection::Keep
                } else {
                    Selection::Drop
                };
                let end = match self.adjacent(tok.span).map(|t| &t.kind) {
                    Some(TokenKind::High) => End::High,
                    Some(TokenKind::Low) => End::Low,
                    _ => {
                        let found = self.peek();
                        return Err(match found {
                            Some(t) => self.unexpected(t, "'h' or 'l'"),
                            None => self.unexpected_end("'h' or 'l'"),
                        });
                    }
                };
                let end_span = self.tokens[self.pos].span;
                self.pos += 1;
                let amount = self.keep_amount(end_span)?;
                DiceOp::KeepDrop { which, end, amount }
            }
            TokenKind::Filter => {
                self.pos += 1;
                DiceOp::Filter(self.condition()?)
            }
            TokenKind::Reroll => {
                self.pos += 1;
                let repeated = match self.adjacent(tok.span) {
                    Some(t) if t.kind == TokenKind::Reroll => {
                        self.pos += 1;
                        true
                    }
                    _ => false,
                };
                DiceOp::Reroll {
                    condition: self.condition()?,
                    repeated,
                }
            }
            TokenKind::Bang => {
                self.pos += 1;
                let mode = match self.adjacent(tok.span).map(|t| &t.kind) {
                    Some(TokenKind::Once) => ExplodeMode::Once,
                    Some(TokenKind::Penetrate) => ExplodeMode::Penetrating,
                    _ => return Ok(Some(DiceOp::Explode(ExplodeMode::Plain))),
                };
                self.pos += 1;
                DiceOp::Explode(mode)
            }
            TokenKind::Count => {
                self.pos += 1;
                DiceOp::Count
            }
            TokenKind::Unique => {
                self.pos += 1;
                DiceOp::Unique
            }
            _ => return Ok(None),
        };
        Ok(Some(op))
    }

    /// Optional `z` after `kh`/`kl`/`dh`/`dl`. A minus written flush against
    /// the `h`/`l` is a negative count; with whitespace it is a subtraction.
    fn keep_amount(&mut self, end_span: Span) -> Result<u64> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Minus && t.span.start == end_span.end => {
                let mut span = t.span;
                if let Some(n) = self.tokens.get(self.pos + 1) {
                    if matches!(n.kind, TokenKind::Int(_)) {
                        span = span.to(n.span);
                    }
                }
                Err(Error::NegativeKeepCount { span })
            }
            Some(Token {
                kind: TokenKind::Int(n),
                span,
            }) => {
                self.pos += 1;
                if *n == 0 {
                    return Err(Error::Parse {
                        span: *span,
                        expected: "a positive keep/drop count".into(),
                        found: "0".into(),
                    });
                }
                Ok(*n as u64)
            }
            _ => Ok(1),
        }
    }

    fn condition(&mut self) -> Result<Condition> {
        let Some(tok) = self.peek() else {
            return Err(self.unexpected_end("a comparison"));
        };
        let comparator = match tok.kind {
            TokenKind::EqEq => Comparator::Eq,
            TokenKind::NotEq => Comparator::Ne,
            TokenKind::Lt => Comparator::Lt,
            TokenKind::Gt => Comparator::Gt,
            TokenKind::LtEq => Comparator::Le,
            TokenKind::GtEq => Comparator::Ge,
            _ => return Err(self.unexpected(tok, "a comparison")),
        };
        self.pos += 1;
        let threshold = match self.peek().map(|t| &t.kind) {
            Some(TokenKind::Symbol(s) | TokenKind::MacroName(s)) => {
                let s = s.clone();
                self.pos += 1;
                Threshold::Symbol(s)
            }
            _ => Threshold::Int(self.signed_int()?.0),
        };
        Ok(Condition {
            comparator,
            threshold,
        })
    }

    fn macro_name(&mut self) -> Result<String> {
        match self.peek() {
            Some(Token {
                kind: TokenKind::MacroName(name),
                ..
            }) => {
                self.pos += 1;
                Ok(name.clone())
            }
            Some(t) => Err(self.unexpected(t, "an upper-case macro name")),
            None => Err(self.unexpected_end("an upper-case macro name")),
        }
    }

    /// Next token, but only if it touches `prev` with no whitespace between.
    fn adjacent(&self, prev: Span) -> Option<&'t Token> {
        self.peek().filter(|t| t.span.start == prev.end)
    }

    fn peek(&self) -> Option<&'t Token> {
        self.tokens.get(self.pos)
    }

    fn peek_kind(&self) -> Option<&'t TokenKind> {
        self.peek().map(|t| &t.kind)
    }

    fn eat(&mut self, kind: &TokenKind) -> Option<&'t Token> {
        let t = self.peek().filter(|t| &t.kind == kind)?;
        self.pos += 1;
        Some(t)
    }

    fn expect(&mut self, kind: &TokenKind, expected: &str) -> Result<&'t Token> {
        if let Some(t) = self.eat(kind) {
            return Ok(t);
        }
        Err(match self.peek() {
            Some(t) => self.unexpected(t, expected),
            None => self.unexpected_end(expected),
        })
    }

    fn unexpected(&self, tok: &Token, expected: &str) -> Error {
        Error::Parse {
            span: tok.span,
            expected: expected.into(),
            found: tok.kind.to_string(),
        }
    }

    fn unexpected_end(&self, expected: &str) -> Error {
        let end = self.tokens.last().map_or(0, |t| t.span.end);
        Error::Parse {
            span: Span::new(end, end),
            expected: expected.into(),
            found: "end of input".into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{parse_str, tokenize};

    fn p(src: &str) -> RollExpression {
        parse_str(src).unwrap_or_else(|e| panic!("{src}: {e}"))
    }

    fn single(src: &str) -> Expr {
        match p(src).statements.as_slice() {
            [Statement::Expr(e)] => e.clone(),
            other => panic!("expected one expression, got {other:?}"),
        }
    }

    fn dice(count: i64, faces: Faces) -> Expr {
        Expr::Dice {
            count: Some(Box::new(Expr::Int(count))),
            faces,
        }
    }

    fn op(child: Expr, op: DiceOp) -> Expr {
        Expr::DiceOp {
            child: Box::new(child),
            op,
        }
    }

    #[test]
    fn negative_sides() {
        assert!(matches!(parse_str("d-6"), Err(Error::NegativeSides { .. })));
        assert!(matches!(parse_str("2d-1"), Err(Error::NegativeSides { .. })));
    }

    #[test]
    fn middle_die_by_dropping_both_ends() {
        let drop = |end| DiceOp::KeepDrop {
            which: Selection::Drop,
            end,
            amount: 1,
        };
        assert_eq!(
            single("3d6dldh"),
            op(
                op(dice(3, Faces::Standard(6)), drop(End::Low)),
                drop(End::High)
            )
        );
    }

    #[test]
    fn minimal_die() {
        assert_eq!(single("1d1"), dice(1, Faces::Standard(1)));
        assert_eq!(
            single("d6"),
            Expr::Dice {
                count: None,
                faces: Faces::Standard(6)
            }
        );
    }

    #[test]
    fn macro_definition_and_access() {
        let expr = p("#SUITS = d{CLUBS,HEARTS,DIAMONDS,SPADES};@SUITS");
        assert_eq!(
            expr.statements,
            vec![
                Statement::MacroDefinition {
                    name: "SUITS".into(),
                    body: Expr::Dice {
                        count: None,
                        faces: Faces::Symbolic(
                            ["CLUBS", "HEARTS", "DIAMONDS", "SPADES"]
                                .map(String::from)
                                .to_vec()
                        )
                    }
                },
                Statement::Expr(Expr::MacroAccess("SUITS".into()))
            ]
        );
    }

    #[test]
    fn precedence() {
        // dice bind tighter than postfix ops, then unary minus, then * / \, then + -
        let e = single("-2d20kh+3*2");
        let Expr::Binary {
            op: MathOp::Add,
            lhs,
            rhs,
        } = e
        else {
            panic!("{e:?}")
        };
        assert!(matches!(*lhs, Expr::Negate(ref inner) if matches!(**inner, Expr::DiceOp { .. })));
        assert!(matches!(*rhs, Expr::Binary { op: MathOp::Mul, .. }));

        let e = single("1-2-3");
        assert!(
            matches!(e, Expr::Binary { op: MathOp::Sub, ref lhs, .. } if matches!(**lhs, Expr::Binary { .. }))
        );
    }

    #[test]
    fn groups_may_hold_sequences() {
        assert_eq!(
            single("(d6;d6) - 3"),
            Expr::Binary {
                op: MathOp::Sub,
                lhs: Box::new(Expr::Group(vec![
                    Expr::Dice {
                        count: None,
                        faces: Faces::Standard(6)
                    };
                    2
                ])),
                rhs: Box::new(Expr::Int(3)),
            }
        );
    }

    #[test]
    fn face_lists() {
        assert_eq!(
            single("d{1,2,3..8,9,10,100}"),
            Expr::Dice {
                count: None,
                faces: Faces::Numeric(vec![
                    FaceItem::Single(1),
                    FaceItem::Single(2),
                    FaceItem::Range(3, 8),
                    FaceItem::Single(9),
                    FaceItem::Single(10),
                    FaceItem::Single(100),
                ])
            }
        );
        assert_eq!(
            single("d{-1..1}"),
            Expr::Dice {
                count: None,
                faces: Faces::Numeric(vec![FaceItem::Range(-1, 1)])
            }
        );
        assert!(matches!(parse_str("d{1,FOO}"), Err(Error::MixedFaces { .. })));
        assert!(matches!(
            parse_str("d{8..3}"),
            Err(Error::EmptyRange {
                start: 8,
                end: 3,
                ..
            })
        ));
        assert!(matches!(parse_str("d{}"), Err(Error::Parse { .. })));
        assert!(matches!(parse_str("d{1,}"), Err(Error::Parse { .. })));
        assert!(matches!(parse_str("d{1"), Err(Error::Parse { .. })));
    }

    #[test]
    fn special_dice() {
        assert_eq!(single("d%"), Expr::Dice { count: None, faces: Faces::Percent });
        assert_eq!(single("4df"), dice(4, Faces::Fate));
        assert_eq!(single("c"), Expr::Dice { count: None, faces: Faces::Coin });
        assert_eq!(single("3c"), dice(3, Faces::Coin));
        assert_eq!(single("3dc"), dice(3, Faces::Coin));
    }

    #[test]
    fn keep_counts() {
        assert!(matches!(
            parse_str("2d6kh-1"),
            Err(Error::NegativeKeepCount { .. })
        ));
        // with whitespace the minus is a subtraction
        assert!(matches!(
            single("2d20kh - 2"),
            Expr::Binary { op: MathOp::Sub, .. }
        ));
        assert!(parse_str("2d6kh0").is_err());
        assert!(parse_str("2d6k").is_err());
        assert!(parse_str("2d6k h").is_err());
        assert_eq!(
            single("4d6kh3"),
            op(
                dice(4, Faces::Standard(6)),
                DiceOp::KeepDrop {
                    which: Selection::Keep,
                    end: End::High,
                    amount: 3
                }
            )
        );
    }

    #[test]
    fn rerolls_explosions_counts() {
        let lt2 = Condition {
            comparator: Comparator::Lt,
            threshold: Threshold::Int(2),
        };
        assert_eq!(
            single("1d6rr<2"),
            op(
                dice(1, Faces::Standard(6)),
                DiceOp::Reroll {
                    condition: lt2.clone(),
                    repeated: true
                }
            )
        );
        assert_eq!(
            single("1d6r<2"),
            op(
                dice(1, Faces::Standard(6)),
                DiceOp::Reroll {
                    condition: lt2,
                    repeated: false
                }
            )
        );
        assert_eq!(
            single("1d6!p"),
            op(dice(1, Faces::Standard(6)), DiceOp::Explode(ExplodeMode::Penetrating))
        );
        assert_eq!(
            single("4d6f>2c"),
            op(
                op(
                    dice(4, Faces::Standard(6)),
                    DiceOp::Filter(Condition {
                        comparator: Comparator::Gt,
                        threshold: Threshold::Int(2)
                    })
                ),
                DiceOp::Count
            )
        );
        assert!(parse_str("4d6cu").is_err(), "nothing may follow a count");
        assert!(parse_str("3f<2").is_err(), "ops need a dice term");
    }

    #[test]
    fn symbolic_thresholds() {
        let e = single("2dcf==HEADS");
        assert!(matches!(
            e,
            Expr::DiceOp { op: DiceOp::Filter(Condition { threshold: Threshold::Symbol(ref s), .. }), .. } if s == "HEADS"
        ));
        assert!(parse_str("4dff=='+'").is_ok());
    }

    #[test]
    fn missing_sides_strict_and_lenient() {
        assert!(matches!(parse_str("2d"), Err(Error::MissingSides { .. })));
        assert!(matches!(parse_str("2d+1"), Err(Error::MissingSides { .. })));
        let toks = tokenize("2d+1").unwrap();
        let lenient = parse_with(
            &toks,
            ParseOptions {
                default_missing_sides: true,
            },
        )
        .unwrap();
        assert_eq!(lenient.notes.len(), 1);
        assert!(matches!(
            &lenient.statements[0],
            Statement::Expr(Expr::Binary { lhs, .. }) if **lhs == dice(2, Faces::Standard(6))
        ));
    }

    #[test]
    fn structured_errors() {
        assert_eq!(parse_str(""), Err(Error::EmptyExpression));
        assert!(matches!(parse_str("d6;"), Err(Error::Parse { .. })));
        assert!(matches!(parse_str("(d6"), Err(Error::Parse { .. })));
        assert!(matches!(parse_str("d0"), Err(Error::ZeroSides { .. })));
        assert!(matches!(parse_str("#suits=d6"), Err(Error::Lex { found: 's', .. })));
        assert!(matches!(parse_str("@"), Err(Error::Parse { .. })));
        let Err(Error::Parse { span, .. }) = parse_str("2d6 3") else {
            panic!()
        };
        assert_eq!(span, Span::new(4, 5));
    }

    #[test]
    fn dice_count_from_group() {
        assert!(matches!(
            single("(1+1)d6"),
            Expr::Dice { count: Some(ref c), .. } if matches!(**c, Expr::Group(_))
        ));
    }
}
