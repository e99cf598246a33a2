use std::fmt;

use crate::error::{Error, Result, Span};

/// Longest symbolic face accepted, in characters.
pub const MAX_SYMBOL_LEN: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Int(i64),
    /// `d` introducing a die.
    Dice,
    /// `%` after `d`.
    Percent,
    /// `c` standing for a coin.
    Coin,
    /// `f` directly after `d`.
    Fate,
    Keep,
    /// `d` followed by `h` or `l`.
    Drop,
    High,
    Low,
    Reroll,
    Bang,
    Once,
    Penetrate,
    Filter,
    Count,
    Unique,
    EqEq,
    NotEq,
    Lt,
    Gt,
    LtEq,
    GtEq,
    Plus,
    Minus,
    Star,
    Slash,
    Backslash,
    LBrace,
    RBrace,
    Comma,
    Range,
    Semicolon,
    Hash,
    At,
    Assign,
    LParen,
    RParen,
    MacroName(String),
    Symbol(String),
}

impl TokenKind {
    /// Tokens after which a new operand starts.
    fn starts_operand(prev: Option<&TokenKind>) -> bool {
        matches!(
            prev,
            None | Some(
                TokenKind::Plus
                    | TokenKind::Minus
                    | TokenKind::Star
                    | TokenKind::Slash
                    | TokenKind::Backslash
                    | TokenKind::LParen
                    | TokenKind::Semicolon
                    | TokenKind::Assign
            )
        )
    }
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TokenKind::Int(n) => return write!(f, "integer {n}"),
            TokenKind::MacroName(n) => return write!(f, "name {n}"),
            TokenKind::Symbol(s) => return write!(f, "symbol {s:?}"),
            TokenKind::Dice => "'d'",
            TokenKind::Percent => "'%'",
            TokenKind::Coin => "'c'",
            TokenKind::Fate => "'f'",
            TokenKind::Keep => "'k'",
            TokenKind::Drop => "'d'",
            TokenKind::High => "'h'",
            TokenKind::Low => "'l'",
            TokenKind::Reroll => "'r'",
            TokenKind::Bang => "'!'",
            TokenKind::Once => "'o'",
            TokenKind::Penetrate => "'p'",
            TokenKind::Filter => "'f'",
            TokenKind::Count => "'c'",
            TokenKind::Unique => "'u'",
            TokenKind::EqEq => "'=='",
            TokenKind::NotEq => "'!='",
            TokenKind::Lt => "'<'",
            TokenKind::Gt => "'>'",
            TokenKind::LtEq => "'<='",
            TokenKind::GtEq => "'>='",
            TokenKind::Plus => "'+'",
            TokenKind::Minus => "'-'",
            TokenKind::Star => "'*'",
            TokenKind::Slash => "'/'",
            TokenKind::Backslash => "'\\'",
            TokenKind::LBrace => "'{'",
            TokenKind::RBrace => "'}'",
            TokenKind::Comma => "','",
            TokenKind::Range => "'..'",
            TokenKind::Semicolon => "';'",
            TokenKind::Hash => "'#'",
            TokenKind::At => "'@'",
            TokenKind::Assign => "'='",
            TokenKind::LParen => "'('",
            TokenKind::RParen => "')'",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

impl Token {
    /// Source text of the token.
    pub fn lexeme<'s>(&self, source: &'s str) -> &'s str {
        &source[self.span.start..self.span.end]
    }
}

/// Splits `source` into tokens. Whitespace between tokens is skipped.
///
/// A few letters are context sensitive: `d` is a drop when followed by `h` or
/// `l`, `f` is a fate die directly after `d`, and `c` is a coin wherever an
/// operand may start and a success count otherwise.
pub fn tokenize(source: &str) -> Result<Vec<Token>> {
    Lexer {
        src: source,
        pos: 0,
        tokens: Vec::new(),
    }
    .run()
}

struct Lexer<'s> {
    src: &'s str,
    pos: usize,
    tokens: Vec<Token>,
}

impl<'s> Lexer<'s> {
    fn run(mut self) -> Result<Vec<Token>> {
        while let Some(c) = self.peek() {
            let start = self.pos;
            if c.is_whitespace() {
                self.bump();
                continue;
            }
            if c.is_ascii_digit() {
                let n = self.integer()?;
                self.push(TokenKind::Int(n), start);
                continue;
            }
            if c.is_ascii_uppercase() {
                while matches!(self.peek(), Some(ch) if ch.is_ascii_uppercase() || ch.is_ascii_digit() || ch == '_')
                {
                    self.bump();
                }
                let name = self.src[start..self.pos].to_string();
                self.push(TokenKind::MacroName(name), start);
                continue;
            }
            if c == '\'' || c == '"' {
                let text = self.quoted()?;
                self.push(TokenKind::Symbol(text), start);
                continue;
            }
            if c == '{' {
                self.bump();
                self.push(TokenKind::LBrace, start);
                self.face_list()?;
                continue;
            }
            self.bump();
            let kind = match c {
                'd' => match self.peek() {
                    Some('h' | 'l') => TokenKind::Drop,
                    _ => TokenKind::Dice,
                },
                'f' if self.prev() == Some(&TokenKind::Dice) => TokenKind::Fate,
                'f' => TokenKind::Filter,
                'c' => self.classify_c(),
                '%' => TokenKind::Percent,
                'k' => TokenKind::Keep,
                'h' => TokenKind::High,
                'l' => TokenKind::Low,
                'r' => TokenKind::Reroll,
                'o' => TokenKind::Once,
                'p' => TokenKind::Penetrate,
                'u' => TokenKind::Unique,
                '!' if self.eat('=') => TokenKind::NotEq,
                '!' => TokenKind::Bang,
                '=' if self.eat('=') => TokenKind::EqEq,
                '=' => TokenKind::Assign,
                '<' if self.eat('=') => TokenKind::LtEq,
                '<' => TokenKind::Lt,
                '>' if self.eat('=') => TokenKind::GtEq,
                '>' => TokenKind::Gt,
                '+' => TokenKind::Plus,
                '-' => TokenKind::Minus,
                '*' => TokenKind::Star,
                '/' => TokenKind::Slash,
                '\\' => TokenKind::Backslash,
                ';' => TokenKind::Semicolon,
                '#' => TokenKind::Hash,
                '@' => TokenKind::At,
                '(' => TokenKind::LParen,
                ')' => TokenKind::RParen,
                '}' => TokenKind::RBrace,
                ',' => TokenKind::Comma,
                found => {
                    return Err(Error::Lex {
                        span: Span::new(start, self.pos),
                        found,
                    })
                }
            };
            self.push(kind, start);
        }
        Ok(self.tokens)
    }

    fn classify_c(&self) -> TokenKind {
        let n = self.tokens.len();
        let prev = self.prev();
        if prev == Some(&TokenKind::Dice) || TokenKind::starts_operand(prev) {
            return TokenKind::Coin;
        }
        if matches!(prev, Some(TokenKind::Int(_)))
            && TokenKind::starts_operand(n.checked_sub(2).map(|i| &self.tokens[i].kind))
        {
            return TokenKind::Coin;
        }
        TokenKind::Count
    }

    /// Lexes the inside of `{...}` up to and including the closing brace.
    ///
    /// Each comma separated item is either numeric (`4`, `-2`, `3..8`) or a
    /// symbol, quoted or bare.
    fn face_list(&mut self) -> Result<()> {
        loop {
            self.skip_ws();
            let start = self.pos;
            match self.peek() {
                None => return Ok(()),
                Some('}') => {
                    self.bump();
                    self.push(TokenKind::RBrace, start);
                    return Ok(());
                }
                Some(',') => {
                    self.bump();
                    self.push(TokenKind::Comma, start);
                    continue;
                }
                Some('\'' | '"') => {
                    let text = self.quoted()?;
                    self.push(TokenKind::Symbol(text), start);
                    continue;
                }
                Some(_) => {}
            }
            let rest = &self.src[start..];
            let len = rest.find([',', '}']).unwrap_or(rest.len());
            let item = rest[..len].trim_end();
            if is_numeric_item(item) {
                self.numeric_item(start + item.len())?;
            } else {
                let chars = item.chars().count();
                let span = Span::new(start, start + item.len());
                if chars > MAX_SYMBOL_LEN {
                    return Err(Error::SymbolTooLong { span, len: chars });
                }
                self.pos = start + item.len();
                self.push(TokenKind::Symbol(item.to_string()), start);
            }
        }
    }

    fn numeric_item(&mut self, end: usize) -> Result<()> {
        while self.pos < end {
            let start = self.pos;
            match self.peek() {
                Some('-') => {
                    self.bump();
                    self.push(TokenKind::Minus, start);
                }
                Some('.') => {
                    self.pos += 2;
                    self.push(TokenKind::Range, start);
                }
                Some(c) if c.is_ascii_digit() => {
                    let n = self.integer()?;
                    self.push(TokenKind::Int(n), start);
                }
                _ => {
                    self.bump();
                }
            }
        }
        Ok(())
    }

    fn quoted(&mut self) -> Result<String> {
        let start = self.pos;
        let quote = self.bump().expect("caller peeked a quote");
        let body = self.pos;
        loop {
            match self.bump() {
                None => {
                    return Err(Error::Parse {
                        span: Span::new(start, self.pos),
                        expected: format!("closing {quote}"),
                        found: "end of input".into(),
                    })
                }
                Some(c) if c == quote => break,
                Some(_) => {}
            }
        }
        let text = &self.src[body..self.pos - 1];
        let chars = text.chars().count();
        if chars > MAX_SYMBOL_LEN {
            return Err(Error::SymbolTooLong {
                span: Span::new(start, self.pos),
                len: chars,
            });
        }
        if text.is_empty() {
            return Err(Error::Parse {
                span: Span::new(start, self.pos),
                expected: "non-empty symbol".into(),
                found: "empty quotes".into(),
            });
        }
        Ok(text.to_string())
    }

    fn integer(&mut self) -> Result<i64> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.bump();
        }
        self.src[start..self.pos]
            .parse()
            .map_err(|_| Error::IntegerOverflow {
                span: Span::new(start, self.pos),
            })
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
    }

    fn prev(&self) -> Option<&TokenKind> {
        self.tokens.last().map(|t| &t.kind)
    }

    fn push(&mut self, kind: TokenKind, start: usize) {
        self.tokens.push(Token {
            kind,
            span: Span::new(start, self.pos),
        });
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }
}

/// `-?digits` optionally followed by `..-?digits`, with optional blanks
/// around the range dots.
fn is_numeric_item(item: &str) -> bool {
    fn int(s: &str) -> bool {
        let s = s.trim();
        let digits = s.strip_prefix('-').unwrap_or(s);
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    }
    match item.split_once("..") {
        Some((lo, hi)) => int(lo) && int(hi),
        None => int(item) && !item.trim_start_matches('-').contains(char::is_whitespace),
    }
}
