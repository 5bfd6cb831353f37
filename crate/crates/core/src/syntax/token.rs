//! Lossless SPARQL tokenizer.
//!
//! Every input byte ends up in exactly one token, so concatenating token
//! slices always reproduces the input. Bytes that are not valid UTF-8 or that
//! cannot start any SPARQL token become [`TokenKind::Error`] fragments.

use std::fmt;

use serde::Serialize;

/// Half-open byte range `[start, end)` into the source text.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub const fn new(start: usize, end: usize) -> Self {
        Self { start, end }
    }

    pub const fn empty(at: usize) -> Self {
        Self { start: at, end: at }
    }

    pub const fn len(&self) -> usize {
        self.end - self.start
    }

    pub const fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub const fn contains_span(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn cover(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TokenKind {
    Keyword,
    /// `<...>`; also produced for an IRI left open at end of input.
    Iri,
    PrefixedName,
    /// `?name` / `$name`; a bare `?` that cannot be a path modifier is a
    /// variable with an empty name.
    Variable,
    Literal,
    BlankNode,
    Punctuation,
    Comment,
    Whitespace,
    /// The single letter `a`, shorthand for `rdf:type`.
    TypeShorthand,
    Error,
}

impl TokenKind {
    pub fn is_trivia(self) -> bool {
        matches!(self, TokenKind::Whitespace | TokenKind::Comment)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

impl Token {
    /// The exact source slice covered by this token.
    pub fn text<'s>(&self, source: &'s [u8]) -> &'s [u8] {
        &source[self.span.start..self.span.end]
    }

    /// The token text as `str`. Only error fragments can fail to decode.
    pub fn text_str<'s>(&self, source: &'s [u8]) -> &'s str {
        std::str::from_utf8(self.text(source)).unwrap_or("")
    }
}

/// SPARQL 1.1 query keywords and built-in function names, upper-cased.
pub const KEYWORDS: &[&str] = &[
    "ABS",
    "AS",
    "ASC",
    "ASK",
    "AVG",
    "BASE",
    "BIND",
    "BNODE",
    "BOUND",
    "BY",
    "CEIL",
    "COALESCE",
    "CONCAT",
    "CONSTRUCT",
    "CONTAINS",
    "COUNT",
    "DATATYPE",
    "DAY",
    "DESC",
    "DESCRIBE",
    "DISTINCT",
    "ENCODE_FOR_URI",
    "EXISTS",
    "FILTER",
    "FLOOR",
    "FROM",
    "GRAPH",
    "GROUP",
    "GROUP_CONCAT",
    "HAVING",
    "HOURS",
    "IF",
    "IN",
    "IRI",
    "ISBLANK",
    "ISIRI",
    "ISLITERAL",
    "ISNUMERIC",
    "ISURI",
    "LANG",
    "LANGMATCHES",
    "LCASE",
    "LIMIT",
    "MAX",
    "MD5",
    "MIN",
    "MINUS",
    "MINUTES",
    "MONTH",
    "NAMED",
    "NOT",
    "NOW",
    "OFFSET",
    "OPTIONAL",
    "ORDER",
    "PREFIX",
    "RAND",
    "REDUCED",
    "REGEX",
    "REPLACE",
    "ROUND",
    "SAMETERM",
    "SAMPLE",
    "SECONDS",
    "SELECT",
    "SEPARATOR",
    "SERVICE",
    "SHA1",
    "SHA256",
    "SHA384",
    "SHA512",
    "SILENT",
    "STR",
    "STRAFTER",
    "STRBEFORE",
    "STRDT",
    "STRENDS",
    "STRLANG",
    "STRLEN",
    "STRSTARTS",
    "STRUUID",
    "SUBSTR",
    "SUM",
    "TIMEZONE",
    "TZ",
    "UCASE",
    "UNDEF",
    "UNION",
    "URI",
    "UUID",
    "VALUES",
    "WHERE",
    "YEAR",
];

pub fn is_keyword(word: &str) -> bool {
    let upper = word.to_ascii_uppercase();
    KEYWORDS.binary_search(&upper.as_str()).is_ok()
}

/// Splits `input` into tokens. Total: never fails, covers every byte.
pub fn tokenize(input: impl AsRef<[u8]>) -> Vec<Token> {
    let src = input.as_ref();
    let mut lexer = Lexer { src, pos: 0, tokens: Vec::new() };
    while lexer.pos < src.len() {
        let start = lexer.pos;
        let kind = lexer.next_kind();
        debug_assert!(lexer.pos > start, "lexer must always make progress");
        lexer.tokens.push(Token { kind, span: Span::new(start, lexer.pos) });
    }
    lexer.tokens
}

#[derive(Clone, Copy)]
enum Decoded {
    Char(char, usize),
    Invalid(usize),
    Eof,
}

fn decode_at(src: &[u8], at: usize) -> Decoded {
    if at >= src.len() {
        return Decoded::Eof;
    }
    let end = (at + 4).min(src.len());
    match std::str::from_utf8(&src[at..end]) {
        Ok(s) => {
            let c = s.chars().next().expect("non-empty slice");
            Decoded::Char(c, c.len_utf8())
        }
        Err(e) if e.valid_up_to() > 0 => {
            let s = std::str::from_utf8(&src[at..at + e.valid_up_to()]).expect("validated prefix");
            let c = s.chars().next().expect("non-empty prefix");
            Decoded::Char(c, c.len_utf8())
        }
        Err(e) => Decoded::Invalid(e.error_len().unwrap_or(end - at)),
    }
}

fn is_ws(c: char) -> bool {
    matches!(c, ' ' | '\t' | '\n' | '\r')
}

pub(crate) fn is_pn_chars_base(c: char) -> bool {
    matches!(c,
        'A'..='Z' | 'a'..='z'
        | '\u{C0}'..='\u{D6}' | '\u{D8}'..='\u{F6}' | '\u{F8}'..='\u{2FF}'
        | '\u{370}'..='\u{37D}' | '\u{37F}'..='\u{1FFF}' | '\u{200C}'..='\u{200D}'
        | '\u{2070}'..='\u{218F}' | '\u{2C00}'..='\u{2FEF}' | '\u{3001}'..='\u{D7FF}'
        | '\u{F900}'..='\u{FDCF}' | '\u{FDF0}'..='\u{FFFD}' | '\u{10000}'..='\u{EFFFF}')
}

pub(crate) fn is_pn_chars_u(c: char) -> bool {
    is_pn_chars_base(c) || c == '_'
}

pub(crate) fn is_pn_chars(c: char) -> bool {
    is_pn_chars_u(c)
        || c == '-'
        || c.is_ascii_digit()
        || c == '\u{B7}'
        || ('\u{300}'..='\u{36F}').contains(&c)
        || ('\u{203F}'..='\u{2040}').contains(&c)
}

fn is_varname_char(c: char) -> bool {
    is_pn_chars_u(c)
        || c.is_ascii_digit()
        || c == '\u{B7}'
        || ('\u{300}'..='\u{36F}').contains(&c)
        || ('\u{203F}'..='\u{2040}').contains(&c)
}

fn is_iri_char(c: char) -> bool {
    !(c <= ' ' || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\'))
}

const LOCAL_ESCAPES: &str = "_~.-!$&'()*+,;=/?#@%";

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    tokens: Vec<Token>,
}

impl Lexer<'_> {
    fn peek(&self) -> Decoded {
        decode_at(self.src, self.pos)
    }

    fn peek_at(&self, at: usize) -> Decoded {
        decode_at(self.src, at)
    }

    fn peek_char(&self) -> Option<char> {
        match self.peek() {
            Decoded::Char(c, _) => Some(c),
            _ => None,
        }
    }

    fn char_at(&self, at: usize) -> Option<(char, usize)> {
        match self.peek_at(at) {
            Decoded::Char(c, n) => Some((c, n)),
            _ => None,
        }
    }

    fn bump_while(&mut self, pred: impl Fn(char) -> bool) {
        while let Decoded::Char(c, n) = self.peek() {
            if !pred(c) {
                break;
            }
            self.pos += n;
        }
    }

    fn next_kind(&mut self) -> TokenKind {
        let (c, n) = match self.peek() {
            Decoded::Char(c, n) => (c, n),
            Decoded::Invalid(n) => {
                self.pos += n;
                return TokenKind::Error;
            }
            Decoded::Eof => unreachable!("called at end of input"),
        };
        match c {
            _ if is_ws(c) => {
                self.bump_while(is_ws);
                TokenKind::Whitespace
            }
            '#' => {
                self.bump_while(|c| c != '\n' && c != '\r');
                TokenKind::Comment
            }
            '<' => self.iri_or_less_than(),
            '"' | '\'' => self.string_literal(c),
            '?' | '$' => self.variable(c),
            '_' if self.src.get(self.pos + 1) == Some(&b':') => self.blank_node(),
            '0'..='9' => self.number(),
            '.' if matches!(self.char_at(self.pos + 1), Some((d, _)) if d.is_ascii_digit()) => self.number(),
            ':' => {
                self.pos += 1;
                self.local_name();
                TokenKind::PrefixedName
            }
            _ if is_pn_chars_base(c) => self.word(),
            _ => {
                self.pos += n;
                self.punctuation(c)
            }
        }
    }

    fn punctuation(&mut self, c: char) -> TokenKind {
        let follow = |s: &mut Self, next: u8| {
            if s.src.get(s.pos) == Some(&next) {
                s.pos += 1;
                true
            } else {
                false
            }
        };
        match c {
            '{' | '}' | '(' | ')' | '[' | ']' | ',' | ';' | '.' | '*' | '=' | '+' | '-' | '/' => TokenKind::Punctuation,
            '!' => {
                follow(self, b'=');
                TokenKind::Punctuation
            }
            '>' => {
                follow(self, b'=');
                TokenKind::Punctuation
            }
            '|' => {
                follow(self, b'|');
                TokenKind::Punctuation
            }
            '^' => {
                follow(self, b'^');
                TokenKind::Punctuation
            }
            '&' => {
                if follow(self, b'&') {
                    TokenKind::Punctuation
                } else {
                    TokenKind::Error
                }
            }
            _ => TokenKind::Error,
        }
    }

    fn iri_or_less_than(&mut self) -> TokenKind {
        let mut at = self.pos + 1;
        loop {
            match self.peek_at(at) {
                Decoded::Char('>', _) => {
                    self.pos = at + 1;
                    return TokenKind::Iri;
                }
                Decoded::Char(c, n) if is_iri_char(c) => at += n,
                // an open IRI being typed, unless it reads as `<=`
                Decoded::Eof if self.src.get(self.pos + 1) != Some(&b'=') => {
                    self.pos = at;
                    return TokenKind::Iri;
                }
                _ => break,
            }
        }
        self.pos += 1;
        if self.src.get(self.pos) == Some(&b'=') {
            self.pos += 1;
        }
        TokenKind::Punctuation
    }

    fn string_literal(&mut self, quote: char) -> TokenKind {
        let q = quote as u8;
        let long = self.src[self.pos..].starts_with(&[q, q, q]);
        self.pos += if long { 3 } else { 1 };
        loop {
            match self.peek() {
                Decoded::Eof | Decoded::Invalid(_) => return TokenKind::Error,
                Decoded::Char('\\', _) => {
                    self.pos += 1;
                    match self.peek() {
                        Decoded::Char(_, n) => self.pos += n,
                        _ => return TokenKind::Error,
                    }
                }
                Decoded::Char(c, n) if c == quote => {
                    if !long {
                        self.pos += n;
                        break;
                    }
                    if self.src[self.pos..].starts_with(&[q, q, q]) {
                        self.pos += 3;
                        break;
                    }
                    self.pos += n;
                }
                Decoded::Char('\n' | '\r', _) if !long => return TokenKind::Error,
                Decoded::Char(_, n) => self.pos += n,
            }
        }
        // language tag glued to the literal
        if self.src.get(self.pos) == Some(&b'@') && self.src.get(self.pos + 1).is_some_and(|b| b.is_ascii_alphabetic())
        {
            self.pos += 1;
            self.bump_while(|c| c.is_ascii_alphabetic());
            while self.src.get(self.pos) == Some(&b'-')
                && self.src.get(self.pos + 1).is_some_and(|b| b.is_ascii_alphanumeric())
            {
                self.pos += 1;
                self.bump_while(|c| c.is_ascii_alphanumeric());
            }
        }
        TokenKind::Literal
    }

    fn variable(&mut self, sigil: char) -> TokenKind {
        self.pos += 1;
        match self.peek_char() {
            Some(c) if is_varname_char(c) => {
                self.bump_while(is_varname_char);
                TokenKind::Variable
            }
            _ if sigil == '$' => TokenKind::Error,
            _ => {
                // `?` glued to a path primary is a path modifier
                let glued = self.tokens.last().is_some_and(|t| {
                    t.span.end == self.pos - 1
                        && (matches!(t.kind, TokenKind::Iri | TokenKind::PrefixedName | TokenKind::TypeShorthand)
                            || (t.kind == TokenKind::Punctuation && self.src[t.span.start] == b')'))
                });
                if glued {
                    TokenKind::Punctuation
                } else {
                    TokenKind::Variable
                }
            }
        }
    }

    fn blank_node(&mut self) -> TokenKind {
        self.pos += 2;
        if let Some(c) = self.peek_char() {
            if is_pn_chars_u(c) || c.is_ascii_digit() {
                self.scan_dotted(is_pn_chars);
            }
        }
        TokenKind::BlankNode
    }

    /// Scans `first (chars | '.')*` without a trailing dot. Assumes the first
    /// character has been validated by the caller.
    fn scan_dotted(&mut self, chars: impl Fn(char) -> bool) {
        let mut at = self.pos;
        let mut last_good = self.pos;
        while let Some((c, n)) = self.char_at(at) {
            if chars(c) {
                at += n;
                last_good = at;
            } else if c == '.' {
                at += n;
            } else {
                break;
            }
        }
        self.pos = last_good;
    }

    fn number(&mut self) -> TokenKind {
        self.bump_while(|c| c.is_ascii_digit());
        if self.src.get(self.pos) == Some(&b'.') && self.src.get(self.pos + 1).is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
            self.bump_while(|c| c.is_ascii_digit());
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let mut at = self.pos + 1;
            if matches!(self.src.get(at), Some(b'+' | b'-')) {
                at += 1;
            }
            if self.src.get(at).is_some_and(|b| b.is_ascii_digit()) {
                self.pos = at;
                self.bump_while(|c| c.is_ascii_digit());
            }
        }
        TokenKind::Literal
    }

    /// Bare word: keyword, `a`, boolean, prefixed name, or error fragment.
    fn word(&mut self) -> TokenKind {
        let start = self.pos;
        self.scan_dotted(is_pn_chars);
        if self.src.get(self.pos) == Some(&b':') {
            self.pos += 1;
            self.local_name();
            return TokenKind::PrefixedName;
        }
        self.pos = start;
        self.bump_while(|c| c.is_ascii_alphanumeric() || c == '_');
        if self.pos == start {
            // non-ASCII letter run that is not a prefix
            self.scan_dotted(is_pn_chars);
            return TokenKind::Error;
        }
        let word = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        if word == "a" {
            TokenKind::TypeShorthand
        } else if word.eq_ignore_ascii_case("true") || word.eq_ignore_ascii_case("false") {
            TokenKind::Literal
        } else if is_keyword(word) {
            TokenKind::Keyword
        } else {
            TokenKind::Error
        }
    }

    /// PN_LOCAL after the colon; may be empty.
    fn local_name(&mut self) {
        let mut at = self.pos;
        let mut last_good = self.pos;
        let mut first = true;
        loop {
            let step = match self.char_at(at) {
                Some((c, n)) if is_pn_chars_u(c) || c.is_ascii_digit() || c == ':' => Some(n),
                Some((c, n)) if !first && (is_pn_chars(c)) => Some(n),
                Some(('.', n)) if !first => {
                    at += n;
                    continue;
                }
                Some(('%', _)) => {
                    let hex = |i: usize| self.src.get(at + i).is_some_and(|b| b.is_ascii_hexdigit());
                    (hex(1) && hex(2)).then_some(3)
                }
                Some(('\\', _)) => match self.char_at(at + 1) {
                    Some((e, n)) if LOCAL_ESCAPES.contains(e) => Some(1 + n),
                    _ => None,
                },
                _ => None,
            };
            match step {
                Some(n) => {
                    at += n;
                    last_good = at;
                    first = false;
                }
                None => break,
            }
        }
        self.pos = last_good;
    }
}
