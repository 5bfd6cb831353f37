//! Recursive-descent parser that never fails.
//!
//! The parser walks significant tokens left to right and records, for every
//! gap between tokens, what it expected to see there. Cursor analysis reads
//! those expectations back instead of re-parsing. Anything it cannot
//! structure becomes an [`ErrorNode`] and parsing resumes at the next token.

use super::token::{tokenize, Span, Token, TokenKind};
use super::tree::*;

/// Parses arbitrary bytes into a [`SyntaxTree`]. Total.
pub fn parse_partial(text: impl AsRef<[u8]>) -> SyntaxTree {
    let src = text.as_ref();
    let tokens = tokenize(src);
    let significant: Vec<usize> =
        tokens.iter().enumerate().filter(|(_, t)| !t.kind.is_trivia()).map(|(i, _)| i).collect();
    let mut parser = Parser {
        src,
        tokens: &tokens,
        expectations: vec![None; significant.len() + 1],
        sig: &significant,
        pos: 0,
        form: QueryForm::Incomplete,
        prologue: Prologue::default(),
        scopes: vec![Scope {
            id: ScopeId::DOCUMENT,
            kind: ScopeKind::Document,
            parent: None,
            span: Span::new(0, src.len()),
            inner: Span::new(0, src.len()),
            closed: true,
            service: None,
        }],
        triples: Vec::new(),
        services: Vec::new(),
        errors: Vec::new(),
        last_error_token: None,
    };
    parser.document();
    let Parser { expectations, form, prologue, scopes, triples, services, errors, .. } = parser;
    SyntaxTree {
        source: src.to_vec(),
        tokens,
        significant,
        expectations,
        form,
        prologue,
        scopes,
        triples,
        services,
        errors,
    }
}

struct Parser<'a> {
    src: &'a [u8],
    tokens: &'a [Token],
    sig: &'a [usize],
    pos: usize,
    expectations: Vec<Option<Expectation>>,
    form: QueryForm,
    prologue: Prologue,
    scopes: Vec<Scope>,
    triples: Vec<TriplePattern>,
    services: Vec<ServiceNode>,
    errors: Vec<ErrorNode>,
    last_error_token: Option<usize>,
}

const ROOT: ScopeId = ScopeId::DOCUMENT;

impl<'a> Parser<'a> {
    // ---- token access ----

    fn peek(&self) -> Option<Token> {
        self.peek_nth(0)
    }

    fn peek_nth(&self, n: usize) -> Option<Token> {
        self.sig.get(self.pos + n).map(|&i| self.tokens[i])
    }

    fn text(&self, tok: Token) -> &'a str {
        std::str::from_utf8(&self.src[tok.span.start..tok.span.end]).unwrap_or("")
    }

    fn at_kw(&self, kw: &str) -> bool {
        self.peek().is_some_and(|t| t.kind == TokenKind::Keyword && self.text(t).eq_ignore_ascii_case(kw))
    }

    fn at_any_kw(&self) -> bool {
        self.peek().is_some_and(|t| t.kind == TokenKind::Keyword)
    }

    fn is_punct(&self, tok: Token, p: &str) -> bool {
        tok.kind == TokenKind::Punctuation && self.text(tok) == p
    }

    fn at_punct(&self, p: &str) -> bool {
        self.peek().is_some_and(|t| self.is_punct(t, p))
    }

    fn at_kind(&self, kind: TokenKind) -> bool {
        self.peek().is_some_and(|t| t.kind == kind)
    }

    fn eof(&self) -> bool {
        self.pos >= self.sig.len()
    }

    fn bump(&mut self) -> Token {
        let tok = self.peek().expect("bump past end of input");
        self.pos += 1;
        tok
    }

    /// End offset of the last consumed token.
    fn last_end(&self) -> usize {
        match self.pos.checked_sub(1) {
            Some(i) => self.tokens[self.sig[i]].span.end,
            None => 0,
        }
    }

    fn next_start(&self) -> usize {
        self.peek().map_or(self.src.len(), |t| t.span.start)
    }

    // ---- bookkeeping ----

    fn expect(
        &mut self,
        role: Role,
        keywords: KeywordSet,
        scope: ScopeId,
        subject: Option<&TermNode>,
        predicate: Option<&TermNode>,
    ) {
        let slot = &mut self.expectations[self.pos];
        if slot.is_none() {
            *slot =
                Some(Expectation { role, keywords, scope, subject: subject.cloned(), predicate: predicate.cloned() });
        }
    }

    /// Consumes the next token as an error, merging runs of skipped tokens.
    fn error_token(&mut self, message: &str) {
        let index = self.pos;
        let tok = self.bump();
        if index > 0 && self.last_error_token == Some(index - 1) {
            if let Some(last) = self.errors.last_mut() {
                last.span.end = tok.span.end;
                self.last_error_token = Some(index);
                return;
            }
        }
        self.errors.push(ErrorNode { span: tok.span, message: message.to_string() });
        self.last_error_token = Some(index);
    }

    /// Zero-width error before the next token (or at end of input).
    fn error_here(&mut self, message: &str) {
        let at = self.next_start();
        self.errors.push(ErrorNode { span: Span::empty(at), message: message.to_string() });
    }

    fn new_scope(&mut self, kind: ScopeKind, parent: ScopeId, open: Span) -> ScopeId {
        let id = ScopeId(self.scopes.len());
        self.scopes.push(Scope {
            id,
            kind,
            parent: Some(parent),
            span: Span::new(open.start, self.src.len()),
            inner: Span::new(open.end, self.src.len()),
            closed: false,
            service: None,
        });
        id
    }

    fn close_scope(&mut self, id: ScopeId, close: Span) {
        let scope = &mut self.scopes[id.0];
        scope.span.end = close.end;
        scope.inner.end = close.start;
        scope.closed = true;
    }

    fn term_node(&self, tok: Token) -> TermNode {
        let text = self.text(tok);
        let term = match tok.kind {
            TokenKind::Variable => Term::Variable(text[1..].to_string()),
            TokenKind::Iri => {
                let inner = text.strip_prefix('<').unwrap_or(text);
                Term::Iri(inner.strip_suffix('>').unwrap_or(inner).to_string())
            }
            TokenKind::PrefixedName => {
                let (prefix, local) = text.split_once(':').unwrap_or((text, ""));
                Term::PrefixedName { prefix: prefix.to_string(), local: local.to_string() }
            }
            TokenKind::BlankNode => Term::BlankNode(text[2..].to_string()),
            TokenKind::TypeShorthand => Term::Iri(RDF_TYPE.to_string()),
            _ => Term::Literal(text.to_string()),
        };
        TermNode { term, span: tok.span }
    }

    // ---- document level ----

    fn document(&mut self) {
        loop {
            self.expect(Role::Keyword, KeywordSet::Query, ROOT, None, None);
            if self.at_kw("PREFIX") {
                self.prefix_decl();
            } else if self.at_kw("BASE") {
                self.base_decl();
            } else {
                break;
            }
        }
        loop {
            self.expect(Role::Keyword, KeywordSet::Query, ROOT, None, None);
            if self.eof() {
                break;
            }
            if self.at_kw("SELECT") {
                self.form = QueryForm::Select;
                self.bump();
                self.select_clause();
                self.where_and_modifiers(true);
                break;
            } else if self.at_kw("CONSTRUCT") {
                self.form = QueryForm::Construct;
                self.bump();
                self.construct_query();
                break;
            } else if self.at_kw("ASK") {
                self.form = QueryForm::Ask;
                self.bump();
                self.dataset_clauses();
                self.where_and_modifiers(true);
                break;
            } else if self.at_kw("DESCRIBE") {
                self.form = QueryForm::Describe;
                self.bump();
                self.describe_query();
                break;
            } else if self.at_kw("WHERE") || self.at_punct("{") {
                self.where_and_modifiers(true);
                break;
            } else if self.at_kw("PREFIX") {
                self.prefix_decl();
            } else if self.at_kw("BASE") {
                self.base_decl();
            } else {
                self.error_token("unexpected input before query form");
            }
        }
        while !self.eof() {
            self.error_token("unexpected trailing input");
        }
    }

    fn prefix_decl(&mut self) {
        let kw = self.bump();
        self.expect(Role::PrefixDeclaration, KeywordSet::None, ROOT, None, None);
        let label = match self.peek() {
            Some(t) if t.kind == TokenKind::PrefixedName => match self.text(t).split_once(':') {
                Some((label, "")) => label.to_string(),
                _ => return self.error_here("expected prefix label ending in ':'"),
            },
            _ => return self.error_here("expected prefix label"),
        };
        self.bump();
        self.expect(Role::PrefixDeclaration, KeywordSet::None, ROOT, None, None);
        match self.peek() {
            Some(t) if t.kind == TokenKind::Iri && self.text(t).ends_with('>') => {
                self.bump();
                let text = self.text(t);
                let namespace = text[1..text.len() - 1].to_string();
                self.prologue.prefixes.push(PrefixDecl {
                    label,
                    namespace,
                    span: Span::new(kw.span.start, t.span.end),
                });
            }
            _ => self.error_here("expected namespace IRI"),
        }
    }

    fn base_decl(&mut self) {
        self.bump();
        self.expect(Role::Unknown, KeywordSet::None, ROOT, None, None);
        match self.peek() {
            Some(t) if t.kind == TokenKind::Iri && self.text(t).ends_with('>') => {
                self.bump();
                let text = self.text(t);
                self.prologue.base = Some(text[1..text.len() - 1].to_string());
            }
            _ => self.error_here("expected base IRI"),
        }
    }

    fn select_clause(&mut self) {
        loop {
            self.expect(Role::Keyword, KeywordSet::Projection, ROOT, None, None);
            let Some(tok) = self.peek() else { return };
            if self.at_kw("DISTINCT")
                || self.at_kw("REDUCED")
                || self.is_punct(tok, "*")
                || tok.kind == TokenKind::Variable
            {
                self.bump();
            } else if self.is_punct(tok, "(") {
                self.skip_balanced();
            } else if self.at_kw("FROM") {
                self.dataset_clause();
            } else if self.at_kw("WHERE") || self.is_punct(tok, "{") || self.at_any_kw() {
                return;
            } else {
                self.error_token("unexpected token in projection");
            }
        }
    }

    fn dataset_clauses(&mut self) {
        loop {
            self.expect(Role::Keyword, KeywordSet::Dataset, ROOT, None, None);
            if !self.at_kw("FROM") {
                return;
            }
            self.dataset_clause();
        }
    }

    fn dataset_clause(&mut self) {
        self.bump();
        self.expect(Role::Keyword, KeywordSet::Named, ROOT, None, None);
        if self.at_kw("NAMED") {
            self.bump();
            self.expect(Role::Unknown, KeywordSet::None, ROOT, None, None);
        }
        if self.at_kind(TokenKind::Iri) || self.at_kind(TokenKind::PrefixedName) {
            self.bump();
        } else {
            self.error_here("expected graph IRI");
        }
    }

    fn construct_query(&mut self) {
        self.expect(Role::Keyword, KeywordSet::Dataset, ROOT, None, None);
        if self.at_punct("{") {
            self.group(ROOT, ScopeKind::Template);
        }
        self.dataset_clauses();
        self.where_and_modifiers(true);
    }

    fn describe_query(&mut self) {
        loop {
            self.expect(Role::Keyword, KeywordSet::Dataset, ROOT, None, None);
            let Some(tok) = self.peek() else { return };
            if matches!(tok.kind, TokenKind::Variable | TokenKind::Iri | TokenKind::PrefixedName)
                || self.is_punct(tok, "*")
            {
                self.bump();
            } else {
                break;
            }
        }
        self.dataset_clauses();
        if self.at_kw("WHERE") || self.at_punct("{") {
            self.where_and_modifiers(true);
        } else {
            self.modifiers();
        }
    }

    fn where_and_modifiers(&mut self, required: bool) {
        self.expect(Role::Keyword, KeywordSet::Dataset, ROOT, None, None);
        if self.at_kw("WHERE") {
            self.bump();
            self.expect(Role::Unknown, KeywordSet::None, ROOT, None, None);
        }
        if self.at_punct("{") {
            self.group(ROOT, ScopeKind::Group);
        } else if required {
            self.error_here("expected '{' to open the WHERE clause");
        }
        self.modifiers();
    }

    fn modifiers(&mut self) {
        loop {
            self.expect(Role::Keyword, KeywordSet::Modifiers, ROOT, None, None);
            let Some(tok) = self.peek() else { return };
            if self.at_kw("VALUES") {
                self.values_block(ROOT);
            } else if self.at_kw("LIMIT") || self.at_kw("OFFSET") {
                let kw = self.bump();
                self.expect(Role::Unknown, KeywordSet::None, ROOT, None, None);
                if self.at_kind(TokenKind::Literal) {
                    self.bump();
                } else {
                    let message = format!("expected an integer after {}", self.text(kw).to_uppercase());
                    self.error_here(&message);
                }
            } else if self.is_punct(tok, "(") {
                self.skip_balanced();
            } else if matches!(
                tok.kind,
                TokenKind::Keyword
                    | TokenKind::Variable
                    | TokenKind::Literal
                    | TokenKind::Iri
                    | TokenKind::PrefixedName
            ) {
                self.bump();
            } else {
                self.error_token("unexpected token after WHERE clause");
            }
        }
    }

    // ---- group graph patterns ----

    /// Parses `{ ... }` starting at the opening brace.
    fn group(&mut self, parent: ScopeId, kind: ScopeKind) -> ScopeId {
        let open = self.bump();
        let id = self.new_scope(kind, parent, open.span);
        if let Some(select) = self.peek().filter(|_| self.at_kw("SELECT")) {
            // subquery: its own scope, nested so SERVICE membership is kept
            let sub = self.new_scope(ScopeKind::Opaque, id, Span::empty(select.span.start));
            self.skip_until_close(sub);
            let inner = &self.scopes[sub.0];
            if inner.closed {
                let close = Span::new(inner.inner.end, inner.span.end);
                self.close_scope(id, close);
            }
            return id;
        }
        self.group_body(id);
        id
    }

    fn group_body(&mut self, id: ScopeId) {
        loop {
            self.expect(Role::Subject, KeywordSet::Pattern, id, None, None);
            let Some(tok) = self.peek() else {
                self.error_here("unclosed group: expected '}'");
                return;
            };
            if self.is_punct(tok, "}") {
                let close = self.bump();
                self.close_scope(id, close.span);
                return;
            } else if self.is_punct(tok, "{") {
                self.group_or_union(id);
            } else if self.is_punct(tok, ".") {
                self.bump();
            } else if self.at_kw("OPTIONAL") {
                self.bump();
                self.nested_group(id, ScopeKind::Optional);
            } else if self.at_kw("MINUS") {
                self.bump();
                self.nested_group(id, ScopeKind::Minus);
            } else if self.at_kw("GRAPH") {
                self.bump();
                self.expect(Role::Unknown, KeywordSet::None, id, None, None);
                if matches!(tok_kind(self.peek()), Some(TokenKind::Variable | TokenKind::Iri | TokenKind::PrefixedName))
                {
                    self.bump();
                }
                self.nested_group(id, ScopeKind::Graph);
            } else if self.at_kw("SERVICE") {
                self.service(id);
            } else if self.at_kw("FILTER") {
                self.bump();
                self.filter(id);
            } else if self.at_kw("BIND") {
                self.bump();
                self.expect(Role::Unknown, KeywordSet::None, id, None, None);
                if self.at_punct("(") {
                    self.skip_balanced();
                } else {
                    self.error_here("expected '(' after BIND");
                }
            } else if self.at_kw("VALUES") {
                self.values_block(id);
            } else if self.is_term_start(tok) {
                self.triples(id);
            } else {
                self.error_token("unexpected token in group pattern");
            }
        }
    }

    fn nested_group(&mut self, parent: ScopeId, kind: ScopeKind) {
        self.expect(Role::Unknown, KeywordSet::None, parent, None, None);
        if self.at_punct("{") {
            self.group(parent, kind);
        } else {
            self.error_here("expected '{'");
        }
    }

    fn group_or_union(&mut self, parent: ScopeId) {
        self.group(parent, ScopeKind::Group);
        while self.at_kw("UNION") {
            self.bump();
            self.nested_group(parent, ScopeKind::Union);
        }
    }

    fn service(&mut self, parent: ScopeId) {
        let kw = self.bump();
        self.expect(Role::ServiceIri, KeywordSet::None, parent, None, None);
        let silent = self.at_kw("SILENT");
        if silent {
            self.bump();
            self.expect(Role::ServiceIri, KeywordSet::None, parent, None, None);
        }
        let endpoint = match self.peek() {
            Some(t) if matches!(t.kind, TokenKind::Variable | TokenKind::Iri | TokenKind::PrefixedName) => {
                self.bump();
                Some(self.term_node(t))
            }
            _ => {
                self.error_here("expected SERVICE endpoint");
                None
            }
        };
        self.expect(Role::Unknown, KeywordSet::None, parent, None, None);
        if !self.at_punct("{") {
            self.error_here("expected '{' after SERVICE endpoint");
            return;
        }
        let index = self.services.len();
        self.services.push(ServiceNode { endpoint, silent, scope: parent, span: kw.span });
        let id = self.group(parent, ScopeKind::Service);
        self.scopes[id.0].service = Some(index);
        let end = self.scopes[id.0].span.end;
        let node = &mut self.services[index];
        node.scope = id;
        node.span.end = end;
    }

    fn filter(&mut self, scope: ScopeId) {
        self.expect(Role::Unknown, KeywordSet::None, scope, None, None);
        let Some(tok) = self.peek() else {
            return self.error_here("expected filter constraint");
        };
        if self.is_punct(tok, "(") {
            self.skip_balanced();
        } else if self.at_kw("NOT") || self.at_kw("EXISTS") {
            if self.at_kw("NOT") {
                self.bump();
            }
            if self.at_kw("EXISTS") {
                self.bump();
            }
            self.opaque_block(scope);
        } else if matches!(tok.kind, TokenKind::Keyword | TokenKind::Iri | TokenKind::PrefixedName) {
            self.bump();
            if self.at_punct("(") {
                self.skip_balanced();
            }
        } else {
            self.error_here("expected filter constraint");
        }
    }

    fn values_block(&mut self, scope: ScopeId) {
        self.bump();
        self.expect(Role::Unknown, KeywordSet::None, scope, None, None);
        if self.at_kind(TokenKind::Variable) {
            self.bump();
        } else if self.at_punct("(") {
            self.skip_balanced();
        }
        self.expect(Role::Unknown, KeywordSet::None, scope, None, None);
        self.opaque_block(scope);
    }

    fn opaque_block(&mut self, scope: ScopeId) {
        if self.at_punct("{") {
            let open = self.bump();
            let id = self.new_scope(ScopeKind::Opaque, scope, open.span);
            self.skip_until_close(id);
        } else {
            self.error_here("expected '{'");
        }
    }

    /// Skips to the brace closing an already-opened scope.
    fn skip_until_close(&mut self, id: ScopeId) {
        let mut depth = 0usize;
        loop {
            let Some(tok) = self.peek() else {
                return self.error_here("unclosed block: expected '}'");
            };
            if self.is_punct(tok, "{") {
                depth += 1;
            } else if self.is_punct(tok, "}") {
                if depth == 0 {
                    let close = self.bump();
                    self.close_scope(id, close.span);
                    return;
                }
                depth -= 1;
            }
            self.bump();
        }
    }

    /// Skips a bracketed region starting at an opening `(`, `[` or `{`.
    /// Stops early at a `}` that would close an enclosing group.
    fn skip_balanced(&mut self) {
        let mut stack: Vec<char> = Vec::new();
        loop {
            let Some(tok) = self.peek() else {
                return self.error_here("unclosed bracket");
            };
            if tok.kind == TokenKind::Punctuation {
                match self.text(tok) {
                    "(" => stack.push(')'),
                    "[" => stack.push(']'),
                    "{" => stack.push('}'),
                    close @ (")" | "]" | "}") => {
                        let c = close.chars().next().expect("one char");
                        if c == '}' && !stack.contains(&'}') {
                            return self.error_here("unclosed bracket");
                        }
                        if let Some(at) = stack.iter().rposition(|&s| s == c) {
                            stack.truncate(at);
                        } else {
                            self.errors.push(ErrorNode { span: tok.span, message: "unbalanced bracket".into() });
                        }
                    }
                    _ => {}
                }
            }
            self.bump();
            if stack.is_empty() {
                return;
            }
        }
    }

    // ---- triples ----

    fn is_term_start(&self, tok: Token) -> bool {
        match tok.kind {
            TokenKind::Variable
            | TokenKind::Iri
            | TokenKind::PrefixedName
            | TokenKind::BlankNode
            | TokenKind::Literal => true,
            TokenKind::Punctuation => matches!(self.text(tok), "[" | "("),
            _ => false,
        }
    }

    fn triples(&mut self, scope: ScopeId) {
        let tok = self.peek().expect("term start");
        if self.is_punct(tok, "[") {
            let (subject, has_props) = self.blank_node_property_list(scope);
            self.property_list(scope, &subject, has_props);
        } else if self.is_punct(tok, "(") {
            let subject = self.collection();
            self.property_list(scope, &subject, false);
        } else if tok.kind == TokenKind::Literal {
            let subject = self.literal(scope);
            self.property_list(scope, &subject, false);
        } else {
            self.bump();
            let subject = self.term_node(tok);
            self.property_list(scope, &subject, false);
        }
    }

    /// Predicate-object list for `subject`. With `optional`, a missing first
    /// predicate is not reported as an incomplete triple.
    fn property_list(&mut self, scope: ScopeId, subject: &TermNode, optional: bool) {
        let mut first = true;
        loop {
            self.expect(Role::Predicate, KeywordSet::None, scope, Some(subject), None);
            let Some(verb) = self.verb() else {
                if first && !optional {
                    self.triples.push(TriplePattern {
                        subject: subject.clone(),
                        predicate: None,
                        object: None,
                        scope,
                        complete: false,
                    });
                    if !self.eof() {
                        self.error_here("expected predicate");
                    }
                }
                return;
            };
            first = false;
            loop {
                self.expect(Role::Object, KeywordSet::None, scope, Some(subject), Some(&verb));
                let Some(object) = self.object(scope) else {
                    self.triples.push(TriplePattern {
                        subject: subject.clone(),
                        predicate: Some(verb),
                        object: None,
                        scope,
                        complete: false,
                    });
                    if !self.eof() {
                        self.error_here("expected object");
                    }
                    return;
                };
                let index = self.triples.len();
                self.triples.push(TriplePattern {
                    subject: subject.clone(),
                    predicate: Some(verb.clone()),
                    object: Some(object),
                    scope,
                    complete: false,
                });
                self.expect(Role::Keyword, KeywordSet::Pattern, scope, None, None);
                let Some(next) = self.peek() else { return };
                if self.is_punct(next, ",") {
                    self.triples[index].complete = true;
                    self.bump();
                    continue;
                }
                if self.is_punct(next, ";") {
                    self.triples[index].complete = true;
                    while self.at_punct(";") {
                        self.bump();
                    }
                    break;
                }
                if self.is_punct(next, ".") {
                    // `ex:a.` or `1.` at the very end may still grow into
                    // `ex:a.b` or `1.5`
                    let glued_at_end = next.span.end == self.src.len() && next.span.start == self.last_end();
                    self.triples[index].complete = !glued_at_end;
                    return;
                }
                if self.is_punct(next, "}")
                    || self.is_punct(next, "]")
                    || self.is_punct(next, "{")
                    || next.kind == TokenKind::Keyword
                {
                    self.triples[index].complete = true;
                    return;
                }
                self.error_here("expected '.', ';', ',' or '}'");
                return;
            }
        }
    }

    fn verb(&mut self) -> Option<TermNode> {
        let tok = self.peek()?;
        match tok.kind {
            TokenKind::Variable => {
                self.bump();
                Some(self.term_node(tok))
            }
            TokenKind::TypeShorthand | TokenKind::Iri | TokenKind::PrefixedName => {
                if self.path_follows() {
                    Some(self.path())
                } else {
                    self.bump();
                    Some(self.term_node(tok))
                }
            }
            TokenKind::Punctuation if matches!(self.text(tok), "^" | "!" | "(") => Some(self.path()),
            _ => None,
        }
    }

    fn path_follows(&self) -> bool {
        let (Some(cur), Some(next)) = (self.peek(), self.peek_nth(1)) else { return false };
        if next.kind != TokenKind::Punctuation {
            return false;
        }
        match self.text(next) {
            "/" | "|" => true,
            "*" | "+" | "?" => next.span.start == cur.span.end,
            _ => false,
        }
    }

    fn path(&mut self) -> TermNode {
        let start = self.next_start();
        let mut depth = 0usize;
        while let Some(tok) = self.peek() {
            match tok.kind {
                TokenKind::Iri | TokenKind::PrefixedName | TokenKind::TypeShorthand => {}
                TokenKind::Punctuation => match self.text(tok) {
                    "/" | "|" | "^" | "!" | "*" | "+" | "?" => {}
                    "(" => depth += 1,
                    ")" if depth > 0 => depth -= 1,
                    _ => break,
                },
                _ => break,
            }
            self.bump();
        }
        let span = Span::new(start, self.last_end().max(start));
        TermNode { term: Term::Path(String::from_utf8_lossy(&self.src[span.start..span.end]).into_owned()), span }
    }

    fn object(&mut self, scope: ScopeId) -> Option<TermNode> {
        let tok = self.peek()?;
        match tok.kind {
            TokenKind::Variable | TokenKind::Iri | TokenKind::PrefixedName | TokenKind::BlankNode => {
                self.bump();
                Some(self.term_node(tok))
            }
            TokenKind::Literal => Some(self.literal(scope)),
            TokenKind::Punctuation => match self.text(tok) {
                "[" => Some(self.blank_node_property_list(scope).0),
                "(" => Some(self.collection()),
                "+" | "-" => {
                    let number = self.peek_nth(1).filter(|n| {
                        n.kind == TokenKind::Literal
                            && n.span.start == tok.span.end
                            && self.src[n.span.start].is_ascii_digit() | (self.src[n.span.start] == b'.')
                    })?;
                    self.bump();
                    self.bump();
                    let span = Span::new(tok.span.start, number.span.end);
                    Some(TermNode { term: Term::Literal(self.slice(span)), span })
                }
                _ => None,
            },
            _ => None,
        }
    }

    fn slice(&self, span: Span) -> String {
        String::from_utf8_lossy(&self.src[span.start..span.end]).into_owned()
    }

    fn literal(&mut self, scope: ScopeId) -> TermNode {
        let tok = self.bump();
        let mut span = tok.span;
        if self.at_punct("^^") {
            self.bump();
            span.end = self.last_end();
            self.expect(Role::Unknown, KeywordSet::None, scope, None, None);
            if self.at_kind(TokenKind::Iri) || self.at_kind(TokenKind::PrefixedName) {
                self.bump();
                span.end = self.last_end();
            }
        }
        TermNode { term: Term::Literal(self.slice(span)), span }
    }

    fn collection(&mut self) -> TermNode {
        let start = self.next_start();
        self.skip_balanced();
        let span = Span::new(start, self.last_end().max(start));
        TermNode { term: Term::Collection(self.slice(span)), span }
    }

    /// `[ ... ]`; returns the anonymous node and whether it had properties.
    fn blank_node_property_list(&mut self, scope: ScopeId) -> (TermNode, bool) {
        let open = self.bump();
        let term = Term::BlankNode(format!("anon{}", open.span.start));
        if self.at_punct("]") {
            let close = self.bump();
            return (TermNode { term, span: open.span.cover(close.span) }, false);
        }
        let inner = TermNode { term: term.clone(), span: open.span };
        self.property_list(scope, &inner, true);
        if self.at_punct("]") {
            let close = self.bump();
            (TermNode { term, span: open.span.cover(close.span) }, true)
        } else {
            self.error_here("expected ']'");
            let end = self.last_end().max(open.span.end);
            (TermNode { term, span: Span::new(open.span.start, end) }, true)
        }
    }
}

fn tok_kind(tok: Option<Token>) -> Option<TokenKind> {
    tok.map(|t| t.kind)
}
