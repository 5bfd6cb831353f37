//! Tokenizer, error-tolerant parser and cursor analysis for SPARQL queries.

mod context;
mod parser;
mod prefixes;
mod token;
mod tree;

pub use context::{collect_prefixes, enclosing_service, locate_context, CursorContext, PositionError, ServiceEndpoint};
pub use parser::parse_partial;
pub use prefixes::PrefixMap;
pub use token::{is_keyword, tokenize, Span, Token, TokenKind};
pub use tree::{
    ErrorNode, KeywordSet, PrefixDecl, Prologue, QueryForm, Role, Scope, ScopeId, ScopeKind, ServiceNode, SyntaxTree,
    Term, TermNode, TriplePattern, RDF_TYPE,
};
