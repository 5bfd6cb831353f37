//! Response bodies, shared with the CLI so both print the same bytes.

use serde::Serialize;
use sparql_assist_core::completion::CompletionList;
use sparql_assist_core::metadata::{MetadataStatus, QueryExample};
use sparql_assist_core::schema_graph::{export, ExportFormat, SchemaGraph};
use sparql_assist_core::syntax::PrefixMap;

fn json_line<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = serde_json::to_string(value).expect("response serializes");
    out.push('\n');
    out
}

pub fn completion(list: &CompletionList) -> String {
    json_line(list)
}

pub fn examples(list: &[QueryExample]) -> String {
    json_line(list)
}

pub fn status(status: &MetadataStatus) -> String {
    json_line(status)
}

pub fn schema(graph: &SchemaGraph, format: ExportFormat, prefixes: &PrefixMap) -> String {
    let mut out = export(graph, format, prefixes);
    if !out.ends_with('\n') {
        out.push('\n');
    }
    out
}

pub fn schema_content_type(format: ExportFormat) -> &'static str {
    match format {
        ExportFormat::Json => "application/json",
        ExportFormat::Dot => "text/vnd.graphviz; charset=utf-8",
        ExportFormat::Mermaid => "text/plain; charset=utf-8",
    }
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    error: ErrorDetail<'a>,
}

#[derive(Serialize)]
struct ErrorDetail<'a> {
    code: &'a str,
    message: &'a str,
}

pub fn error(code: &str, message: &str) -> String {
    json_line(&ErrorBody { error: ErrorDetail { code, message } })
}
