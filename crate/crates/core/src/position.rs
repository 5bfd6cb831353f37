//! Line/column positions as editors report them.

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum LineColumnError {
    #[error("line and column are 1-based")]
    Zero,
    #[error("line {line} is past the end of the text ({lines} lines)")]
    LineOutOfRange { line: u32, lines: usize },
    #[error("column {column} is past the end of line {line}")]
    ColumnOutOfRange { line: u32, column: u32 },
}

/// Byte offset of a 1-based line and 1-based column counted in Unicode
/// scalar values. The column just past the last character is valid.
pub fn offset_of(text: &str, line: u32, column: u32) -> Result<usize, LineColumnError> {
    if line == 0 || column == 0 {
        return Err(LineColumnError::Zero);
    }
    let mut line_start = 0;
    for _ in 1..line {
        match text[line_start..].find('\n') {
            Some(i) => line_start += i + 1,
            None => return Err(LineColumnError::LineOutOfRange { line, lines: text.split('\n').count() }),
        }
    }
    let line_text = text[line_start..].split('\n').next().unwrap_or("");
    let wanted = (column - 1) as usize;
    match line_text.char_indices().map(|(i, _)| i).chain([line_text.len()]).nth(wanted) {
        Some(i) => Ok(line_start + i),
        None => Err(LineColumnError::ColumnOutOfRange { line, column }),
    }
}
