//! Lossless Java lexer.
//!
//! Concatenating the `text` of every token reproduces the input byte for
//! byte: whitespace, line breaks, and comments are tokens too. The lexer is
//! deliberately shallow — it never builds a syntax tree — because every
//! rewrite downstream is a token-stream splice.
//!
//! Statements are approximated as token runs ending at `;`, `{`, `}`, or a
//! line break, which is exactly the granularity the literal picker and the
//! statement counter need.

use crate::{Error, Result};

/// Spelling class of a numeric literal. Only plain decimal literals are
/// rewriting candidates; every other form is reported and left alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NumberForm {
    Decimal,
    Hex,
    Octal,
    Binary,
    Underscored,
    Long,
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Ident,
    Number(NumberForm),
    Str,
    Char,
    Comment,
    Operator,
    Punct,
    Whitespace,
    Eol,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    /// 1-based line of the token's first character.
    pub line: u32,
    /// 1-based column (in characters) of the token's first character.
    pub col: u32,
}

impl Token {
    pub fn is_ws(&self) -> bool {
        matches!(self.kind, TokenKind::Whitespace | TokenKind::Eol)
    }

    /// Token text counts as statement content (not pure punctuation/layout).
    pub fn is_content(&self) -> bool {
        matches!(
            self.kind,
            TokenKind::Ident | TokenKind::Number(_) | TokenKind::Str | TokenKind::Char | TokenKind::Operator
        )
    }
}

const TWO_CHAR_OPS: [&str; 19] = [
    "==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=", "-=", "*=", "/=", "%=", "&=", "|=",
    "^=", "<<", ">>", "->",
];
const THREE_CHAR_OPS: [&str; 4] = [">>>", "<<=", ">>=", "::="];
const FOUR_CHAR_OPS: [&str; 1] = [">>>="];

/// Tokenizes `src`. `path` is only used to label errors.
pub fn lex(src: &str, path: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0usize;
    let mut line = 1u32;
    let mut col = 1u32;

    let err = |line: u32, col: u32, msg: &str| Error::Lex {
        path: path.to_string(),
        line,
        col,
        msg: msg.to_string(),
    };

    while i < chars.len() {
        let start = i;
        let (tok_line, tok_col) = (line, col);
        let c = chars[i];

        let kind = if c == '\r' || c == '\n' {
            if c == '\r' && chars.get(i + 1) == Some(&'\n') {
                i += 2;
            } else {
                i += 1;
            }
            line += 1;
            col = 1;
            tokens.push(Token {
                kind: TokenKind::Eol,
                text: chars[start..i].iter().collect(),
                line: tok_line,
                col: tok_col,
            });
            continue;
        } else if c == ' ' || c == '\t' || c == '\u{0C}' {
            while i < chars.len() && matches!(chars[i], ' ' | '\t' | '\u{0C}') {
                i += 1;
            }
            TokenKind::Whitespace
        } else if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' && chars[i] != '\r' {
                i += 1;
            }
            TokenKind::Comment
        } else if c == '/' && chars.get(i + 1) == Some(&'*') {
            i += 2;
            let mut closed = false;
            while i < chars.len() {
                if chars[i] == '*' && chars.get(i + 1) == Some(&'/') {
                    i += 2;
                    closed = true;
                    break;
                }
                // count each line break once; \r\n counts at the \n
                if chars[i] == '\n' || (chars[i] == '\r' && chars.get(i + 1) != Some(&'\n')) {
                    line += 1;
                }
                i += 1;
            }
            if !closed {
                return Err(err(tok_line, tok_col, "unterminated block comment"));
            }
            TokenKind::Comment
        } else if c == '"' {
            i += 1;
            loop {
                match chars.get(i) {
                    None => return Err(err(tok_line, tok_col, "unterminated string literal")),
                    Some('\n') | Some('\r') => {
                        return Err(err(tok_line, tok_col, "unterminated string literal"))
                    }
                    Some('\\') => i += 2,
                    Some('"') => {
                        i += 1;
                        break;
                    }
                    Some(_) => i += 1,
                }
            }
            TokenKind::Str
        } else if c == '\'' {
            i += 1;
            loop {
                match chars.get(i) {
                    None => return Err(err(tok_line, tok_col, "unterminated character literal")),
                    Some('\n') | Some('\r') => {
                        return Err(err(tok_line, tok_col, "unterminated character literal"))
                    }
                    Some('\\') => i += 2,
                    Some('\'') => {
                        i += 1;
                        break;
                    }
                    Some(_) => i += 1,
                }
            }
            TokenKind::Char
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let form = scan_number(&chars, &mut i);
            tokens.push(Token {
                kind: TokenKind::Number(form),
                text: chars[start..i].iter().collect(),
                line: tok_line,
                col: tok_col,
            });
            col += (i - start) as u32;
            continue;
        } else if c.is_alphabetic() || c == '_' || c == '$' {
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '$') {
                i += 1;
            }
            TokenKind::Ident
        } else if matches!(c, '(' | ')' | '{' | '}' | '[' | ']' | ';' | ',' | '.' | '@') {
            i += 1;
            TokenKind::Punct
        } else {
            let rest: String = chars[i..chars.len().min(i + 4)].iter().collect();
            let op_len = FOUR_CHAR_OPS
                .iter()
                .find(|op| rest.starts_with(**op))
                .map(|op| op.len())
                .or_else(|| THREE_CHAR_OPS.iter().find(|op| rest.starts_with(**op)).map(|op| op.len()))
                .or_else(|| TWO_CHAR_OPS.iter().find(|op| rest.starts_with(**op)).map(|op| op.len()))
                .unwrap_or(1);
            i += op_len;
            if matches!(c, '+' | '-' | '*' | '/' | '%' | '=' | '<' | '>' | '!' | '&' | '|' | '^' | '~' | '?' | ':') {
                TokenKind::Operator
            } else {
                // Unknown character: emit as punctuation so lexing stays lossless.
                TokenKind::Punct
            }
        };

        let text: String = chars[start..i].iter().collect();
        // Multi-line block comments already bumped `line`; recompute col from
        // the trailing segment, otherwise advance by the token's char count.
        if let Some(last_nl) = text.rfind(['\n', '\r']) {
            col = (text[last_nl..].chars().count()) as u32;
        } else {
            col += text.chars().count() as u32;
        }
        tokens.push(Token { kind, text, line: tok_line, col: tok_col });
    }

    Ok(tokens)
}

/// Consumes one numeric literal starting at `chars[*i]` and returns its form.
fn scan_number(chars: &[char], i: &mut usize) -> NumberForm {
    let start = *i;
    let two: String = chars[*i..chars.len().min(*i + 2)].iter().collect();
    if two.eq_ignore_ascii_case("0x") {
        *i += 2;
        while chars.get(*i).is_some_and(|c| c.is_ascii_hexdigit() || *c == '_') {
            *i += 1;
        }
        if chars.get(*i).is_some_and(|c| matches!(c, 'l' | 'L')) {
            *i += 1;
        }
        return NumberForm::Hex;
    }
    if two.eq_ignore_ascii_case("0b") {
        *i += 2;
        while chars.get(*i).is_some_and(|c| matches!(c, '0' | '1' | '_')) {
            *i += 1;
        }
        if chars.get(*i).is_some_and(|c| matches!(c, 'l' | 'L')) {
            *i += 1;
        }
        return NumberForm::Binary;
    }

    let mut is_float = false;
    while chars.get(*i).is_some_and(|c| c.is_ascii_digit() || *c == '_') {
        *i += 1;
    }
    // "1.", "1.5", ".5" are all floating-point spellings
    if chars.get(*i) == Some(&'.')
        && (*i > start || chars.get(*i + 1).is_some_and(|c| c.is_ascii_digit()))
    {
        is_float = true;
        *i += 1;
        while chars.get(*i).is_some_and(|c| c.is_ascii_digit() || *c == '_') {
            *i += 1;
        }
    }
    if chars.get(*i).is_some_and(|c| matches!(c, 'e' | 'E')) {
        let mut j = *i + 1;
        if chars.get(j).is_some_and(|c| matches!(c, '+' | '-')) {
            j += 1;
        }
        if chars.get(j).is_some_and(|c| c.is_ascii_digit()) {
            is_float = true;
            *i = j;
            while chars.get(*i).is_some_and(|c| c.is_ascii_digit() || *c == '_') {
                *i += 1;
            }
        }
    }
    match chars.get(*i) {
        Some('f') | Some('F') | Some('d') | Some('D') => {
            *i += 1;
            return NumberForm::Float;
        }
        Some('l') | Some('L') => {
            *i += 1;
            return NumberForm::Long;
        }
        _ => {}
    }
    if is_float {
        return NumberForm::Float;
    }
    let text: String = chars[start..*i].iter().collect();
    if text.contains('_') {
        NumberForm::Underscored
    } else if text.len() > 1 && text.starts_with('0') {
        NumberForm::Octal
    } else {
        NumberForm::Decimal
    }
}

/// Inverse of [`lex`]: exact source reconstruction.
pub fn detokenize(tokens: &[Token]) -> String {
    tokens.iter().map(|t| t.text.as_str()).collect()
}

/// Index of the next non-whitespace, non-comment token at or after `i`.
pub fn next_code(tokens: &[Token], mut i: usize) -> Option<usize> {
    while i < tokens.len() {
        if !tokens[i].is_ws() && tokens[i].kind != TokenKind::Comment {
            return Some(i);
        }
        i += 1;
    }
    None
}

/// Index of the previous non-whitespace, non-comment token strictly before `i`.
pub fn prev_code(tokens: &[Token], i: usize) -> Option<usize> {
    (0..i).rev().find(|&j| !tokens[j].is_ws() && tokens[j].kind != TokenKind::Comment)
}

/// Splits the token stream into statement spans. A span ends just after a
/// `;`, `{`, or `}` token or after a line break; every token belongs to
/// exactly one span.
pub fn statement_spans(tokens: &[Token]) -> Vec<std::ops::Range<usize>> {
    let mut spans = Vec::new();
    let mut start = 0usize;
    for (i, tok) in tokens.iter().enumerate() {
        let boundary = matches!(tok.text.as_str(), ";" | "{" | "}") && tok.kind == TokenKind::Punct
            || tok.kind == TokenKind::Eol;
        if boundary {
            spans.push(start..i + 1);
            start = i + 1;
        }
    }
    if start < tokens.len() {
        spans.push(start..tokens.len());
    }
    spans
}

/// True when the span holds real code rather than bare punctuation/layout.
pub fn span_has_content(tokens: &[Token], span: &std::ops::Range<usize>) -> bool {
    tokens[span.clone()].iter().any(|t| t.is_content())
}
