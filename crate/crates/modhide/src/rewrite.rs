//! Token-stream rewriting: statement normalization, rewrite-site discovery,
//! the obfuscation pass itself, runtime emission, and verification of
//! rewritten files against their originals.
//!
//! A pass over fresh source picks at most one integer literal per statement
//! and splices in a hidden expression of equal value. A pass over already
//! rewritten source instead locates every `F(...)` call and nests a new
//! hiding inside its argument. Either way the surrounding token stream is
//! untouched apart from the class name, an added `extends obfuscate`, and
//! the spliced expressions.

use rand::rngs::StdRng;
use rand::Rng;
use serde::Serialize;

use crate::expr::{self, HiddenExpr, LiftStyle, NestDepths};
use crate::lexer::{self, NumberForm, Token, TokenKind};
use crate::moduli::{ChainMode, ModulusChain};
use crate::seed;
use crate::{Error, Result};

/// Token immediately before a literal that makes it a rewrite candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Trigger {
    Bracket,
    Assign,
    Paren,
    Plus,
    Slash,
    Star,
    Minus,
    Space,
    Less,
    Greater,
    Percent,
}

impl Trigger {
    /// Classifies by the final character of the preceding token, so compound
    /// operators such as `==` or `<=` trigger through their last character.
    fn from_last_char(c: char) -> Option<Trigger> {
        Some(match c {
            '[' => Trigger::Bracket,
            '=' => Trigger::Assign,
            '(' => Trigger::Paren,
            '+' => Trigger::Plus,
            '/' => Trigger::Slash,
            '*' => Trigger::Star,
            '-' => Trigger::Minus,
            '<' => Trigger::Less,
            '>' => Trigger::Greater,
            '%' => Trigger::Percent,
            _ => return None,
        })
    }
}

/// Why a trigger-bearing literal was left alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExcludedReason {
    /// Case label, which Java requires to be a compile-time constant.
    CompileTimeConstantContext,
    AnnotationArgument,
    ArrayDimensionInitializer,
    StaticFinalInitializer,
    /// Literal directly preceded by a unary minus.
    NegativeLiteral,
    /// Hex, octal, binary, underscored, long, or floating-point spelling.
    NonDecimalForm,
    /// Decimal value above `i32::MAX`.
    ValueOutOfRange,
}

/// One literal the site scanner looked at.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstSite {
    pub statement_index: usize,
    pub token_index: usize,
    /// Parsed value; kept 64-bit so out-of-range literals can be reported.
    pub value: i64,
    pub line: u32,
    pub col: u32,
    pub trigger: Trigger,
    pub excluded: Option<ExcludedReason>,
}

/// Audit record for one rewrite performed by a pass.
#[derive(Debug, Clone, Serialize)]
pub struct SiteRewrite {
    pub statement_index: usize,
    pub line: u32,
    pub col: u32,
    pub original_value: i64,
    /// Reduction depth of the hiding (splice) or of the host call (nesting).
    pub depth: u32,
    pub trigger: Option<Trigger>,
    pub expression: String,
    pub oracle_value: i64,
    pub oracle_pass: bool,
}

/// Result of one obfuscation pass over one file.
#[derive(Debug, Clone)]
pub struct PassOutcome {
    pub text: String,
    pub sites: Vec<SiteRewrite>,
    pub excluded: Vec<ConstSite>,
    pub class_rename: Option<(String, String)>,
    /// True when the pass nested into existing calls rather than splicing.
    pub nested: bool,
    pub warnings: Vec<String>,
}

/// Knobs for a single pass; the pipeline derives one per iteration.
#[derive(Debug, Clone)]
pub struct PassConfig<'a> {
    pub chain: &'a ModulusChain,
    pub style: LiftStyle,
    pub depth_min: u32,
    pub depth_max: u32,
    /// Explicit depth per rewrite event (cycled); overrides random choice.
    pub schedule: Option<&'a [u32]>,
    pub all_constants: bool,
    /// Appended to the class name by this pass.
    pub suffix: &'a str,
    pub pass_seed: u64,
}

impl PassConfig<'_> {
    fn depth_for(&self, ordinal: u64, rng: &mut StdRng) -> u32 {
        match self.schedule {
            Some(s) if !s.is_empty() => s[(ordinal as usize) % s.len()],
            _ => rng.gen_range(self.depth_min..=self.depth_max),
        }
    }
}

// ---------------------------------------------------------------------------
// normalization

/// Ensures every `;` is followed by a line break, so each statement (and each
/// `for`-header clause) sits on its own line. Only line breaks are inserted;
/// existing tokens, comments, and string contents are byte-identical. Returns
/// the new text and whether anything changed. Idempotent.
pub fn normalize(src: &str, path: &str) -> Result<(String, bool)> {
    let tokens = lexer::lex(src, path)?;
    let mut out = String::with_capacity(src.len() + 16);
    let mut changed = false;
    for (i, tok) in tokens.iter().enumerate() {
        out.push_str(&tok.text);
        if tok.kind == TokenKind::Punct && tok.text == ";" {
            // insert a break unless the rest of the line is blank
            let mut j = i + 1;
            while tokens.get(j).is_some_and(|t| t.kind == TokenKind::Whitespace) {
                j += 1;
            }
            if tokens.get(j).is_some_and(|t| t.kind != TokenKind::Eol) {
                out.push('\n');
                changed = true;
            }
        }
    }
    Ok((out, changed))
}

// ---------------------------------------------------------------------------
// site discovery

/// Scans for integer literals worth rewriting: per statement, the first
/// decimal literal whose preceding token (or whitespace) is a trigger and
/// which sits in no excluded context. Excluded trigger-bearing literals are
/// returned too, tagged with their reason. With `all_constants`, every
/// eligible literal in a statement is selected instead of only the first.
pub fn find_sites(tokens: &[Token], all_constants: bool) -> Vec<ConstSite> {
    let mut sites = Vec::new();
    for (stmt_index, span) in lexer::statement_spans(tokens).iter().enumerate() {
        let mut chosen = false;
        let first_content = tokens[span.clone()].iter().position(|t| t.is_content());
        let is_case = first_content
            .map(|off| tokens[span.start + off].kind == TokenKind::Ident && tokens[span.start + off].text == "case")
            .unwrap_or(false);
        let first_colon = tokens[span.clone()]
            .iter()
            .position(|t| t.kind == TokenKind::Operator && t.text == ":")
            .map(|off| span.start + off);
        let annotation_ranges = annotation_arg_ranges(tokens, span);
        let static_final_at = static_final_position(tokens, span);

        for i in span.clone() {
            let form = match tokens[i].kind {
                TokenKind::Number(f) => f,
                _ => continue,
            };
            let Some(trigger) = trigger_before(tokens, i) else { continue };
            let mut site = ConstSite {
                statement_index: stmt_index,
                token_index: i,
                value: 0,
                line: tokens[i].line,
                col: tokens[i].col,
                trigger,
                excluded: None,
            };
            if form != NumberForm::Decimal {
                site.excluded = Some(ExcludedReason::NonDecimalForm);
                sites.push(site);
                continue;
            }
            let value: i64 = match tokens[i].text.parse() {
                Ok(v) => v,
                Err(_) => i64::MAX, // longer than any int; handled below
            };
            site.value = value;
            if trigger == Trigger::Minus && is_unary_minus(tokens, i) {
                site.excluded = Some(ExcludedReason::NegativeLiteral);
            } else if value > i32::MAX as i64 {
                site.excluded = Some(ExcludedReason::ValueOutOfRange);
            } else if is_case && first_colon.map_or(true, |c| i < c) {
                site.excluded = Some(ExcludedReason::CompileTimeConstantContext);
            } else if annotation_ranges.iter().any(|r| r.contains(&i)) {
                site.excluded = Some(ExcludedReason::AnnotationArgument);
            } else if static_final_at.is_some_and(|p| p < i) {
                site.excluded = Some(ExcludedReason::StaticFinalInitializer);
            } else if in_bracket_dimension_with_initializer(tokens, span, i) {
                site.excluded = Some(ExcludedReason::ArrayDimensionInitializer);
            }
            if site.excluded.is_some() {
                sites.push(site);
            } else if !chosen || all_constants {
                chosen = true;
                sites.push(site);
            }
        }
    }
    sites
}

/// Trigger for the literal at `i`: inter-token whitespace (or a comment)
/// counts as the space trigger; otherwise the last character of the
/// directly preceding token decides.
fn trigger_before(tokens: &[Token], i: usize) -> Option<Trigger> {
    if i == 0 {
        return None;
    }
    let prev = &tokens[i - 1];
    if prev.is_ws() || prev.kind == TokenKind::Comment {
        return Some(Trigger::Space);
    }
    prev.text.chars().last().and_then(Trigger::from_last_char)
}

/// A `-` directly before a literal is unary unless what precedes it can end
/// an expression (identifier, literal, `)`, or `]`).
fn is_unary_minus(tokens: &[Token], lit_index: usize) -> bool {
    let minus = lit_index - 1; // caller ensured the direct neighbor is `-`
    match lexer::prev_code(tokens, minus) {
        Some(j) => {
            let t = &tokens[j];
            !(t.is_content() && t.kind != TokenKind::Operator || t.text == ")" || t.text == "]")
        }
        None => true,
    }
}

/// Token index ranges of annotation argument lists within the span:
/// `@Name(...)` or `@a.b.Name(...)`.
fn annotation_arg_ranges(tokens: &[Token], span: &std::ops::Range<usize>) -> Vec<std::ops::Range<usize>> {
    let mut ranges = Vec::new();
    let mut i = span.start;
    while i < span.end {
        if tokens[i].kind == TokenKind::Punct && tokens[i].text == "@" {
            // consume the dotted name
            let mut j = i + 1;
            let mut saw_name = false;
            loop {
                match lexer::next_code(tokens, j) {
                    Some(n) if tokens[n].kind == TokenKind::Ident => {
                        saw_name = true;
                        j = n + 1;
                        match lexer::next_code(tokens, j) {
                            Some(d) if tokens[d].text == "." => j = d + 1,
                            _ => break,
                        }
                    }
                    _ => break,
                }
            }
            if saw_name {
                if let Some(open) = lexer::next_code(tokens, j) {
                    if tokens[open].text == "(" {
                        let mut depth = 0i32;
                        let mut k = open;
                        while k < span.end {
                            match tokens[k].text.as_str() {
                                "(" => depth += 1,
                                ")" => {
                                    depth -= 1;
                                    if depth == 0 {
                                        break;
                                    }
                                }
                                _ => {}
                            }
                            k += 1;
                        }
                        ranges.push(open..k.min(span.end));
                        i = k;
                    }
                }
            }
        }
        i += 1;
    }
    ranges
}

/// Position of the later of `static`/`final` when both appear in the span.
fn static_final_position(tokens: &[Token], span: &std::ops::Range<usize>) -> Option<usize> {
    let find = |word: &str| {
        tokens[span.clone()]
            .iter()
            .position(|t| t.kind == TokenKind::Ident && t.text == word)
            .map(|off| span.start + off)
    };
    match (find("static"), find("final")) {
        (Some(s), Some(f)) => Some(s.max(f)),
        _ => None,
    }
}

/// C-style guard: a literal between `[` and `]` in a declaration that also
/// carries a brace initializer (`= ... {`) is left alone. Valid Java never
/// combines the two, but the scanner must not corrupt such input.
fn in_bracket_dimension_with_initializer(
    tokens: &[Token],
    span: &std::ops::Range<usize>,
    lit: usize,
) -> bool {
    let mut depth = 0i32;
    for i in span.start..lit {
        match tokens[i].text.as_str() {
            "[" => depth += 1,
            "]" => depth -= 1,
            _ => {}
        }
    }
    if depth <= 0 {
        return false;
    }
    let mut saw_assign = false;
    for t in &tokens[lit..span.end] {
        if t.kind == TokenKind::Operator && t.text == "=" {
            saw_assign = true;
        }
        if saw_assign && t.text == "{" {
            return true;
        }
    }
    false
}

// ---------------------------------------------------------------------------
// class declarations

#[derive(Debug, Clone)]
pub struct ClassDecl {
    pub name_index: usize,
    pub name: String,
    pub extends: Option<String>,
}

/// First top-level `class <Name>` in the stream.
pub fn class_decl(tokens: &[Token]) -> Option<ClassDecl> {
    let mut brace_depth = 0i32;
    for (i, tok) in tokens.iter().enumerate() {
        match tok.text.as_str() {
            "{" => brace_depth += 1,
            "}" => brace_depth -= 1,
            "class" if tok.kind == TokenKind::Ident && brace_depth == 0 => {
                let name_index = lexer::next_code(tokens, i + 1)?;
                if tokens[name_index].kind != TokenKind::Ident {
                    continue;
                }
                let name = tokens[name_index].text.clone();
                let extends = lexer::next_code(tokens, name_index + 1)
                    .filter(|&j| tokens[j].kind == TokenKind::Ident && tokens[j].text == "extends")
                    .and_then(|j| lexer::next_code(tokens, j + 1))
                    .map(|j| tokens[j].text.clone());
                return Some(ClassDecl { name_index, name, extends });
            }
            _ => {}
        }
    }
    None
}

// ---------------------------------------------------------------------------
// the obfuscation pass

/// Runs one pass. Fresh source (no `F(` calls present) gets literal splices;
/// previously rewritten source gets one nesting level added inside every
/// `F` argument. The class name gains `cfg.suffix` and `extends obfuscate`
/// is attached if missing.
pub fn obfuscate_pass(src: &str, path: &str, cfg: &PassConfig) -> Result<PassOutcome> {
    let mut tokens = lexer::lex(src, path)?;
    let f_spans = f_call_spans(&tokens);
    let nested = !f_spans.is_empty();

    let mut sites = Vec::new();
    let mut excluded = Vec::new();
    let mut warnings = Vec::new();
    // token-range edits, non-overlapping, in stream order
    let mut edits: Vec<(std::ops::Range<usize>, String)> = Vec::new();
    let mut ordinal = 0u64;

    if nested {
        let stmt_of = statement_index_lookup(&tokens);
        for span in &f_spans {
            let text = lexer::detokenize(&tokens[span.clone()]);
            let at = &tokens[span.start];
            let tree = expr::parse(&text).map_err(|e| match e {
                Error::Parse { msg, .. } => Error::Parse {
                    path: path.to_string(),
                    line: at.line,
                    col: at.col,
                    msg,
                },
                other => other,
            })?;
            let before = expr::eval(cfg.chain, &tree).map_err(|_| Error::Structural {
                path: path.to_string(),
                msg: format!("{}:{}: existing call does not evaluate", at.line, at.col),
            })?;
            let mut supply = || {
                let mut rng = seed::site_rng(cfg.pass_seed, ordinal);
                let two = cfg.depth_for(ordinal, &mut rng);
                let one = if cfg.style == LiftStyle::Unit && cfg.chain.mode() == ChainMode::Doubled {
                    2 // fixed parity term; depth unused
                } else {
                    rng.gen_range(cfg.depth_min..=cfg.depth_max)
                };
                ordinal += 1;
                (NestDepths { two, one }, rng)
            };
            let (deepened, n) = expr::deepen(cfg.chain, &tree, cfg.style, &mut supply)?;
            if n == 0 {
                warnings.push(format!("{}:{}:{}: call with no literal to nest", path, at.line, at.col));
            }
            let after = expr::eval(cfg.chain, &deepened)?;
            let rendered = expr::render(&deepened);
            let depth = match &tree {
                HiddenExpr::FCall { depth, .. } => *depth,
                _ => 0,
            };
            sites.push(SiteRewrite {
                statement_index: stmt_of(span.start),
                line: at.line,
                col: at.col,
                original_value: before as i64,
                depth,
                trigger: None,
                expression: rendered.clone(),
                oracle_value: after as i64,
                oracle_pass: after == before,
            });
            if after != before {
                return Err(Error::Verify {
                    path: path.to_string(),
                    line: at.line,
                    col: at.col,
                    expected: before as i64,
                    actual: after as i64,
                });
            }
            edits.push((span.clone(), rendered));
        }
    } else {
        for site in find_sites(&tokens, cfg.all_constants) {
            if site.excluded.is_some() {
                excluded.push(site);
                continue;
            }
            let mut rng = seed::site_rng(cfg.pass_seed, ordinal);
            let depth = cfg.depth_for(ordinal, &mut rng);
            ordinal += 1;
            let tree = expr::hide_constant(cfg.chain, site.value as i32, depth, cfg.style, &mut rng)?;
            let value = expr::eval(cfg.chain, &tree)?;
            let rendered = expr::render(&tree);
            sites.push(SiteRewrite {
                statement_index: site.statement_index,
                line: site.line,
                col: site.col,
                original_value: site.value,
                depth,
                trigger: Some(site.trigger),
                expression: rendered.clone(),
                oracle_value: value as i64,
                oracle_pass: value as i64 == site.value,
            });
            if value as i64 != site.value {
                return Err(Error::Verify {
                    path: path.to_string(),
                    line: site.line,
                    col: site.col,
                    expected: site.value,
                    actual: value as i64,
                });
            }
            edits.push((site.token_index..site.token_index + 1, rendered));
        }
        if sites.is_empty() {
            warnings.push(format!("{path}: no rewrite sites found"));
        }
    }

    // class rename + runtime superclass
    let mut class_rename = None;
    if let Some(decl) = class_decl(&tokens) {
        if !cfg.suffix.is_empty() {
            let new_name = format!("{}{}", decl.name, cfg.suffix);
            rename_ident(&mut tokens, &decl.name, &new_name);
            class_rename = Some((decl.name.clone(), new_name));
        }
        match decl.extends.as_deref() {
            Some("obfuscate") => {}
            Some(other) => {
                return Err(Error::ExtendsConflict {
                    path: path.to_string(),
                    class: decl.name,
                    existing: other.to_string(),
                })
            }
            None => edits.push((decl.name_index + 1..decl.name_index + 1, " extends obfuscate".to_string())),
        }
    }

    edits.sort_by_key(|(r, _)| r.start);
    let text = apply_edits(&tokens, &edits);
    Ok(PassOutcome { text, sites, excluded, class_rename, nested, warnings })
}

/// Appends `suffix` to the declared class name, touching every occurrence
/// of the identifier. Source without a class declaration passes through.
pub fn append_class_suffix(src: &str, path: &str, suffix: &str) -> Result<(String, Option<(String, String)>)> {
    let mut tokens = lexer::lex(src, path)?;
    match class_decl(&tokens) {
        Some(decl) if !suffix.is_empty() => {
            let new_name = format!("{}{}", decl.name, suffix);
            rename_ident(&mut tokens, &decl.name, &new_name);
            Ok((lexer::detokenize(&tokens), Some((decl.name, new_name))))
        }
        _ => Ok((src.to_string(), None)),
    }
}

/// Replaces every identifier spelled `old` (class self-references included).
fn rename_ident(tokens: &mut [Token], old: &str, new: &str) {
    for tok in tokens.iter_mut() {
        if tok.kind == TokenKind::Ident && tok.text == old {
            tok.text = new.to_string();
        }
    }
}

/// Maximal `F(...)` call spans (token index ranges), outermost only.
pub fn f_call_spans(tokens: &[Token]) -> Vec<std::ops::Range<usize>> {
    let mut spans = Vec::new();
    let mut i = 0usize;
    while i < tokens.len() {
        if tokens[i].kind == TokenKind::Ident && tokens[i].text == "F" {
            if let Some(open) = lexer::next_code(tokens, i + 1) {
                if tokens[open].text == "(" {
                    let mut depth = 0i32;
                    let mut j = open;
                    let mut end = None;
                    while j < tokens.len() {
                        match tokens[j].text.as_str() {
                            "(" => depth += 1,
                            ")" => {
                                depth -= 1;
                                if depth == 0 {
                                    end = Some(j);
                                    break;
                                }
                            }
                            _ => {}
                        }
                        j += 1;
                    }
                    if let Some(end) = end {
                        spans.push(i..end + 1);
                        i = end + 1;
                        continue;
                    }
                }
            }
        }
        i += 1;
    }
    spans
}

/// Maps a token index to its statement ordinal.
fn statement_index_lookup(tokens: &[Token]) -> impl Fn(usize) -> usize {
    let spans = lexer::statement_spans(tokens);
    move |tok_index| {
        spans
            .iter()
            .position(|s| s.contains(&tok_index))
            .unwrap_or(0)
    }
}

/// Splices replacement text over token ranges (sorted, non-overlapping).
/// An empty range is a pure insertion before its start token.
fn apply_edits(tokens: &[Token], edits: &[(std::ops::Range<usize>, String)]) -> String {
    let mut out = String::new();
    let mut pos = 0usize;
    for (range, text) in edits {
        for tok in &tokens[pos..range.start] {
            out.push_str(&tok.text);
        }
        out.push_str(text);
        pos = range.end;
    }
    for tok in &tokens[pos..] {
        out.push_str(&tok.text);
    }
    out
}

// ---------------------------------------------------------------------------
// runtime emission

/// Java source of the reduction runtime the rewritten classes extend.
/// Deterministic for a given chain.
pub fn emit_runtime(chain: &ModulusChain) -> String {
    let fmt_array = |sel: fn(&(i32, i32)) -> i32| {
        chain
            .pairs()
            .iter()
            .map(|p| sel(p).to_string())
            .collect::<Vec<_>>()
            .join(", ")
    };
    format!(
        "class obfuscate {{\n    static final int[] P = {{ {} }};\n    static final int[] Q = {{ {} }};\n\n    static int F(int a, int k) {{\n        int r = a;\n        for (int i = k; i >= 1; i--) {{\n            r = r % (P[i - 1] + Q[i - 1]);\n        }}\n        return r;\n    }}\n}}\n",
        fmt_array(|p| p.0),
        fmt_array(|p| p.1),
    )
}

// ---------------------------------------------------------------------------
// verification

/// Result of checking an obfuscated file against its original.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyOutcome {
    pub sites_checked: usize,
    pub class_rename: Option<(String, String)>,
}

/// Walks both token streams in parallel. They must agree exactly except
/// where the original holds an integer literal and the rewritten file holds
/// a parenthesized expression (which must evaluate back to that literal),
/// plus the class rename and an inserted `extends obfuscate`. Whitespace is
/// ignored on both sides.
pub fn verify_against(
    original: &str,
    rewritten: &str,
    chain: &ModulusChain,
    original_path: &str,
    rewritten_path: &str,
) -> Result<VerifyOutcome> {
    let orig_all = lexer::lex(original, original_path)?;
    let rewr_all = lexer::lex(rewritten, rewritten_path)?;
    let orig: Vec<&Token> = orig_all.iter().filter(|t| !t.is_ws()).collect();
    let rewr: Vec<&Token> = rewr_all.iter().filter(|t| !t.is_ws()).collect();

    let rename = match (class_decl(&orig_all), class_decl(&rewr_all)) {
        (Some(a), Some(b)) if a.name != b.name => Some((a.name, b.name)),
        _ => None,
    };

    let mut a = 0usize;
    let mut b = 0usize;
    let mut checked = 0usize;
    while a < orig.len() || b < rewr.len() {
        let ta = orig.get(a);
        let tb = rewr.get(b);
        match (ta, tb) {
            (Some(ta), Some(tb)) if ta.text == tb.text => {
                a += 1;
                b += 1;
            }
            // class rename, applied to every occurrence of the old name
            (Some(ta), Some(tb))
                if rename
                    .as_ref()
                    .is_some_and(|(old, new)| ta.text == *old && tb.text == *new) =>
            {
                a += 1;
                b += 1;
            }
            // inserted superclass
            (_, Some(tb))
                if tb.text == "extends"
                    && rewr.get(b + 1).is_some_and(|t| t.text == "obfuscate")
                    && ta.map(|t| t.text != "extends").unwrap_or(true) =>
            {
                b += 2;
            }
            // literal replaced by a parenthesized expression
            (Some(ta), Some(tb)) if matches!(ta.kind, TokenKind::Number(_)) && tb.text == "(" => {
                let mut depth = 0i32;
                let mut j = b;
                let mut end = None;
                while j < rewr.len() {
                    match rewr[j].text.as_str() {
                        "(" => depth += 1,
                        ")" => {
                            depth -= 1;
                            if depth == 0 {
                                end = Some(j);
                                break;
                            }
                        }
                        _ => {}
                    }
                    j += 1;
                }
                let end = end.ok_or_else(|| Error::Structural {
                    path: rewritten_path.to_string(),
                    msg: format!("{}:{}: unbalanced expression", tb.line, tb.col),
                })?;
                let text: String = rewr[b..=end].iter().map(|t| t.text.as_str()).collect();
                let tree = expr::parse(&text).map_err(|e| match e {
                    Error::Parse { msg, .. } => Error::Parse {
                        path: rewritten_path.to_string(),
                        line: tb.line,
                        col: tb.col,
                        msg,
                    },
                    other => other,
                })?;
                let value = expr::eval(chain, &tree)? as i64;
                let expected: i64 = ta.text.parse().map_err(|_| Error::Structural {
                    path: original_path.to_string(),
                    msg: format!("{}:{}: unreadable literal {}", ta.line, ta.col, ta.text),
                })?;
                if value != expected {
                    return Err(Error::Verify {
                        path: rewritten_path.to_string(),
                        line: tb.line,
                        col: tb.col,
                        expected,
                        actual: value,
                    });
                }
                checked += 1;
                a += 1;
                b = end + 1;
            }
            _ => {
                let (line, col, what) = match (ta, tb) {
                    (Some(t), _) => (t.line, t.col, format!("original token '{}' has no counterpart", t.text)),
                    (None, Some(t)) => (t.line, t.col, format!("unexpected trailing token '{}'", t.text)),
                    (None, None) => unreachable!(),
                };
                return Err(Error::Structural {
                    path: rewritten_path.to_string(),
                    msg: format!("{line}:{col}: {what}"),
                });
            }
        }
    }
    Ok(VerifyOutcome { sites_checked: checked, class_rename: rename })
}
