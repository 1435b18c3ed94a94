//! Line-oriented LRM parser.
//!
//! Tokens are whitespace separated; a word line is
//! `WORD (-?[012] (dur,dur,...))+` and separators `*` `#` `%` stand alone on
//! their lines. Header keywords match case-insensitively. Every failure is a
//! positioned [`ParseError`]; softer findings (uncommon meters, bridge marks)
//! come back as diagnostics next to the song.

use crate::diagnostics::Diagnostic;

use super::{BeatCode, DurationCode, Song, SongItem, SyllableGroup, TimeSignature, WordEntry};

/// Fatal parse failure, with 1-based line/column of the offending token.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("{line}:{column}: missing header: {detail}")]
    MissingHeader { detail: String, line: u32, column: u32 },
    #[error("{line}:{column}: duplicate {header} header")]
    DuplicateHeader { header: &'static str, line: u32, column: u32 },
    #[error("{line}:{column}: malformed TIMESIG header: {detail}")]
    BadTimeSignature { detail: String, line: u32, column: u32 },
    #[error("{line}:{column}: bad beat code {token:?} (expected 0, 1 or 2 with optional leading '-')")]
    BadBeatCode { token: String, line: u32, column: u32 },
    #[error("{line}:{column}: bad duration code {token:?} (expected 1, 2, 4, 8, 16 or a dotted .5 form)")]
    BadDurationCode { token: String, line: u32, column: u32 },
    #[error("{line}:{column}: unbalanced parentheses in duration group")]
    UnbalancedParens { line: u32, column: u32 },
    #[error("{line}:{column}: empty duration list")]
    EmptyDurationList { line: u32, column: u32 },
}

impl ParseError {
    pub fn position(&self) -> (u32, u32) {
        match self {
            ParseError::MissingHeader { line, column, .. }
            | ParseError::DuplicateHeader { line, column, .. }
            | ParseError::BadTimeSignature { line, column, .. }
            | ParseError::BadBeatCode { line, column, .. }
            | ParseError::BadDurationCode { line, column, .. }
            | ParseError::UnbalancedParens { line, column }
            | ParseError::EmptyDurationList { line, column } => (*line, *column),
        }
    }
}

/// A parsed song together with advisory findings.
#[derive(Debug, Clone, PartialEq)]
pub struct Parsed {
    pub song: Song,
    pub diagnostics: Vec<Diagnostic>,
}

/// A token with its 1-based source position.
#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    line: u32,
    column: u32,
}

fn tokenize(line: &str, line_no: u32) -> Vec<Token<'_>> {
    let mut tokens = Vec::new();
    let mut start: Option<usize> = None;
    for (idx, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                tokens.push(Token {
                    text: &line[s..idx],
                    line: line_no,
                    column: s as u32 + 1,
                });
            }
        } else if start.is_none() {
            start = Some(idx);
        }
    }
    if let Some(s) = start {
        tokens.push(Token {
            text: &line[s..],
            line: line_no,
            column: s as u32 + 1,
        });
    }
    tokens
}

fn parse_beat_code(token: &str) -> Option<BeatCode> {
    let (pickup, digits) = match token.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, token),
    };
    match digits {
        "0" => Some(BeatCode::new(0, pickup)),
        "1" => Some(BeatCode::new(1, pickup)),
        "2" => Some(BeatCode::new(2, pickup)),
        _ => None,
    }
}

struct HeaderState {
    title: Option<String>,
    timesig: Option<TimeSignature>,
}

/// Parses a complete LRM document.
pub fn parse_lrm(source: &str) -> Result<Parsed, ParseError> {
    let mut header = HeaderState { title: None, timesig: None };
    let mut items: Vec<SongItem> = Vec::new();
    let mut diagnostics: Vec<Diagnostic> = Vec::new();
    let mut last_line = 0u32;

    for (idx, raw_line) in source.lines().enumerate() {
        let line_no = idx as u32 + 1;
        last_line = line_no;
        let trimmed = raw_line.trim();
        if trimmed.is_empty() {
            continue;
        }

        if let Some(rest) = strip_keyword(raw_line, "TITLE:") {
            if header.title.is_some() {
                return Err(ParseError::DuplicateHeader { header: "TITLE", line: line_no, column: 1 });
            }
            header.title = Some(rest.trim().to_string());
            continue;
        }
        if let Some(rest) = strip_keyword(raw_line, "TIMESIG:") {
            if header.timesig.is_some() {
                return Err(ParseError::DuplicateHeader { header: "TIMESIG", line: line_no, column: 1 });
            }
            header.timesig = Some(parse_timesig(rest, line_no, &mut diagnostics)?);
            continue;
        }

        match trimmed {
            "*" => {
                items.push(SongItem::PhraseBreak);
                continue;
            }
            "#" => {
                items.push(SongItem::VerseBreak);
                continue;
            }
            "%" => {
                diagnostics.push(
                    Diagnostic::info(
                        "format/bridge-mark",
                        "bridge mark '%' treated as a flat marker (no nesting)",
                    )
                    .on_line(line_no),
                );
                items.push(SongItem::BridgeMark);
                continue;
            }
            _ => {}
        }

        // Word line. Both headers must already be present.
        let tokens = tokenize(raw_line, line_no);
        let first = tokens[0];
        if header.title.is_none() || header.timesig.is_none() {
            return Err(ParseError::MissingHeader {
                detail: format!(
                    "TITLE and TIMESIG must appear before the first word (found {:?})",
                    first.text
                ),
                line: first.line,
                column: first.column,
            });
        }
        items.push(SongItem::Word(parse_word_line(&tokens)?));
    }

    let title = header.title.ok_or_else(|| ParseError::MissingHeader {
        detail: "no TITLE line in document".into(),
        line: last_line.max(1),
        column: 1,
    })?;
    let timesig = header.timesig.ok_or_else(|| ParseError::MissingHeader {
        detail: "no TIMESIG line in document".into(),
        line: last_line.max(1),
        column: 1,
    })?;

    Ok(Parsed {
        song: Song { title, timesig, items },
        diagnostics,
    })
}

/// Case-insensitive match of a header keyword at the start of a line
/// (leading whitespace allowed); returns the remainder.
fn strip_keyword<'a>(line: &'a str, keyword: &str) -> Option<&'a str> {
    let trimmed = line.trim_start();
    match trimmed.get(..keyword.len()) {
        Some(head) if head.eq_ignore_ascii_case(keyword) => Some(&trimmed[keyword.len()..]),
        _ => None,
    }
}

fn parse_timesig(
    rest: &str,
    line: u32,
    diagnostics: &mut Vec<Diagnostic>,
) -> Result<TimeSignature, ParseError> {
    let fields: Vec<&str> = rest.split_whitespace().collect();
    let bad = |detail: String| ParseError::BadTimeSignature { detail, line, column: 1 };
    if fields.len() != 2 {
        return Err(bad(format!(
            "expected two integers (e.g. \"TIMESIG: 4 4\"), found {} field(s)",
            fields.len()
        )));
    }
    let numerator: u32 = fields[0]
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| bad(format!("numerator {:?} is not a positive integer", fields[0])))?;
    let denominator: u32 = fields[1]
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| bad(format!("denominator {:?} is not a positive integer", fields[1])))?;
    if numerator != 3 && numerator != 4 {
        diagnostics.push(
            Diagnostic::warning(
                "format/uncommon-numerator",
                format!("time signature {numerator}/{denominator} is outside the usual 3/4 and 4/4"),
            )
            .on_line(line),
        );
    }
    if denominator != 4 {
        diagnostics.push(
            Diagnostic::warning(
                "format/uncommon-denominator",
                format!("denominator {denominator} is not 4; beat derivation will be refused"),
            )
            .on_line(line),
        );
    }
    Ok(TimeSignature::new(numerator, denominator))
}

/// Parses `WORD (-?[012] \(dur(,dur)*\))+` from one line's tokens.
fn parse_word_line(tokens: &[Token<'_>]) -> Result<WordEntry, ParseError> {
    let word = tokens[0];
    let mut groups: Vec<SyllableGroup> = Vec::new();
    let mut rest = &tokens[1..];

    if rest.is_empty() {
        return Err(ParseError::BadBeatCode {
            token: String::new(),
            line: word.line,
            column: word.column + word.text.chars().count() as u32,
        });
    }

    while !rest.is_empty() {
        let beat_tok = rest[0];
        let beat = parse_beat_code(beat_tok.text).ok_or_else(|| ParseError::BadBeatCode {
            token: beat_tok.text.to_string(),
            line: beat_tok.line,
            column: beat_tok.column,
        })?;
        rest = &rest[1..];

        // Collect tokens up to the one carrying the closing paren; the list
        // may be split by spaces after commas.
        let open = rest.first().copied().ok_or(ParseError::UnbalancedParens {
            line: beat_tok.line,
            column: beat_tok.column + beat_tok.text.chars().count() as u32,
        })?;
        if !rest[0].text.starts_with('(') {
            return Err(ParseError::UnbalancedParens { line: open.line, column: open.column });
        }
        let mut list = String::new();
        let mut closed = false;
        let mut consumed = 0;
        for tok in rest {
            consumed += 1;
            list.push_str(tok.text);
            if tok.text.ends_with(')') {
                closed = true;
                break;
            }
            if tok.text.contains(')') {
                // A ')' in the middle of a token means trailing junk.
                return Err(ParseError::UnbalancedParens { line: tok.line, column: tok.column });
            }
        }
        if !closed {
            return Err(ParseError::UnbalancedParens { line: open.line, column: open.column });
        }
        rest = &rest[consumed..];

        let inner = &list[1..list.len() - 1];
        if inner.contains('(') || inner.contains(')') {
            return Err(ParseError::UnbalancedParens { line: open.line, column: open.column });
        }
        if inner.trim().is_empty() {
            return Err(ParseError::EmptyDurationList { line: open.line, column: open.column });
        }
        let mut durations = Vec::new();
        for piece in inner.split(',') {
            let piece = piece.trim();
            let code = DurationCode::from_token(piece).ok_or_else(|| ParseError::BadDurationCode {
                token: piece.to_string(),
                line: open.line,
                column: open.column,
            })?;
            durations.push(code);
        }
        groups.push(SyllableGroup { beat, durations });
    }

    Ok(WordEntry { text: word.text.to_string(), groups })
}
