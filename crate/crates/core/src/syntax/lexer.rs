use crate::ast::Span;

use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// Unsigned magnitude; the sign is applied by the parser.
    Int(u64),
    // keywords
    Procedure,
    From,
    Loop,
    Until,
    If,
    Then,
    Else,
    Fi,
    Local,
    Delocal,
    Call,
    Uncall,
    Int_,
    Skip,
    Size,
    // punctuation
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    AddAssign,
    SubAssign,
    XorAssign,
    Swap,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    StarStar,
    Amp,
    Pipe,
    Caret,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    AndAnd,
    OrOr,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(n) => format!("identifier `{n}`"),
            Tok::Int(v) => format!("integer `{v}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.text()),
        }
    }

    pub fn text(&self) -> &'static str {
        match self {
            Tok::Ident(_) => "identifier",
            Tok::Int(_) => "integer",
            Tok::Procedure => "procedure",
            Tok::From => "from",
            Tok::Loop => "loop",
            Tok::Until => "until",
            Tok::If => "if",
            Tok::Then => "then",
            Tok::Else => "else",
            Tok::Fi => "fi",
            Tok::Local => "local",
            Tok::Delocal => "delocal",
            Tok::Call => "call",
            Tok::Uncall => "uncall",
            Tok::Int_ => "int",
            Tok::Skip => "skip",
            Tok::Size => "size",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Comma => ",",
            Tok::AddAssign => "+=",
            Tok::SubAssign => "-=",
            Tok::XorAssign => "^=",
            Tok::Swap => "<=>",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Percent => "%",
            Tok::StarStar => "**",
            Tok::Amp => "&",
            Tok::Pipe => "|",
            Tok::Caret => "^",
            Tok::Eq => "=",
            Tok::Ne => "!=",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::AndAnd => "&&",
            Tok::OrOr => "||",
            Tok::Eof => "end of input",
        }
    }
}

fn keyword(word: &str) -> Option<Tok> {
    Some(match word {
        "procedure" => Tok::Procedure,
        "from" => Tok::From,
        "loop" => Tok::Loop,
        "until" => Tok::Until,
        "if" => Tok::If,
        "then" => Tok::Then,
        "else" => Tok::Else,
        "fi" => Tok::Fi,
        "local" => Tok::Local,
        "delocal" => Tok::Delocal,
        "call" => Tok::Call,
        "uncall" => Tok::Uncall,
        "int" => Tok::Int_,
        "skip" => Tok::Skip,
        "size" => Tok::Size,
        _ => return None,
    })
}

// Longest match first.
const PUNCT: &[(&str, Tok)] = &[
    ("<=>", Tok::Swap),
    ("+=", Tok::AddAssign),
    ("-=", Tok::SubAssign),
    ("^=", Tok::XorAssign),
    ("**", Tok::StarStar),
    ("!=", Tok::Ne),
    ("<=", Tok::Le),
    (">=", Tok::Ge),
    ("&&", Tok::AndAnd),
    ("||", Tok::OrOr),
    ("(", Tok::LParen),
    (")", Tok::RParen),
    ("[", Tok::LBracket),
    ("]", Tok::RBracket),
    (",", Tok::Comma),
    ("+", Tok::Plus),
    ("-", Tok::Minus),
    ("*", Tok::Star),
    ("/", Tok::Slash),
    ("%", Tok::Percent),
    ("&", Tok::Amp),
    ("|", Tok::Pipe),
    ("^", Tok::Caret),
    ("=", Tok::Eq),
    ("<", Tok::Lt),
    (">", Tok::Gt),
];

pub fn tokenize(src: &str) -> Result<Vec<(Tok, Span)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut pos = 0;
    let mut line = 1u32;
    let mut line_start = 0usize;
    while pos < bytes.len() {
        let c = bytes[pos];
        let column = (src[line_start..pos].chars().count() + 1) as u32;
        if c == b'\n' {
            pos += 1;
            line += 1;
            line_start = pos;
            continue;
        }
        if c.is_ascii_whitespace() {
            pos += 1;
            continue;
        }
        if src[pos..].starts_with("//") {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
            continue;
        }
        let start = pos;
        if c.is_ascii_digit() {
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            let span = Span::new(start, line, column, pos - start);
            let value = src[start..pos].parse::<u64>().map_err(|_| ParseError {
                span,
                expected: vec!["integer literal within 64 bits".to_string()],
                found: src[start..pos].to_string(),
            })?;
            out.push((Tok::Int(value), span));
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while pos < bytes.len() && (bytes[pos].is_ascii_alphanumeric() || bytes[pos] == b'_') {
                pos += 1;
            }
            let word = &src[start..pos];
            let tok = keyword(word).unwrap_or_else(|| Tok::Ident(word.to_string()));
            out.push((tok, Span::new(start, line, column, pos - start)));
            continue;
        }
        match PUNCT.iter().find(|(text, _)| src[pos..].starts_with(text)) {
            Some((text, tok)) => {
                pos += text.len();
                out.push((tok.clone(), Span::new(start, line, column, text.len())));
            }
            None => {
                let ch = src[pos..].chars().next().unwrap_or('?');
                return Err(ParseError {
                    span: Span::new(start, line, column, ch.len_utf8()),
                    expected: vec!["a token".to_string()],
                    found: format!("character `{ch}`"),
                });
            }
        }
    }
    let column = (src[line_start..].chars().count() + 1) as u32;
    out.push((Tok::Eof, Span::new(src.len(), line, column, 0)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        tokenize(src).unwrap().into_iter().map(|(t, _)| t).collect()
    }

    #[test]
    fn longest_match_and_comments() {
        assert_eq!(
            toks("a <=> b <= c // trailing\n**"),
            vec![
                Tok::Ident("a".into()),
                Tok::Swap,
                Tok::Ident("b".into()),
                Tok::Le,
                Tok::Ident("c".into()),
                Tok::StarStar,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn positions_track_lines() {
        let t = tokenize("x\n  y").unwrap();
        assert_eq!((t[1].1.line, t[1].1.column, t[1].1.offset), (2, 3, 4));
    }

    #[test]
    fn rejects_stray_characters() {
        let err = tokenize("x += $").unwrap_err();
        assert_eq!(err.span.column, 6);
    }
}
