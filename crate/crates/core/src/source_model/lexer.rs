//! Tokenizer for the Java subset. `>` is always emitted on its own; the
//! parser re-joins glued `>` tokens into shift and comparison operators so
//! that nested generic arguments (`List<List<T>>`) need no special casing.

use super::ast::LiteralKind;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Lit(LiteralKind, String),
    Sym(&'static str),
    Eof,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub line: u32,
    /// Last line covered by the token (text blocks span several).
    pub end_line: u32,
    /// No whitespace or comment between this token and the previous one.
    pub glued: bool,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct LexError {
    pub line: u32,
    pub message: String,
}

const SYMBOLS: &[&str] = &[
    "<<=", "...", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=", "+=", "-=", "*=", "/=",
    "%=", "&=", "|=", "^=", "<<", "(", ")", "{", "}", "[", "]", ";", ",", ".", "@", "=", "<", ">",
    "!", "~", "?", ":", "+", "-", "*", "/", "&", "|", "^", "%",
];

pub fn tokenize(src: &str) -> Result<Vec<Token>, LexError> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0usize;
    let mut line = 1u32;
    let mut glued = false;

    while i < bytes.len() {
        let c = bytes[i];
        if c == b'\n' {
            line += 1;
            i += 1;
            glued = false;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            glued = false;
            continue;
        }
        if c == b'/' && bytes.get(i + 1) == Some(&b'/') {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            glued = false;
            continue;
        }
        if c == b'/' && bytes.get(i + 1) == Some(&b'*') {
            let start = line;
            i += 2;
            loop {
                if i + 1 >= bytes.len() {
                    return Err(LexError {
                        line: start,
                        message: "unterminated comment".into(),
                    });
                }
                if bytes[i] == b'*' && bytes[i + 1] == b'/' {
                    i += 2;
                    break;
                }
                if bytes[i] == b'\n' {
                    line += 1;
                }
                i += 1;
            }
            glued = false;
            continue;
        }

        let start_line = line;
        let tok = if c.is_ascii_alphabetic() || c == b'_' || c == b'$' || c >= 0x80 {
            let start = i;
            while i < bytes.len()
                && (bytes[i].is_ascii_alphanumeric()
                    || bytes[i] == b'_'
                    || bytes[i] == b'$'
                    || bytes[i] >= 0x80)
            {
                i += 1;
            }
            let word = &src[start..i];
            match word {
                "true" | "false" => Tok::Lit(LiteralKind::Bool, word.to_string()),
                "null" => Tok::Lit(LiteralKind::Null, word.to_string()),
                _ => Tok::Ident(word.to_string()),
            }
        } else if c.is_ascii_digit()
            || (c == b'.' && bytes.get(i + 1).is_some_and(|b| b.is_ascii_digit()))
        {
            let (kind, len) = lex_number(&bytes[i..]);
            let text = src[i..i + len].to_string();
            i += len;
            Tok::Lit(kind, text)
        } else if c == b'"' {
            if bytes[i..].starts_with(b"\"\"\"") {
                let start = i;
                i += 3;
                loop {
                    if i + 2 >= bytes.len() {
                        return Err(LexError {
                            line: start_line,
                            message: "unterminated text block".into(),
                        });
                    }
                    if bytes[i] == b'\\' {
                        i += 2;
                        continue;
                    }
                    if bytes[i..].starts_with(b"\"\"\"") {
                        i += 3;
                        break;
                    }
                    if bytes[i] == b'\n' {
                        line += 1;
                    }
                    i += 1;
                }
                Tok::Lit(LiteralKind::String, src[start..i].to_string())
            } else {
                let len = lex_quoted(&bytes[i..], b'"').ok_or_else(|| LexError {
                    line,
                    message: "unterminated string literal".into(),
                })?;
                let text = src[i..i + len].to_string();
                i += len;
                Tok::Lit(LiteralKind::String, text)
            }
        } else if c == b'\'' {
            let len = lex_quoted(&bytes[i..], b'\'').ok_or_else(|| LexError {
                line,
                message: "unterminated character literal".into(),
            })?;
            let text = src[i..i + len].to_string();
            i += len;
            Tok::Lit(LiteralKind::Char, text)
        } else {
            let rest = &src[i..];
            let sym = SYMBOLS
                .iter()
                .find(|s| rest.starts_with(**s))
                .ok_or_else(|| LexError {
                    line,
                    message: format!("unexpected character `{}`", rest.chars().next().unwrap_or('?')),
                })?;
            i += sym.len();
            Tok::Sym(sym)
        };
        toks.push(Token {
            tok,
            line: start_line,
            end_line: line,
            glued,
        });
        glued = true;
    }
    toks.push(Token {
        tok: Tok::Eof,
        line,
        end_line: line,
        glued: false,
    });
    Ok(toks)
}

/// Length of a quoted literal starting at `b[0] == quote`, including both quotes.
fn lex_quoted(b: &[u8], quote: u8) -> Option<usize> {
    let mut i = 1;
    while i < b.len() {
        match b[i] {
            b'\\' => i += 2,
            b'\n' => return None,
            x if x == quote => return Some(i + 1),
            _ => i += 1,
        }
    }
    None
}

fn lex_number(b: &[u8]) -> (LiteralKind, usize) {
    let mut i = 0;
    let mut floating = false;
    let is_hex = b.len() > 1 && b[0] == b'0' && (b[1] == b'x' || b[1] == b'X');
    let is_bin = b.len() > 1 && b[0] == b'0' && (b[1] == b'b' || b[1] == b'B');
    if is_hex || is_bin {
        i = 2;
        while i < b.len() && (b[i].is_ascii_hexdigit() || b[i] == b'_') {
            i += 1;
        }
        if is_hex && i < b.len() && (b[i] == b'.' || b[i] == b'p' || b[i] == b'P') {
            floating = true;
            if b[i] == b'.' {
                i += 1;
                while i < b.len() && (b[i].is_ascii_hexdigit() || b[i] == b'_') {
                    i += 1;
                }
            }
            if i < b.len() && (b[i] == b'p' || b[i] == b'P') {
                i += 1;
                if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
                    i += 1;
                }
                while i < b.len() && b[i].is_ascii_digit() {
                    i += 1;
                }
            }
        }
    } else {
        while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'_') {
            i += 1;
        }
        if i < b.len() && b[i] == b'.' && b.get(i + 1).is_none_or(|x| x.is_ascii_digit() || !x.is_ascii_alphabetic()) {
            floating = true;
            i += 1;
            while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'_') {
                i += 1;
            }
        }
        if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
            floating = true;
            i += 1;
            if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
                i += 1;
            }
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
        }
    }
    let kind = match b.get(i) {
        Some(b'l') | Some(b'L') => {
            i += 1;
            LiteralKind::Long
        }
        Some(b'f') | Some(b'F') => {
            i += 1;
            LiteralKind::Float
        }
        Some(b'd') | Some(b'D') => {
            i += 1;
            LiteralKind::Double
        }
        _ if floating => LiteralKind::Double,
        _ => LiteralKind::Int,
    };
    (kind, i)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<Tok> {
        tokenize(src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn splits_closing_generics() {
        let toks = tokenize("List<List<T>> x").unwrap();
        let gts: Vec<_> = toks.iter().filter(|t| t.tok == Tok::Sym(">")).collect();
        assert_eq!(gts.len(), 2);
        assert!(gts[1].glued);
    }

    #[test]
    fn numbers_and_literals() {
        assert_eq!(
            kinds("0x1F 1_000L 1.5e3f .5 'a' \"s\\\"\" x"),
            vec![
                Tok::Lit(LiteralKind::Int, "0x1F".into()),
                Tok::Lit(LiteralKind::Long, "1_000L".into()),
                Tok::Lit(LiteralKind::Float, "1.5e3f".into()),
                Tok::Lit(LiteralKind::Double, ".5".into()),
                Tok::Lit(LiteralKind::Char, "'a'".into()),
                Tok::Lit(LiteralKind::String, "\"s\\\"\"".into()),
                Tok::Ident("x".into()),
                Tok::Eof,
            ]
        );
    }

    #[test]
    fn tracks_lines_through_comments() {
        let toks = tokenize("a /* x\n y */ b // c\n d").unwrap();
        let lines: Vec<u32> = toks.iter().map(|t| t.line).collect();
        assert_eq!(lines, vec![1, 2, 3, 3]);
    }

    #[test]
    fn member_access_on_int_is_not_float() {
        // `1.` followed by an identifier is not valid Java anyway; make sure `a.length` style stays intact
        assert_eq!(
            kinds("v.length"),
            vec![
                Tok::Ident("v".into()),
                Tok::Sym("."),
                Tok::Ident("length".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn unterminated_string_is_an_error() {
        assert!(tokenize("\"abc").is_err());
    }
}
