use super::ast::{codes, ErrorRecord, Token, TokenKind};

pub const KEYWORDS: &[&str] = &[
    "environ", "begin", "theorem", "definition", "proof", "@proof", "end", "let", "assume",
    "thus", "by", "be", "being", "is", "for", "holds", "implies", "not", "and", "or", "uses",
    "cluster", "func", "pred", "type",
];

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word)
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_lowercase()
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_'
}

/// Tokenizes an article. Illegal characters yield a code-1 record at their
/// position and scanning continues with the next character.
pub fn tokenize(source: &str) -> (Vec<Token>, Vec<ErrorRecord>) {
    let mut tokens = Vec::new();
    let mut errors = Vec::new();
    let chars: Vec<char> = source.chars().collect();
    let mut i = 0usize;
    let mut line = 1u32;
    let mut col = 1u32;

    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c == ' ' || c == '\t' || c == '\r' {
            col += 1;
            i += 1;
            continue;
        }
        let (tline, tcol) = (line, col);
        if is_ident_start(c) {
            let mut j = i + 1;
            while j < chars.len() && is_ident_continue(chars[j]) {
                j += 1;
            }
            let word: String = chars[i..j].iter().collect();
            let kind = if is_keyword(&word) {
                TokenKind::Keyword
            } else if j < chars.len() && chars[j] == ':' {
                TokenKind::Label
            } else {
                TokenKind::Identifier
            };
            col += (j - i) as u32;
            i = j;
            tokens.push(Token { kind, lexeme: word, line: tline, col: tcol });
            continue;
        }
        if c == '@' {
            // `@` is only legal as part of the `@proof` directive.
            let rest: String = chars[i..chars.len().min(i + 6)].iter().collect();
            let boundary_ok = chars.get(i + 6).map_or(true, |&n| !is_ident_continue(n));
            if rest == "@proof" && boundary_ok {
                tokens.push(Token {
                    kind: TokenKind::Keyword,
                    lexeme: "@proof".to_string(),
                    line: tline,
                    col: tcol,
                });
                i += 6;
                col += 6;
                continue;
            }
            errors.push(ErrorRecord::new(tline, tcol, codes::LEX));
            i += 1;
            col += 1;
            continue;
        }
        if c == '-' {
            if chars.get(i + 1) == Some(&'>') {
                tokens.push(Token {
                    kind: TokenKind::Symbol,
                    lexeme: "->".to_string(),
                    line: tline,
                    col: tcol,
                });
                i += 2;
                col += 2;
                continue;
            }
            errors.push(ErrorRecord::new(tline, tcol, codes::LEX));
            i += 1;
            col += 1;
            continue;
        }
        if matches!(c, ';' | ':' | '(' | ')' | ',' | '=') {
            tokens.push(Token {
                kind: TokenKind::Symbol,
                lexeme: c.to_string(),
                line: tline,
                col: tcol,
            });
            i += 1;
            col += 1;
            continue;
        }
        errors.push(ErrorRecord::new(tline, tcol, codes::LEX));
        i += 1;
        col += 1;
    }
    (tokens, errors)
}
