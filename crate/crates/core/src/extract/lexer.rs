//! Java tokenizer. Comments are dropped except for the leading header
//! block, which generated-code detection inspects.

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// String, char, text-block and numeric literals; contents are irrelevant.
    Literal,
    Punct(&'static str),
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub line: u32,
}

impl Token {
    pub fn is(&self, p: &str) -> bool {
        matches!(&self.tok, Tok::Punct(q) if *q == p)
    }

    pub fn ident(&self) -> Option<&str> {
        match &self.tok {
            Tok::Ident(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_word(&self, w: &str) -> bool {
        self.ident() == Some(w)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexError {
    pub line: u32,
    pub message: String,
}

pub struct Lexed {
    pub tokens: Vec<Token>,
    pub header: String,
}

// Longest first.
const PUNCTS: &[&str] = &[
    ">>>=", "<<=", ">>=", "...", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=", ">=",
    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<", "(", ")", "{", "}", "[", "]", ";",
    ",", ".", "@", "=", ">", "<", "!", "~", "?", ":", "+", "-", "*", "/", "&", "|", "^", "%",
];

// `>>` and `>>>` are deliberately absent: generic closers are lexed one `>`
// at a time and shift operators never matter to the structural parser.

pub fn lex(src: &str) -> Result<Lexed, LexError> {
    let bytes = src.as_bytes();
    let mut tokens = Vec::new();
    let mut header = String::new();
    let mut i = 0;
    let mut line = 1u32;
    let n = bytes.len();

    while i < n {
        let c = bytes[i];
        match c {
            b'\n' => {
                line += 1;
                i += 1;
            }
            b' ' | b'\t' | b'\r' | 0x0c => i += 1,
            b'/' if i + 1 < n && bytes[i + 1] == b'/' => {
                let start = i;
                while i < n && bytes[i] != b'\n' {
                    i += 1;
                }
                if tokens.is_empty() {
                    header.push_str(&src[start..i]);
                    header.push('\n');
                }
            }
            b'/' if i + 1 < n && bytes[i + 1] == b'*' => {
                let start = i;
                let start_line = line;
                i += 2;
                loop {
                    if i + 1 >= n {
                        return Err(LexError {
                            line: start_line,
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
                if tokens.is_empty() {
                    header.push_str(&src[start..i]);
                    header.push('\n');
                }
            }
            b'"' if src[i..].starts_with("\"\"\"") => {
                let start_line = line;
                i += 3;
                loop {
                    if i + 2 >= n {
                        return Err(LexError {
                            line: start_line,
                            message: "unterminated text block".into(),
                        });
                    }
                    if bytes[i] == b'\\' {
                        i += 2;
                        continue;
                    }
                    if src[i..].starts_with("\"\"\"") {
                        i += 3;
                        break;
                    }
                    if bytes[i] == b'\n' {
                        line += 1;
                    }
                    i += 1;
                }
                tokens.push(Token {
                    tok: Tok::Literal,
                    line: start_line,
                });
            }
            b'"' | b'\'' => {
                let quote = c;
                i += 1;
                loop {
                    if i >= n || bytes[i] == b'\n' {
                        return Err(LexError {
                            line,
                            message: "unterminated literal".into(),
                        });
                    }
                    if bytes[i] == b'\\' {
                        i += 2;
                        continue;
                    }
                    if bytes[i] == quote {
                        i += 1;
                        break;
                    }
                    i += 1;
                }
                tokens.push(Token {
                    tok: Tok::Literal,
                    line,
                });
            }
            b'0'..=b'9' => {
                let hex = src[i..].starts_with("0x") || src[i..].starts_with("0X");
                i += 1;
                while i < n {
                    let d = bytes[i];
                    let exp_sign = (d == b'+' || d == b'-')
                        && matches!(bytes[i - 1], b'e' | b'E' | b'p' | b'P')
                        && !hex;
                    if d.is_ascii_alphanumeric() || d == b'_' || d == b'.' || exp_sign {
                        i += 1;
                    } else {
                        break;
                    }
                }
                tokens.push(Token {
                    tok: Tok::Literal,
                    line,
                });
            }
            b'.' if i + 1 < n && bytes[i + 1].is_ascii_digit() => {
                i += 1;
                while i < n && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                tokens.push(Token {
                    tok: Tok::Literal,
                    line,
                });
            }
            _ if c == b'_' || c == b'$' || c.is_ascii_alphabetic() || c >= 0x80 => {
                let start = i;
                while i < n {
                    let d = bytes[i];
                    if d == b'_' || d == b'$' || d.is_ascii_alphanumeric() || d >= 0x80 {
                        i += 1;
                    } else {
                        break;
                    }
                }
                tokens.push(Token {
                    tok: Tok::Ident(src[start..i].to_string()),
                    line,
                });
            }
            _ => {
                let rest = &src[i..];
                match PUNCTS.iter().find(|p| rest.starts_with(**p)) {
                    Some(p) => {
                        tokens.push(Token {
                            tok: Tok::Punct(p),
                            line,
                        });
                        i += p.len();
                    }
                    None => {
                        return Err(LexError {
                            line,
                            message: format!("unexpected character `{}`", rest.chars().next().unwrap()),
                        })
                    }
                }
            }
        }
    }
    Ok(Lexed { tokens, header })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idents(src: &str) -> Vec<String> {
        lex(src)
            .unwrap()
            .tokens
            .into_iter()
            .filter_map(|t| t.ident().map(str::to_string))
            .collect()
    }

    #[test]
    fn comments_and_literals_are_skipped() {
        let src = "// Generated by JavaCC\n/* x */ class A { String s = \"a.b(c)\"; char q = '\\''; }";
        let lexed = lex(src).unwrap();
        assert!(lexed.header.contains("Generated by JavaCC"));
        assert_eq!(idents(src), ["class", "A", "String", "s", "char", "q"]);
    }

    #[test]
    fn generic_closers_lex_separately() {
        let toks = lex("Map<String, List<Integer>> m;").unwrap().tokens;
        let closers = toks.iter().filter(|t| t.is(">")).count();
        assert_eq!(closers, 2);
    }

    #[test]
    fn tracks_lines() {
        let toks = lex("a\n\nb /* \n */ c").unwrap().tokens;
        let lines: Vec<u32> = toks.iter().map(|t| t.line).collect();
        assert_eq!(lines, [1, 3, 4]);
    }

    #[test]
    fn unterminated_string_is_an_error() {
        assert!(lex("String s = \"abc;\n").is_err());
        assert!(lex("/* open").is_err());
    }

    #[test]
    fn numbers_with_exponents() {
        let toks = lex("x = 1.5e-3f + 0x1F;").unwrap().tokens;
        assert_eq!(toks.iter().filter(|t| t.tok == Tok::Literal).count(), 2);
    }
}
