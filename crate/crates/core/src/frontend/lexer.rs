//! Tokenizer for the supported OpenQASM 3.0 subset.

use std::fmt;

use thiserror::Error;

/// Reserved words. `pi` is deliberately *not* here: it lexes as an identifier
/// and the parser gives it meaning.
const KEYWORDS: &[&str] = &[
    "OPENQASM", "include", "qubit", "bit", "input", "const", "float", "int", "array", "gate",
    "measure", "reset", "barrier", "if", "else", "for", "in", "ctrl", "negctrl", "inv", "pow",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Keyword,
    Identifier,
    IntLiteral,
    FloatLiteral,
    StringLiteral,
    Operator,
    Punctuation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    /// 1-based line of the first character.
    pub line: usize,
    /// 1-based column (in characters) of the first character.
    pub col: usize,
}

impl Token {
    pub fn is(&self, kind: TokenKind, lexeme: &str) -> bool {
        self.kind == kind && self.lexeme == lexeme
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            TokenKind::StringLiteral => write!(f, "string {}", self.lexeme),
            TokenKind::IntLiteral | TokenKind::FloatLiteral => write!(f, "number `{}`", self.lexeme),
            TokenKind::Identifier => write!(f, "identifier `{}`", self.lexeme),
            _ => write!(f, "`{}`", self.lexeme),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {message}")]
pub struct LexError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    src: &'a str,
    line: usize,
    col: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|&(_, c)| c)
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.chars.clone();
        it.next();
        it.next().map(|(_, c)| c)
    }

    fn offset(&mut self) -> usize {
        self.chars.peek().map_or(self.src.len(), |&(i, _)| i)
    }

    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn eat_while(&mut self, pred: impl Fn(char) -> bool) {
        while self.peek().is_some_and(&pred) {
            self.bump();
        }
    }
}

/// Split `source` into tokens, dropping whitespace and comments.
pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    let mut cur = Cursor { chars: source.char_indices().peekable(), src: source, line: 1, col: 1 };
    let mut tokens = Vec::new();

    while let Some(c) = cur.peek() {
        let (line, col) = (cur.line, cur.col);
        let start = cur.offset();
        let err = |message: String| LexError { line, col, message };

        let kind = match c {
            c if c.is_whitespace() => {
                cur.bump();
                continue;
            }
            '/' if cur.peek2() == Some('/') => {
                cur.eat_while(|c| c != '\n');
                continue;
            }
            '/' if cur.peek2() == Some('*') => {
                cur.bump();
                cur.bump();
                let mut closed = false;
                while let Some(c) = cur.bump() {
                    if c == '*' && cur.peek() == Some('/') {
                        cur.bump();
                        closed = true;
                        break;
                    }
                }
                if !closed {
                    return Err(err("unterminated block comment".into()));
                }
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                cur.eat_while(|c| c.is_ascii_alphanumeric() || c == '_');
                let word = &source[start..cur.offset()];
                if KEYWORDS.contains(&word) {
                    TokenKind::Keyword
                } else {
                    TokenKind::Identifier
                }
            }
            c if c.is_ascii_digit() || (c == '.' && cur.peek2().is_some_and(|d| d.is_ascii_digit())) => {
                lex_number(&mut cur).map_err(|m| err(m.into()))?
            }
            '"' => {
                cur.bump();
                loop {
                    match cur.bump() {
                        Some('"') => break,
                        Some('\n') | None => return Err(err("unterminated string literal".into())),
                        Some(_) => {}
                    }
                }
                TokenKind::StringLiteral
            }
            '=' | '!' | '<' | '>' => {
                cur.bump();
                if cur.peek() == Some('=') {
                    cur.bump();
                } else if c == '!' {
                    return Err(err("unexpected character `!`".into()));
                }
                TokenKind::Operator
            }
            '-' => {
                cur.bump();
                if cur.peek() == Some('>') {
                    cur.bump();
                }
                TokenKind::Operator
            }
            '+' | '*' | '/' | '@' => {
                cur.bump();
                TokenKind::Operator
            }
            '(' | ')' | '[' | ']' | '{' | '}' | ',' | ';' | ':' => {
                cur.bump();
                TokenKind::Punctuation
            }
            '$' => return Err(err("physical qubit references (`$n`) are not supported".into())),
            other => return Err(err(format!("unexpected character `{other}`"))),
        };

        tokens.push(Token { kind, lexeme: source[start..cur.offset()].to_string(), line, col });
    }
    Ok(tokens)
}

fn lex_number(cur: &mut Cursor<'_>) -> Result<TokenKind, &'static str> {
    let mut kind = TokenKind::IntLiteral;
    cur.eat_while(|c| c.is_ascii_digit());
    if cur.peek() == Some('.') {
        kind = TokenKind::FloatLiteral;
        cur.bump();
        cur.eat_while(|c| c.is_ascii_digit());
    }
    if matches!(cur.peek(), Some('e' | 'E')) {
        let sign = cur.peek2();
        let has_digits = match sign {
            Some('+' | '-') => {
                let mut it = cur.chars.clone();
                it.next();
                it.next();
                it.next().is_some_and(|(_, c)| c.is_ascii_digit())
            }
            Some(d) => d.is_ascii_digit(),
            None => false,
        };
        if !has_digits {
            return Err("malformed exponent in numeric literal");
        }
        kind = TokenKind::FloatLiteral;
        cur.bump();
        if matches!(cur.peek(), Some('+' | '-')) {
            cur.bump();
        }
        cur.eat_while(|c| c.is_ascii_digit());
    }
    if cur.peek().is_some_and(|c| c.is_ascii_alphabetic() || c == '_') {
        return Err("identifier immediately follows numeric literal");
    }
    Ok(kind)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lexemes(src: &str) -> Vec<String> {
        tokenize(src).unwrap().into_iter().map(|t| t.lexeme).collect()
    }

    #[test]
    fn gate_call_decomposes() {
        let toks = tokenize("h q[0];").unwrap();
        let got: Vec<_> = toks.iter().map(|t| (t.kind, t.lexeme.as_str())).collect();
        assert_eq!(
            got,
            vec![
                (TokenKind::Identifier, "h"),
                (TokenKind::Identifier, "q"),
                (TokenKind::Punctuation, "["),
                (TokenKind::IntLiteral, "0"),
                (TokenKind::Punctuation, "]"),
                (TokenKind::Punctuation, ";"),
            ]
        );
    }

    #[test]
    fn empty_source() {
        assert!(tokenize("").unwrap().is_empty());
        assert!(tokenize("  // only a comment\n/* and a block */ ").unwrap().is_empty());
    }

    #[test]
    fn pi_is_an_identifier() {
        let toks = tokenize("rz(pi/2) q;").unwrap();
        assert!(toks.iter().any(|t| t.is(TokenKind::Identifier, "pi")));
        assert!(toks.iter().any(|t| t.is(TokenKind::Operator, "/")));
    }

    #[test]
    fn positions_are_one_based() {
        let toks = tokenize("OPENQASM 3.0;\n  qubit q;").unwrap();
        assert_eq!((toks[0].line, toks[0].col), (1, 1));
        assert_eq!((toks[1].line, toks[1].col), (1, 10));
        assert_eq!(toks[1].kind, TokenKind::FloatLiteral);
        assert_eq!((toks[3].line, toks[3].col), (2, 3));
    }

    #[test]
    fn numbers() {
        let toks = tokenize("1 2.5 .5 1e-3 6.02E+23 3.").unwrap();
        let kinds: Vec<_> = toks.iter().map(|t| t.kind).collect();
        assert_eq!(kinds[0], TokenKind::IntLiteral);
        assert!(kinds[1..].iter().all(|k| *k == TokenKind::FloatLiteral));
        assert!(tokenize("1e").is_err());
        assert!(tokenize("12abc").is_err());
    }

    #[test]
    fn operators() {
        assert_eq!(lexemes("a->b == != <= >= < > = @ -"), vec![
            "a", "->", "b", "==", "!=", "<=", ">=", "<", ">", "=", "@", "-"
        ]);
    }

    #[test]
    fn errors_carry_location() {
        let e = tokenize("qubit q;\n  #").unwrap_err();
        assert_eq!((e.line, e.col), (2, 3));
        let e = tokenize("x /* never closed").unwrap_err();
        assert_eq!((e.line, e.col), (1, 3));
        assert!(e.message.contains("unterminated"));
        let e = tokenize("include \"stdgates.inc").unwrap_err();
        assert!(e.message.contains("string"));
        assert!(tokenize("h $0;").unwrap_err().message.contains("physical"));
    }
}
