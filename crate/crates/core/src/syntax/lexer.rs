//! Tokenizer shared by the Turtle and SPARQL readers.

use super::SyntaxError;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    IriRef(String),
    PName { prefix: String, local: String },
    Blank(String),
    Var(String),
    Str(String),
    /// `@word`: a directive or a language tag depending on context.
    At(String),
    DoubleCaret,
    Number(String),
    Word(String),
    Punct(char),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

struct Lexer {
    chars: Vec<char>,
    idx: usize,
    line: usize,
    col: usize,
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-' || c == '.'
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<Token>, SyntaxError> {
    let mut lx = Lexer { chars: text.chars().collect(), idx: 0, line: 1, col: 1 };
    let mut out = Vec::new();
    while let Some(tok) = lx.next_token()? {
        out.push(tok);
    }
    Ok(out)
}

impl Lexer {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.idx).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.idx + offset).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.idx += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while self.peek().is_some_and(|c| c != '\n') {
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    /// Reads a name made of letters, digits, `_`, `-` and `.`. A trailing
    /// run of dots is left in the input: it terminates the statement.
    fn name(&mut self) -> String {
        let start = self.idx;
        let mut end = start;
        while self.chars.get(end).copied().is_some_and(is_name_char) {
            end += 1;
        }
        while end > start && self.chars[end - 1] == '.' {
            end -= 1;
        }
        let s: String = self.chars[start..end].iter().collect();
        self.idx = end;
        self.col += end - start;
        s
    }

    fn syntax(pos: Pos, msg: impl Into<String>) -> SyntaxError {
        SyntaxError::Syntax { line: pos.line, col: pos.col, message: msg.into() }
    }

    fn unsupported(pos: Pos, feature: &str) -> SyntaxError {
        SyntaxError::Unsupported { line: pos.line, col: pos.col, feature: feature.into() }
    }

    fn next_token(&mut self) -> Result<Option<Token>, SyntaxError> {
        self.skip_trivia();
        let pos = Pos { line: self.line, col: self.col };
        let Some(c) = self.peek() else { return Ok(None) };
        let tok = match c {
            '<' => {
                self.bump();
                let mut iri = String::new();
                loop {
                    match self.bump() {
                        Some('>') => break,
                        Some(c) if c.is_whitespace() || c == '<' || c == '"' || c == '{' || c == '}' => {
                            return Err(Self::syntax(pos, format!("invalid character {c:?} in IRI")))
                        }
                        Some(c) => iri.push(c),
                        None => return Err(Self::syntax(pos, "unterminated IRI")),
                    }
                }
                Tok::IriRef(iri)
            }
            '"' => {
                if self.peek_at(1) == Some('"') && self.peek_at(2) == Some('"') {
                    return Err(Self::unsupported(pos, "long string literal"));
                }
                self.bump();
                Tok::Str(self.string_body(pos)?)
            }
            '\'' => return Err(Self::unsupported(pos, "single-quoted string literal")),
            '?' | '$' => {
                self.bump();
                let mut name = String::new();
                while let Some(c) = self.peek().filter(|c| c.is_alphanumeric() || *c == '_') {
                    name.push(c);
                    self.bump();
                }
                if name.is_empty() {
                    Tok::Punct(c)
                } else {
                    Tok::Var(name)
                }
            }
            '@' => {
                self.bump();
                let mut word = String::new();
                while let Some(c) = self.peek().filter(|c| c.is_ascii_alphanumeric() || *c == '-') {
                    word.push(c);
                    self.bump();
                }
                if word.is_empty() {
                    return Err(Self::syntax(pos, "expected a directive or language tag after '@'"));
                }
                Tok::At(word)
            }
            '^' if self.peek_at(1) == Some('^') => {
                self.bump();
                self.bump();
                Tok::DoubleCaret
            }
            '_' if self.peek_at(1) == Some(':') => {
                self.bump();
                self.bump();
                let label = self.name();
                if label.is_empty() {
                    return Err(Self::syntax(pos, "empty blank node label"));
                }
                Tok::Blank(label)
            }
            ':' => {
                self.bump();
                Tok::PName { prefix: String::new(), local: self.name() }
            }
            c if c.is_ascii_digit() => {
                let mut n = String::new();
                while let Some(c) = self.peek().filter(|c| c.is_ascii_digit() || *c == '.' || *c == 'e' || *c == 'E') {
                    if c == '.' && !self.peek_at(1).is_some_and(|d| d.is_ascii_digit()) {
                        break;
                    }
                    n.push(c);
                    self.bump();
                }
                Tok::Number(n)
            }
            c if c.is_alphabetic() || c == '_' => {
                let word = self.name();
                if self.peek() == Some(':') && !word.ends_with('-') {
                    self.bump();
                    Tok::PName { prefix: word, local: self.name() }
                } else {
                    Tok::Word(word)
                }
            }
            c => {
                self.bump();
                Tok::Punct(c)
            }
        };
        Ok(Some(Token { tok, pos }))
    }

    fn string_body(&mut self, pos: Pos) -> Result<String, SyntaxError> {
        let mut s = String::new();
        loop {
            match self.bump() {
                Some('"') => return Ok(s),
                Some('\\') => {
                    let esc_pos = Pos { line: self.line, col: self.col - 1 };
                    match self.bump() {
                        Some('"') => s.push('"'),
                        Some('\\') => s.push('\\'),
                        Some('n') => s.push('\n'),
                        Some('t') => s.push('\t'),
                        Some('r') => s.push('\r'),
                        Some(other) => {
                            return Err(Self::unsupported(esc_pos, &format!("string escape \\{other}")));
                        }
                        None => return Err(Self::syntax(pos, "unterminated string literal")),
                    }
                }
                Some('\n') | Some('\r') | None => return Err(Self::syntax(pos, "unterminated string literal")),
                Some(c) => s.push(c),
            }
        }
    }
}
