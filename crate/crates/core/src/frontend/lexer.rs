use std::fmt;

use num_bigint::BigInt;

use super::ParseError;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Tok {
    Int(BigInt),
    Atom(String),
    Var(String),
    /// Unquoted lowercase words: `case`, `let`, `clos`, ...
    Keyword(String),
    Arrow,
    FatArrow,
    Eq,
    Pipe,
    Slash,
    Colon,
    Comma,
    Semi,
    Hash,
    Tilde,
    LParen,
    RParen,
    LAngle,
    RAngle,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(i) => write!(f, "integer {i}"),
            Tok::Atom(a) => write!(f, "atom '{a}'"),
            Tok::Var(x) => write!(f, "variable {x}"),
            Tok::Keyword(k) => write!(f, "'{k}'"),
            Tok::Eof => f.write_str("end of input"),
            other => write!(f, "'{}'", other.symbol()),
        }
    }
}

impl Tok {
    pub fn symbol(&self) -> &'static str {
        match self {
            Tok::Arrow => "->",
            Tok::FatArrow => "=>",
            Tok::Eq => "=",
            Tok::Pipe => "|",
            Tok::Slash => "/",
            Tok::Colon => ":",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::Hash => "#",
            Tok::Tilde => "~",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LAngle => "<",
            Tok::RAngle => ">",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            _ => "?",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

fn error(pos: Pos, message: impl Into<String>) -> ParseError {
    ParseError::Lex {
        line: pos.line,
        column: pos.column,
        message: message.into(),
    }
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let (mut line, mut col) = (1, 1);

    // Advances over `n` characters, keeping line and column current.
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, n: usize| {
        for _ in 0..n {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        }
    };

    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column: col };
        let next = chars.get(i + 1).copied();
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, 1);
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut col, 1);
            }
            continue;
        }
        let (tok, len) = match c {
            '-' if next == Some('|') => {
                return Err(error(
                    pos,
                    "annotations are not supported; strip annotations upstream",
                ))
            }
            '-' if next == Some('>') => (Tok::Arrow, 2),
            '=' if next == Some('>') => (Tok::FatArrow, 2),
            '-' | '0'..='9' => {
                let start = i;
                let mut j = if c == '-' { i + 1 } else { i };
                if !chars.get(j).is_some_and(char::is_ascii_digit) {
                    return Err(error(pos, "expected a digit after '-'"));
                }
                while chars.get(j).is_some_and(char::is_ascii_digit) {
                    j += 1;
                }
                let text: String = chars[start..j].iter().collect();
                let n: BigInt = text.parse().expect("digits form an integer");
                (Tok::Int(n), j - start)
            }
            '\'' => {
                let mut j = i + 1;
                let mut text = String::new();
                loop {
                    match chars.get(j) {
                        None => return Err(error(pos, "unterminated atom")),
                        Some('\'') => break,
                        Some('\\') => {
                            let esc = match chars.get(j + 1) {
                                Some('\\') => '\\',
                                Some('\'') => '\'',
                                Some('n') => '\n',
                                Some('t') => '\t',
                                _ => return Err(error(pos, "unknown escape in atom")),
                            };
                            text.push(esc);
                            j += 2;
                        }
                        Some(&ch) => {
                            text.push(ch);
                            j += 1;
                        }
                    }
                }
                (Tok::Atom(text), j + 1 - i)
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut j = i;
                while chars
                    .get(j)
                    .is_some_and(|ch| ch.is_alphanumeric() || *ch == '_' || *ch == '@')
                {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                let tok = if c.is_uppercase() || c == '_' {
                    Tok::Var(word)
                } else {
                    Tok::Keyword(word)
                };
                (tok, j - i)
            }
            '=' => (Tok::Eq, 1),
            '|' => (Tok::Pipe, 1),
            '/' => (Tok::Slash, 1),
            ':' => (Tok::Colon, 1),
            ',' => (Tok::Comma, 1),
            ';' => (Tok::Semi, 1),
            '#' => (Tok::Hash, 1),
            '~' => (Tok::Tilde, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '<' => (Tok::LAngle, 1),
            '>' => (Tok::RAngle, 1),
            '[' => (Tok::LBracket, 1),
            ']' => (Tok::RBracket, 1),
            '{' => (Tok::LBrace, 1),
            '}' => (Tok::RBrace, 1),
            other => return Err(error(pos, format!("unexpected character {other:?}"))),
        };
        out.push(Token { tok, pos });
        advance(&mut i, &mut line, &mut col, len);
    }
    out.push(Token {
        tok: Tok::Eof,
        pos: Pos { line, column: col },
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn arrows_and_negative_numbers() {
        assert_eq!(
            toks("X -> -12 => 3"),
            [
                Tok::Var("X".into()),
                Tok::Arrow,
                Tok::Int((-12).into()),
                Tok::FatArrow,
                Tok::Int(3.into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn atoms_with_escapes() {
        assert_eq!(toks(r"'it\'s'"), [Tok::Atom("it's".into()), Tok::Eof]);
        assert!(tokenize("'open").is_err());
    }

    #[test]
    fn comments_and_positions() {
        let t = tokenize("% note\n  case").unwrap();
        assert_eq!(t[0].tok, Tok::Keyword("case".into()));
        assert_eq!(t[0].pos, Pos { line: 2, column: 3 });
    }

    #[test]
    fn annotations_are_rejected() {
        let err = tokenize("( 'a' -| ['x'] )").unwrap_err();
        assert!(err.to_string().contains("strip annotations upstream"));
    }

    #[test]
    fn underscore_names_are_variables() {
        assert_eq!(
            toks("_0 _"),
            [Tok::Var("_0".into()), Tok::Var("_".into()), Tok::Eof]
        );
    }
}
