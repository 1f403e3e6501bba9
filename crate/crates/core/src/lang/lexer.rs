use std::fmt;

use super::ast::SourceLoc;
use super::SyntaxError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Str(String),
    // keywords
    If,
    Else,
    While,
    Do,
    For,
    Break,
    Continue,
    Print,
    True,
    False,
    // punctuation
    LParen,
    RParen,
    LBrace,
    RBrace,
    Semi,
    Comma,
    // operators
    Assign,
    PlusEq,
    MinusEq,
    StarEq,
    PlusPlus,
    MinusMinus,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    Lt,
    Le,
    Gt,
    Ge,
    EqEq,
    Ne,
    AndAnd,
    OrOr,
    Bang,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Tok::*;
        let s = match self {
            Ident(n) => return write!(f, "identifier `{n}`"),
            Int(v) => return write!(f, "integer {v}"),
            Str(_) => "string literal",
            If => "`if`",
            Else => "`else`",
            While => "`while`",
            Do => "`do`",
            For => "`for`",
            Break => "`break`",
            Continue => "`continue`",
            Print => "`print`",
            True => "`true`",
            False => "`false`",
            LParen => "`(`",
            RParen => "`)`",
            LBrace => "`{`",
            RBrace => "`}`",
            Semi => "`;`",
            Comma => "`,`",
            Assign => "`=`",
            PlusEq => "`+=`",
            MinusEq => "`-=`",
            StarEq => "`*=`",
            PlusPlus => "`++`",
            MinusMinus => "`--`",
            Plus => "`+`",
            Minus => "`-`",
            Star => "`*`",
            Slash => "`/`",
            Percent => "`%`",
            Lt => "`<`",
            Le => "`<=`",
            Gt => "`>`",
            Ge => "`>=`",
            EqEq => "`==`",
            Ne => "`!=`",
            AndAnd => "`&&`",
            OrOr => "`||`",
            Bang => "`!`",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub loc: SourceLoc,
}

/// Splits source text into tokens using maximal munch.
pub fn tokenize(source: &str) -> Result<Vec<Token>, SyntaxError> {
    let chars: Vec<char> = source.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let (mut line, mut col) = (1u32, 1u32);

    while i < chars.len() {
        let c = chars[i];
        let loc = SourceLoc { line, col };
        let advance = |n: usize, i: &mut usize, col: &mut u32| {
            *i += n;
            *col += n as u32;
        };

        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            advance(1, &mut i, &mut col);
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += (i - start) as u32;
            let tok = match word.as_str() {
                "if" => Tok::If,
                "else" => Tok::Else,
                "while" => Tok::While,
                "do" => Tok::Do,
                "for" => Tok::For,
                "break" => Tok::Break,
                "continue" => Tok::Continue,
                "print" => Tok::Print,
                "true" => Tok::True,
                "false" => Tok::False,
                _ => Tok::Ident(word),
            };
            out.push(Token { tok, loc });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            col += (i - start) as u32;
            let v = text
                .parse::<i64>()
                .map_err(|_| SyntaxError::new(loc, format!("integer literal {text} out of range")))?;
            out.push(Token { tok: Tok::Int(v), loc });
            continue;
        }
        if c == '"' {
            let mut text = String::new();
            let mut j = i + 1;
            loop {
                match chars.get(j) {
                    None | Some('\n') => {
                        return Err(SyntaxError::new(loc, "unterminated string literal"));
                    }
                    Some('"') => break,
                    Some('\\') => {
                        let esc = match chars.get(j + 1) {
                            Some('"') => '"',
                            Some('\\') => '\\',
                            Some('n') => '\n',
                            Some('t') => '\t',
                            None | Some('\n') => {
                                return Err(SyntaxError::new(loc, "unterminated string literal"))
                            }
                            Some(other) => {
                                return Err(SyntaxError::new(
                                    SourceLoc {
                                        line,
                                        col: col + (j - i) as u32,
                                    },
                                    format!("unknown escape `\\{other}`"),
                                ))
                            }
                        };
                        text.push(esc);
                        j += 2;
                    }
                    Some(ch) => {
                        text.push(*ch);
                        j += 1;
                    }
                }
            }
            advance(j + 1 - i, &mut i, &mut col);
            out.push(Token { tok: Tok::Str(text), loc });
            continue;
        }

        let next = chars.get(i + 1).copied();
        let (tok, len) = match (c, next) {
            ('+', Some('+')) => (Tok::PlusPlus, 2),
            ('+', Some('=')) => (Tok::PlusEq, 2),
            ('-', Some('-')) => (Tok::MinusMinus, 2),
            ('-', Some('=')) => (Tok::MinusEq, 2),
            ('*', Some('=')) => (Tok::StarEq, 2),
            ('<', Some('=')) => (Tok::Le, 2),
            ('>', Some('=')) => (Tok::Ge, 2),
            ('=', Some('=')) => (Tok::EqEq, 2),
            ('!', Some('=')) => (Tok::Ne, 2),
            ('&', Some('&')) => (Tok::AndAnd, 2),
            ('|', Some('|')) => (Tok::OrOr, 2),
            ('+', _) => (Tok::Plus, 1),
            ('-', _) => (Tok::Minus, 1),
            ('*', _) => (Tok::Star, 1),
            ('/', _) => (Tok::Slash, 1),
            ('%', _) => (Tok::Percent, 1),
            ('<', _) => (Tok::Lt, 1),
            ('>', _) => (Tok::Gt, 1),
            ('=', _) => (Tok::Assign, 1),
            ('!', _) => (Tok::Bang, 1),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            ('{', _) => (Tok::LBrace, 1),
            ('}', _) => (Tok::RBrace, 1),
            (';', _) => (Tok::Semi, 1),
            (',', _) => (Tok::Comma, 1),
            _ => return Err(SyntaxError::new(loc, format!("illegal character `{c}`"))),
        };
        advance(len, &mut i, &mut col);
        out.push(Token { tok, loc });
    }
    Ok(out)
}
