use super::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Lower(String),
    Upper(String),
    Dollar(String),
    Number(String),
    Distinct(String),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Dot,
    Colon,
    Bang,
    Question,
    Tilde,
    And,
    Or,
    Implies,
    RevImplies,
    Iff,
    Xor,
    Nor,
    Nand,
    Eq,
    Neq,
    Arrow,
    Star,
    /// `!>`, `?*`, `@`, `:=` and friends we only recognise to reject.
    Other(String),
    Eof,
}

#[derive(Clone, Debug)]
pub struct Spanned {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

pub fn tokenize(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            let (l0, c0) = (line, col);
            bump!();
            bump!();
            loop {
                if i >= chars.len() {
                    return Err(ParseError::Syntax { line: l0, col: c0, message: "unterminated comment".into() });
                }
                if chars[i] == '*' && chars.get(i + 1) == Some(&'/') {
                    bump!();
                    bump!();
                    break;
                }
                bump!();
            }
            continue;
        }
        let (l0, c0) = (line, col);
        let push = |out: &mut Vec<Spanned>, tok: Tok| out.push(Spanned { tok, line: l0, col: c0 });

        if c.is_alphabetic() || c == '$' || c == '_' {
            let start = i;
            bump!();
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '$') {
                bump!();
            }
            let word: String = chars[start..i].iter().collect();
            let tok = if c == '$' {
                Tok::Dollar(word)
            } else if c.is_uppercase() || c == '_' {
                Tok::Upper(word)
            } else {
                Tok::Lower(word)
            };
            push(&mut out, tok);
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
                bump!();
            }
            push(&mut out, Tok::Number(chars[start..i].iter().collect()));
            continue;
        }
        if c == '\'' || c == '"' {
            let quote = c;
            bump!();
            let mut s = String::new();
            loop {
                if i >= chars.len() {
                    return Err(ParseError::Syntax { line: l0, col: c0, message: "unterminated quoted name".into() });
                }
                let d = chars[i];
                if d == '\\' && i + 1 < chars.len() {
                    bump!();
                    s.push(chars[i]);
                    bump!();
                    continue;
                }
                bump!();
                if d == quote {
                    break;
                }
                s.push(d);
            }
            push(&mut out, if quote == '\'' { Tok::Lower(s) } else { Tok::Distinct(s) });
            continue;
        }

        let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
        let (tok, len) = if rest.starts_with("<=>") {
            (Tok::Iff, 3)
        } else if rest.starts_with("<~>") {
            (Tok::Xor, 3)
        } else if rest.starts_with("=>") {
            (Tok::Implies, 2)
        } else if rest.starts_with("<=") {
            (Tok::RevImplies, 2)
        } else if rest.starts_with("~|") {
            (Tok::Nor, 2)
        } else if rest.starts_with("~&") {
            (Tok::Nand, 2)
        } else if rest.starts_with("!=") {
            (Tok::Neq, 2)
        } else if rest.starts_with("!>") || rest.starts_with("?*") || rest.starts_with(":=") || rest.starts_with("-->") {
            (Tok::Other(rest.chars().take(2).collect()), 2)
        } else {
            match c {
                '(' => (Tok::LParen, 1),
                ')' => (Tok::RParen, 1),
                '[' => (Tok::LBrack, 1),
                ']' => (Tok::RBrack, 1),
                ',' => (Tok::Comma, 1),
                '.' => (Tok::Dot, 1),
                ':' => (Tok::Colon, 1),
                '!' => (Tok::Bang, 1),
                '?' => (Tok::Question, 1),
                '~' => (Tok::Tilde, 1),
                '&' => (Tok::And, 1),
                '|' => (Tok::Or, 1),
                '=' => (Tok::Eq, 1),
                '>' => (Tok::Arrow, 1),
                '*' => (Tok::Star, 1),
                '@' | '^' | '+' | '{' | '}' => (Tok::Other(c.to_string()), 1),
                _ => {
                    return Err(ParseError::Syntax {
                        line: l0,
                        col: c0,
                        message: format!("unexpected character {c:?}"),
                    })
                }
            }
        };
        for _ in 0..len {
            bump!();
        }
        push(&mut out, tok);
    }
    out.push(Spanned { tok: Tok::Eof, line, col });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operators_and_comments() {
        let toks = tokenize("% hi\nfof(a, axiom, ![X]: (p(X) <=> ~q)). /* c */").unwrap();
        let kinds: Vec<Tok> = toks.into_iter().map(|t| t.tok).collect();
        assert!(kinds.contains(&Tok::Iff));
        assert!(kinds.contains(&Tok::Bang));
        assert_eq!(kinds.last(), Some(&Tok::Eof));
        assert_eq!(kinds[0], Tok::Lower("fof".into()));
    }

    #[test]
    fn positions_are_tracked() {
        let toks = tokenize("\n  p(").unwrap();
        assert_eq!((toks[0].line, toks[0].col), (2, 3));
    }
}
