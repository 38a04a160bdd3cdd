//! Tokenizer and s-expression reader with line/column tracking.

use super::error::{PddlError, Pos};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SExpr {
    Atom { text: String, pos: Pos },
    List { items: Vec<SExpr>, pos: Pos },
}

impl SExpr {
    pub fn pos(&self) -> Pos {
        match self {
            SExpr::Atom { pos, .. } | SExpr::List { pos, .. } => *pos,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            SExpr::Atom { text, .. } => Some(text),
            SExpr::List { .. } => None,
        }
    }

    pub fn as_list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List { items, .. } => Some(items),
            SExpr::Atom { .. } => None,
        }
    }

    /// The leading keyword of a list, e.g. `and` in `(and ...)`.
    pub fn head(&self) -> Option<&str> {
        self.as_list()
            .and_then(|items| items.first())
            .and_then(SExpr::as_atom)
    }

    pub fn describe(&self) -> String {
        match self {
            SExpr::Atom { text, .. } => format!("`{text}`"),
            SExpr::List { items, .. } => match items.first().and_then(SExpr::as_atom) {
                Some(h) => format!("list `({h} ...)`"),
                None => "list".to_string(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Open(Pos),
    Close(Pos),
    Word(String, Pos),
}

fn tokenize(text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut line = 1;
    let mut col = 1;
    let mut word = String::new();
    let mut word_pos = Pos { line, col };
    let mut in_comment = false;

    let flush = |word: &mut String, pos: Pos, tokens: &mut Vec<Token>| {
        if !word.is_empty() {
            tokens.push(Token::Word(word.to_lowercase(), pos));
            word.clear();
        }
    };

    for ch in text.chars() {
        let here = Pos { line, col };
        if in_comment {
            if ch == '\n' {
                in_comment = false;
            }
        } else {
            match ch {
                ';' => {
                    flush(&mut word, word_pos, &mut tokens);
                    in_comment = true;
                }
                '(' => {
                    flush(&mut word, word_pos, &mut tokens);
                    tokens.push(Token::Open(here));
                }
                ')' => {
                    flush(&mut word, word_pos, &mut tokens);
                    tokens.push(Token::Close(here));
                }
                c if c.is_whitespace() => flush(&mut word, word_pos, &mut tokens),
                c => {
                    if word.is_empty() {
                        word_pos = here;
                    }
                    word.push(c);
                }
            }
        }
        if ch == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
    }
    flush(&mut word, word_pos, &mut tokens);
    tokens
}

fn end_pos(text: &str) -> Pos {
    let line = text.matches('\n').count() + 1;
    let col = text.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    Pos { line, col }
}

/// Reads exactly one top-level s-expression; trailing content is an error.
pub fn read_document(text: &str) -> Result<SExpr, PddlError> {
    let tokens = tokenize(text);
    let eof = end_pos(text);
    let mut idx = 0;
    let expr = read_expr(&tokens, &mut idx, eof)?;
    if expr.as_list().is_none() {
        return Err(PddlError::syntax(expr.pos(), "`(`", &expr.describe()));
    }
    if let Some(tok) = tokens.get(idx) {
        let (pos, found) = match tok {
            Token::Open(p) => (*p, "`(`".to_string()),
            Token::Close(p) => (*p, "`)`".to_string()),
            Token::Word(w, p) => (*p, format!("`{w}`")),
        };
        return Err(PddlError::syntax(pos, "end of input", &found));
    }
    Ok(expr)
}

fn read_expr(tokens: &[Token], idx: &mut usize, eof: Pos) -> Result<SExpr, PddlError> {
    match tokens.get(*idx) {
        None => Err(PddlError::syntax(eof, "`(`", "end of input")),
        Some(Token::Close(p)) => Err(PddlError::syntax(*p, "`(` or identifier", "`)`")),
        Some(Token::Word(w, p)) => {
            *idx += 1;
            Ok(SExpr::Atom {
                text: w.clone(),
                pos: *p,
            })
        }
        Some(Token::Open(p)) => {
            let pos = *p;
            *idx += 1;
            let mut items = Vec::new();
            loop {
                match tokens.get(*idx) {
                    None => return Err(PddlError::syntax(eof, "`)`", "end of input")),
                    Some(Token::Close(_)) => {
                        *idx += 1;
                        return Ok(SExpr::List { items, pos });
                    }
                    Some(_) => items.push(read_expr(tokens, idx, eof)?),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_nested_lists_and_folds_case() {
        let e = read_document("(Define (Domain X) ; note\n (:predicates (P ?A)))").unwrap();
        let items = e.as_list().unwrap();
        assert_eq!(items[0].as_atom(), Some("define"));
        assert_eq!(items[1].head(), Some("domain"));
        assert_eq!(items[2].pos(), Pos { line: 2, col: 2 });
    }

    #[test]
    fn unbalanced_reports_position() {
        let err = read_document("(define (domain d)\n  (:predicates (p)").unwrap_err();
        match err {
            PddlError::Syntax { pos, expected, .. } => {
                assert_eq!(pos.line, 2);
                assert_eq!(expected, "`)`");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn trailing_content_rejected() {
        assert!(matches!(
            read_document("(a) (b)"),
            Err(PddlError::Syntax { .. })
        ));
    }
}
