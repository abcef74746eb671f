use super::{Diagnostic, Pos};

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Colon,
    Semi,
    Dot,
    Ellipsis,
    /// `=` on its own (binding or equality).
    Assign,
    Op(&'static str),
    Ident(String),
    Num(String),
    Str(String),
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
    pub start: usize,
    pub end: usize,
}

/// Words allowed to contain a hyphen.
const HYPHENATED: &[&str] = &[
    "set-logic",
    "set-algebra",
    "set-type",
    "set-option",
    "declare-predicate",
    "declare-function",
    "declare-weight",
    "declare-data",
    "declare-measure",
    "count-conditional",
    "PL-MIN",
    "FOL-FIN",
    "learn-then-infer",
];

pub fn lex(src: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let mut out = Vec::new();
    let mut diags = Vec::new();
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut i = 0;
    let (mut line, mut col) = (1usize, 1usize);
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, n: usize| {
        for _ in 0..n {
            if let Some((_, c)) = chars.get(*i) {
                if *c == '\n' {
                    *line += 1;
                    *col = 1;
                } else {
                    *col += 1;
                }
            }
            *i += 1;
        }
    };
    let byte = |i: usize| chars.get(i).map(|(b, _)| *b).unwrap_or(src.len());
    while i < chars.len() {
        let c = chars[i].1;
        let next = chars.get(i + 1).map(|x| x.1);
        let pos = Pos { line, col };
        let start = byte(i);
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, 1);
            continue;
        }
        if c == '/' && next == Some('*') {
            let mut j = i + 2;
            while j < chars.len() && !(chars[j].1 == '*' && chars.get(j + 1).map(|x| x.1) == Some('/')) {
                j += 1;
            }
            if j >= chars.len() {
                diags.push(Diagnostic::new(pos, "unterminated comment"));
                let n = chars.len() - i;
                advance(&mut i, &mut line, &mut col, n);
            } else {
                let n = j + 2 - i;
                advance(&mut i, &mut line, &mut col, n);
            }
            continue;
        }
        let mut push = |tok: Tok, n: usize, i: &mut usize, line: &mut usize, col: &mut usize| {
            advance(i, line, col, n);
            out.push(Token { tok, pos, start, end: byte(*i) });
        };
        let rest: String = chars[i..chars.len().min(i + 3)].iter().map(|x| x.1).collect();
        if rest.starts_with("<=>") {
            push(Tok::Op("<=>"), 3, &mut i, &mut line, &mut col);
        } else if rest.starts_with("...") {
            push(Tok::Ellipsis, 3, &mut i, &mut line, &mut col);
        } else if let Some(op) = ["==", "!=", "<=", ">=", "=>"].iter().find(|op| rest.starts_with(**op)) {
            push(Tok::Op(op), 2, &mut i, &mut line, &mut col);
        } else if c.is_ascii_digit() || (c == '.' && next.is_some_and(|n| n.is_ascii_digit())) {
            let mut j = i;
            let take_digits = |j: &mut usize| {
                while *j < chars.len() && chars[*j].1.is_ascii_digit() {
                    *j += 1;
                }
            };
            take_digits(&mut j);
            if j < chars.len() && chars[j].1 == '.' && chars.get(j + 1).is_some_and(|x| x.1.is_ascii_digit()) {
                j += 1;
                take_digits(&mut j);
            }
            if j < chars.len() && chars[j].1 == '/' && chars.get(j + 1).is_some_and(|x| x.1.is_ascii_digit()) {
                j += 1;
                take_digits(&mut j);
            }
            let text: String = chars[i..j].iter().map(|x| x.1).collect();
            push(Tok::Num(text), j - i, &mut i, &mut line, &mut col);
        } else if c.is_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].1.is_alphanumeric() || chars[j].1 == '_') {
                j += 1;
            }
            let mut word: String = chars[i..j].iter().map(|x| x.1).collect();
            loop {
                if j < chars.len() && chars[j].1 == '-' && chars.get(j + 1).is_some_and(|x| x.1.is_alphabetic()) {
                    let mut k = j + 1;
                    while k < chars.len() && (chars[k].1.is_alphanumeric() || chars[k].1 == '_') {
                        k += 1;
                    }
                    let longer: String = chars[i..k].iter().map(|x| x.1).collect();
                    if HYPHENATED.iter().any(|h| h.starts_with(&longer) && (h.len() == longer.len() || h.as_bytes()[longer.len()] == b'-')) {
                        word = longer;
                        j = k;
                        continue;
                    }
                }
                break;
            }
            push(Tok::Ident(word), j - i, &mut i, &mut line, &mut col);
        } else if c == '"' {
            let mut j = i + 1;
            while j < chars.len() && chars[j].1 != '"' && chars[j].1 != '\n' {
                j += 1;
            }
            if j >= chars.len() || chars[j].1 != '"' {
                diags.push(Diagnostic::new(pos, "unterminated string"));
                let n = j - i;
                advance(&mut i, &mut line, &mut col, n);
            } else {
                let text: String = chars[i + 1..j].iter().map(|x| x.1).collect();
                push(Tok::Str(text), j + 1 - i, &mut i, &mut line, &mut col);
            }
        } else {
            let tok = match c {
                '(' => Some(Tok::LParen),
                ')' => Some(Tok::RParen),
                '{' => Some(Tok::LBrace),
                '}' => Some(Tok::RBrace),
                '[' => Some(Tok::LBracket),
                ']' => Some(Tok::RBracket),
                ',' => Some(Tok::Comma),
                ':' => Some(Tok::Colon),
                ';' => Some(Tok::Semi),
                '.' => Some(Tok::Dot),
                '=' => Some(Tok::Assign),
                '<' => Some(Tok::Op("<")),
                '>' => Some(Tok::Op(">")),
                '+' => Some(Tok::Op("+")),
                '-' => Some(Tok::Op("-")),
                '*' | '·' | '×' => Some(Tok::Op("*")),
                '¬' => Some(Tok::Ident("not".into())),
                '∧' => Some(Tok::Ident("and".into())),
                '∨' => Some(Tok::Ident("or".into())),
                '⇒' | '→' => Some(Tok::Op("=>")),
                '≡' | '⇔' | '↔' => Some(Tok::Op("<=>")),
                '≤' => Some(Tok::Op("<=")),
                '≥' => Some(Tok::Op(">=")),
                '≠' => Some(Tok::Op("!=")),
                _ => None,
            };
            match tok {
                Some(t) => push(t, 1, &mut i, &mut line, &mut col),
                None => {
                    diags.push(Diagnostic::new(pos, format!("unexpected character `{c}`")));
                    advance(&mut i, &mut line, &mut col, 1);
                }
            }
        }
    }
    (out, diags)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        let (t, d) = lex(s);
        assert!(d.is_empty(), "{d:?}");
        t.into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn keywords_and_minus() {
        assert_eq!(
            toks("(set-logic QF_LIA;PL) s3-s2"),
            vec![
                Tok::LParen,
                Tok::Ident("set-logic".into()),
                Tok::Ident("QF_LIA".into()),
                Tok::Semi,
                Tok::Ident("PL".into()),
                Tok::RParen,
                Tok::Ident("s3".into()),
                Tok::Op("-"),
                Tok::Ident("s2".into()),
            ]
        );
    }

    #[test]
    fn numbers_and_ranges() {
        assert_eq!(
            toks("{1,...,10} 3/10 0.6 .5"),
            vec![
                Tok::LBrace,
                Tok::Num("1".into()),
                Tok::Comma,
                Tok::Ellipsis,
                Tok::Comma,
                Tok::Num("10".into()),
                Tok::RBrace,
                Tok::Num("3/10".into()),
                Tok::Num("0.6".into()),
                Tok::Num(".5".into()),
            ]
        );
    }

    #[test]
    fn comments_and_positions() {
        let (t, d) = lex("/* x\n y */\n  p");
        assert!(d.is_empty());
        assert_eq!(t[0].pos, Pos { line: 3, col: 3 });
        let (_, d) = lex("p $ q");
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].pos, Pos { line: 1, col: 3 });
    }
}
