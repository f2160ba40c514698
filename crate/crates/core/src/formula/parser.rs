use super::{Body, FormulaError, IndexedAtom, QuantifiedFormula, Quantifier, TraceVariable};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Forall,
    Exists,
    True,
    False,
    Next,
    Finally,
    Globally,
    Until,
    WeakUntil,
    Release,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Dot,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::Ident(_) => "identifier",
            Tok::Forall => "forall",
            Tok::Exists => "exists",
            Tok::True => "true",
            Tok::False => "false",
            Tok::Next => "X",
            Tok::Finally => "F",
            Tok::Globally => "G",
            Tok::Until => "U",
            Tok::WeakUntil => "W",
            Tok::Release => "R",
            Tok::Not => "!",
            Tok::And => "&",
            Tok::Or => "|",
            Tok::Implies => "->",
            Tok::Iff => "<->",
            Tok::Dot => ".",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Eof => "<eof>",
        }
    }
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokenize(src: &'a str) -> Result<Vec<(Tok, usize)>, FormulaError> {
        let mut lx = Lexer { src, pos: 0 };
        let mut out = Vec::new();
        loop {
            lx.skip_trivia();
            let start = lx.pos;
            let Some(c) = lx.peek() else {
                out.push((Tok::Eof, start));
                return Ok(out);
            };
            let tok = match c {
                '(' => lx.single(Tok::LParen),
                ')' => lx.single(Tok::RParen),
                '[' => lx.single(Tok::LBracket),
                ']' => lx.single(Tok::RBracket),
                '.' => lx.single(Tok::Dot),
                '!' => lx.single(Tok::Not),
                '&' => lx.single(Tok::And),
                '|' => lx.single(Tok::Or),
                '-' if lx.rest().starts_with("->") => {
                    lx.pos += 2;
                    Tok::Implies
                }
                '<' if lx.rest().starts_with("<->") => {
                    lx.pos += 3;
                    Tok::Iff
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let word = lx.take_while(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'');
                    keyword(word).unwrap_or_else(|| Tok::Ident(word.to_string()))
                }
                other => {
                    return Err(syntax_error(src, start, format!("unexpected character `{other}`")));
                }
            };
            out.push((tok, start));
        }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn single(&mut self, tok: Tok) -> Tok {
        self.pos += 1;
        tok
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> &'a str {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if !pred(c) {
                break;
            }
            self.pos += c.len_utf8();
        }
        &self.src[start..self.pos]
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => self.pos += c.len_utf8(),
                Some('#') => {
                    self.take_while(|c| c != '\n');
                }
                _ => return,
            }
        }
    }
}

fn keyword(word: &str) -> Option<Tok> {
    Some(match word {
        "forall" => Tok::Forall,
        "exists" => Tok::Exists,
        "true" => Tok::True,
        "false" => Tok::False,
        "X" => Tok::Next,
        "F" => Tok::Finally,
        "G" => Tok::Globally,
        "U" => Tok::Until,
        "W" => Tok::WeakUntil,
        "R" => Tok::Release,
        _ => return None,
    })
}

fn syntax_error(src: &str, offset: usize, message: String) -> FormulaError {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    FormulaError::Syntax {
        offset,
        line,
        column,
        message,
    }
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
    at: usize,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn offset(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> FormulaError {
        syntax_error(self.src, self.offset(), message.into())
    }

    fn expect(&mut self, tok: Tok) -> Result<(), FormulaError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected `{}`, found {}", tok.text(), self.peek().describe())))
        }
    }

    fn ident(&mut self) -> Result<String, FormulaError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            other => Err(self.error(format!("expected identifier, found {}", other.describe()))),
        }
    }

    fn prefix(&mut self) -> Result<Vec<(Quantifier, TraceVariable, usize)>, FormulaError> {
        let mut out = Vec::new();
        loop {
            let q = match self.peek() {
                Tok::Forall => Quantifier::Forall,
                Tok::Exists => Quantifier::Exists,
                _ => return Ok(out),
            };
            self.bump();
            let at = self.offset();
            let name = self.ident()?;
            self.expect(Tok::Dot)?;
            out.push((q, TraceVariable(name), at));
        }
    }

    fn iff(&mut self) -> Result<Body, FormulaError> {
        let mut lhs = self.implies()?;
        while *self.peek() == Tok::Iff {
            self.bump();
            let rhs = self.implies()?;
            lhs = Body::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Body, FormulaError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            let rhs = self.implies()?;
            return Ok(Body::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Body, FormulaError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.and()?;
            lhs = Body::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Body, FormulaError> {
        let mut lhs = self.binary_temporal()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.binary_temporal()?;
            lhs = Body::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn binary_temporal(&mut self) -> Result<Body, FormulaError> {
        let lhs = self.unary()?;
        let ctor: fn(Body, Body) -> Body = match self.peek() {
            Tok::Until => Body::until,
            Tok::WeakUntil => Body::weak_until,
            Tok::Release => Body::release,
            _ => return Ok(lhs),
        };
        self.bump();
        let rhs = self.binary_temporal()?;
        Ok(ctor(lhs, rhs))
    }

    fn unary(&mut self) -> Result<Body, FormulaError> {
        let ctor: fn(Body) -> Body = match self.peek() {
            Tok::Not => Body::not,
            Tok::Next => Body::next,
            Tok::Finally => Body::finally,
            Tok::Globally => Body::globally,
            _ => return self.primary(),
        };
        self.bump();
        Ok(ctor(self.unary()?))
    }

    fn primary(&mut self) -> Result<Body, FormulaError> {
        match self.peek().clone() {
            Tok::True => {
                self.bump();
                Ok(Body::True)
            }
            Tok::False => {
                self.bump();
                Ok(Body::False)
            }
            Tok::LParen => {
                self.bump();
                let inner = self.iff()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(ap) => {
                self.bump();
                self.expect(Tok::LBracket)?;
                let var = self.ident()?;
                self.expect(Tok::RBracket)?;
                Ok(Body::Atom(IndexedAtom::new(ap, TraceVariable(var))))
            }
            Tok::Forall | Tok::Exists => {
                Err(self.error("quantifiers are only allowed in the leading prefix"))
            }
            other => Err(self.error(format!("expected a formula, found {}", other.describe()))),
        }
    }

    fn finish(&mut self) -> Result<(), FormulaError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.error(format!("unexpected {}", self.peek().describe())))
        }
    }
}

/// Parses a prenex HyperLTL sentence.
pub fn parse_formula(text: &str) -> Result<QuantifiedFormula, FormulaError> {
    let mut p = Parser {
        src: text,
        toks: Lexer::tokenize(text)?,
        at: 0,
    };
    let prefix = p.prefix()?;
    let body = p.iff()?;
    p.finish()?;
    let prefix: Vec<_> = prefix.into_iter().map(|(q, v, _)| (q, v)).collect();
    QuantifiedFormula::new(prefix, body)
}

/// Parses a quantifier-free body; free trace variables are allowed.
pub fn parse_body(text: &str) -> Result<Body, FormulaError> {
    let mut p = Parser {
        src: text,
        toks: Lexer::tokenize(text)?,
        at: 0,
    };
    let body = p.iff()?;
    p.finish()?;
    Ok(body)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> TraceVariable {
        TraceVariable::new(s).unwrap()
    }

    #[test]
    fn observational_determinism() {
        let f = parse_formula("forall p. forall q. (l[p] <-> l[q]) -> G (o[p] <-> o[q])").unwrap();
        let (p, q) = (v("p"), v("q"));
        assert_eq!(
            f.prefix(),
            &[(Quantifier::Forall, p.clone()), (Quantifier::Forall, q.clone())]
        );
        let expected = Body::implies(
            Body::iff(Body::atom("l", &p), Body::atom("l", &q)),
            Body::globally(Body::iff(Body::atom("o", &p), Body::atom("o", &q))),
        );
        assert_eq!(f.body(), &expected);
    }

    #[test]
    fn smallest_sentence() {
        let f = parse_formula("exists p. true").unwrap();
        assert_eq!(f.prefix(), &[(Quantifier::Exists, v("p"))]);
        assert_eq!(f.body(), &Body::True);
    }

    #[test]
    fn unbound_variable() {
        assert_eq!(
            parse_formula("forall p. a[q]"),
            Err(FormulaError::UnboundVariable("q".into()))
        );
    }

    #[test]
    fn duplicate_quantifier() {
        assert_eq!(
            parse_formula("forall p. exists p. a[p]"),
            Err(FormulaError::DuplicateQuantifier("p".into()))
        );
    }

    #[test]
    fn precedence() {
        let p = v("p");
        let a = || Body::atom("a", &p);
        let b = || Body::atom("b", &p);
        let c = || Body::atom("c", &p);
        assert_eq!(
            parse_body("a[p] | b[p] & c[p]").unwrap(),
            Body::or(a(), Body::and(b(), c()))
        );
        assert_eq!(
            parse_body("a[p] U b[p] W c[p]").unwrap(),
            Body::until(a(), Body::weak_until(b(), c()))
        );
        assert_eq!(
            parse_body("a[p] -> b[p] -> c[p]").unwrap(),
            Body::implies(a(), Body::implies(b(), c()))
        );
        assert_eq!(
            parse_body("a[p] <-> b[p] -> c[p]").unwrap(),
            Body::iff(a(), Body::implies(b(), c()))
        );
        assert_eq!(
            parse_body("!X a[p] U G b[p] & c[p]").unwrap(),
            Body::and(
                Body::until(Body::not(Body::next(a())), Body::globally(b())),
                c()
            )
        );
    }

    #[test]
    fn comments_and_primes() {
        let f = parse_formula("# header\nforall pi. forall pi'. # inline\n G (a[pi] <-> a[pi'])").unwrap();
        assert_eq!(f.variables(), vec![v("pi"), v("pi'")]);
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse_formula("forall p.\n  a[p] & ") {
            Err(FormulaError::Syntax { line, column, .. }) => {
                assert_eq!(line, 2);
                assert_eq!(column, 10);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_formula("forall p. a[p] & exists q. b[q]"),
            Err(FormulaError::Syntax { .. })
        ));
        assert!(matches!(parse_formula("forall p. a[p] $"), Err(FormulaError::Syntax { .. })));
        assert!(matches!(parse_formula("forall p. (a[p]"), Err(FormulaError::Syntax { .. })));
    }

    #[test]
    fn empty_prefix_is_plain_ltl_syntax() {
        // free variables are still rejected for sentences
        assert!(parse_formula("true U false").is_ok());
        assert!(parse_formula("a[p]").is_err());
    }
}
