use super::formula::{Formula, SchemaVar};
use super::lexer::{tokenize, Tok, Token};
use super::signature::{is_var_spelling, Signature};
use crate::error::{Error, Result};

/// Token cursor used by the formula parser and the block DSL.
pub struct Cursor {
    toks: Vec<Token>,
    pos: usize,
    end: (usize, usize),
}

impl Cursor {
    pub fn new(text: &str) -> Result<Self> {
        let toks = tokenize(text)?;
        let end = text.lines().enumerate().last().map_or((1, 1), |(i, l)| (i + 1, l.len() + 1));
        Ok(Cursor { toks, pos: 0, end })
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    pub fn peek_at(&self, ahead: usize) -> Option<&Tok> {
        self.toks.get(self.pos + ahead).map(|t| &t.tok)
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    /// Location of the next token, or of the end of input.
    pub fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map_or(self.end, |t| (t.line, t.col))
    }

    pub fn error(&self, msg: impl Into<String>) -> Error {
        let (line, col) = self.here();
        Error::syntax(line, col, msg)
    }

    fn unexpected(&self, wanted: &str) -> Error {
        match self.peek() {
            Some(t) => self.error(format!("expected {wanted}, found {}", t.describe())),
            None => self.error(format!("expected {wanted}, found end of input")),
        }
    }

    pub fn advance(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.tok.clone());
        self.pos += 1;
        t
    }

    pub fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, tok: &Tok) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    pub fn ident(&mut self) -> Result<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.unexpected("identifier")),
        }
    }

    pub fn eat_keyword(&mut self, kw: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Ident(s)) if s == kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn keyword(&mut self, kw: &str) -> Result<()> {
        if self.eat_keyword(kw) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{kw}`")))
        }
    }

    pub fn number(&mut self) -> Result<u64> {
        match self.peek() {
            Some(Tok::Number(n)) => {
                let n = *n;
                self.pos += 1;
                Ok(n)
            }
            _ => Err(self.unexpected("number")),
        }
    }

    pub fn string(&mut self) -> Result<String> {
        match self.peek() {
            Some(Tok::Str(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.unexpected("string")),
        }
    }

    pub fn finish(&self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    pub fn formula(&mut self, sig: &Signature) -> Result<Formula> {
        let (line, col) = self.here();
        let name = self.ident()?;
        if is_var_spelling(&name) {
            let index: u64 =
                name[1..].parse().map_err(|_| Error::syntax(line, col, format!("variable `{name}` out of range")))?;
            return Ok(Formula::Var(SchemaVar::new(index)));
        }
        let mut args = Vec::new();
        if self.eat(&Tok::LParen) {
            loop {
                args.push(self.formula(sig)?);
                if self.eat(&Tok::RParen) {
                    break;
                }
                self.expect(&Tok::Comma)?;
            }
        }
        match sig.lookup(&name, args.len()) {
            Some(sym) => Ok(Formula::app(sym.clone(), args)),
            None => {
                let arities = sig.arities_of(&name);
                if arities.is_empty() {
                    Err(Error::UnknownSymbol(format!("`{name}` at {line}:{col}")))
                } else {
                    Err(Error::Arity(format!(
                        "`{name}` at {line}:{col} has arity {arities:?}, applied to {} argument(s)",
                        args.len()
                    )))
                }
            }
        }
    }
}

/// Parses one formula in the prefix grammar over `sig`.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula> {
    let mut c = Cursor::new(text)?;
    let f = c.formula(sig)?;
    c.finish()?;
    Ok(f)
}

/// A premise set: formulas separated by `,` or `;`, optionally inside
/// braces. Empty input is the empty set.
pub fn parse_formula_set(text: &str, sig: &Signature) -> Result<Vec<Formula>> {
    let mut c = Cursor::new(text)?;
    let braced = c.eat(&Tok::LBrace);
    let mut out = Vec::new();
    loop {
        if c.at_end() || (braced && c.peek() == Some(&Tok::RBrace)) {
            break;
        }
        out.push(c.formula(sig)?);
        if !c.eat(&Tok::Comma) && !c.eat(&Tok::Semi) {
            break;
        }
    }
    if braced {
        c.expect(&Tok::RBrace)?;
    }
    c.finish()?;
    Ok(out)
}
