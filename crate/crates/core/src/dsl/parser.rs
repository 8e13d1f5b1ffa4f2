//! Surface syntax trees.

use super::lexer::{Span, Tok};
use super::DslError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ast {
    Name(String),
    Id(Option<String>),
    Raise(Option<String>),
    /// `raise Y t`
    RaiseExc(String, String),
    Empty(String),
    Comp(Vec<Node>),
    Match(Vec<(String, Node)>),
    Case(Box<Node>, Vec<(String, Node)>),
    CaseT(Box<Node>, Box<Node>, Box<Node>),
    CaseE(Box<Node>, Vec<(String, Node)>, Option<String>),
    Handle(Box<Node>, Vec<(String, Node)>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub ast: Ast,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub enum Decl {
    Type(String),
    Fun {
        name: String,
        source: String,
        target: String,
        decoration: Option<String>,
        body: Option<Node>,
    },
    Sum {
        vertex: String,
        summands: Vec<(String, String)>,
    },
    Exception {
        name: String,
        param: String,
    },
    Eq(Node, Node),
}

const KEYWORDS: &[&str] = &[
    "logic", "type", "fun", "sum", "exception", "of", "eq", "case", "handle", "id", "raise", "to",
];

pub struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
    end: Span,
}

impl Parser {
    pub fn new(toks: Vec<(Tok, Span)>) -> Parser {
        let end = toks.last().map(|t| t.1).unwrap_or(Span { line: 1, col: 1 });
        Parser { toks, pos: 0, end }
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub fn span(&self) -> Span {
        self.toks.get(self.pos).map(|t| t.1).unwrap_or(self.end)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn peek_at(&self, n: usize) -> Option<&Tok> {
        self.toks.get(self.pos + n).map(|t| &t.0)
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, DslError> {
        Err(DslError::syntax(self.span(), msg.into()))
    }

    fn found(&self) -> String {
        self.peek().map(|t| t.describe()).unwrap_or_else(|| "end of input".into())
    }

    fn expect(&mut self, t: Tok) -> Result<(), DslError> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {}, found {}", t.describe(), self.found()))
        }
    }

    fn eat(&mut self, t: Tok) -> bool {
        if self.peek() == Some(&t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), DslError> {
        if self.is_kw(kw) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected `{kw}`, found {}", self.found()))
        }
    }

    /// An identifier that is not a keyword.
    pub fn ident(&mut self) -> Result<String, DslError> {
        match self.peek() {
            Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.err(format!("expected a name, found {}", self.found())),
        }
    }

    pub fn header(&mut self) -> Result<String, DslError> {
        self.keyword("logic")?;
        let l = self.ident()?;
        self.expect(Tok::Semi)?;
        Ok(l)
    }

    pub fn decl(&mut self) -> Result<(Decl, Span), DslError> {
        let span = self.span();
        let d = match self.peek() {
            Some(Tok::Ident(s)) => match s.as_str() {
                "type" => {
                    self.pos += 1;
                    Decl::Type(self.ident()?)
                }
                "fun" => {
                    self.pos += 1;
                    let name = self.ident()?;
                    self.expect(Tok::Colon)?;
                    let source = self.ident()?;
                    self.expect(Tok::Arrow)?;
                    let target = self.ident()?;
                    let decoration = match self.peek() {
                        Some(Tok::Ident(s)) if s.starts_with('@') => {
                            let d = s[1..].to_string();
                            self.pos += 1;
                            Some(d)
                        }
                        _ => None,
                    };
                    let body = if self.eat(Tok::Eq) { Some(self.term()?) } else { None };
                    Decl::Fun {
                        name,
                        source,
                        target,
                        decoration,
                        body,
                    }
                }
                "sum" => {
                    self.pos += 1;
                    let vertex = self.ident()?;
                    self.expect(Tok::Eq)?;
                    let mut summands = Vec::new();
                    if self.peek() == Some(&Tok::Ident("0".into())) && self.peek_at(1) == Some(&Tok::Semi) {
                        self.pos += 1;
                    } else {
                        loop {
                            let c = self.ident()?;
                            self.expect(Tok::Colon)?;
                            let t = self.ident()?;
                            summands.push((c, t));
                            if !self.eat(Tok::Plus) {
                                break;
                            }
                        }
                    }
                    Decl::Sum { vertex, summands }
                }
                "exception" => {
                    self.pos += 1;
                    let name = self.ident()?;
                    self.keyword("of")?;
                    let param = self.ident()?;
                    Decl::Exception { name, param }
                }
                "eq" => {
                    self.pos += 1;
                    let (l, r) = self.equation()?;
                    Decl::Eq(l, r)
                }
                _ => return self.err(format!("expected a declaration, found {}", self.found())),
            },
            _ => return self.err(format!("expected a declaration, found {}", self.found())),
        };
        self.expect(Tok::Semi)?;
        Ok((d, span))
    }

    pub fn equation(&mut self) -> Result<(Node, Node), DslError> {
        let l = self.term()?;
        self.expect(Tok::EqEq)?;
        let r = self.term()?;
        Ok((l, r))
    }

    pub fn term(&mut self) -> Result<Node, DslError> {
        let span = self.span();
        let mut items = vec![self.handled()?];
        while self.eat(Tok::Dot) {
            items.push(self.handled()?);
        }
        if items.len() == 1 {
            return Ok(items.pop().unwrap());
        }
        Ok(Node {
            ast: Ast::Comp(items),
            span,
        })
    }

    fn handled(&mut self) -> Result<Node, DslError> {
        let mut t = self.primary()?;
        while self.is_kw("handle") {
            let span = self.span();
            self.pos += 1;
            let bs = self.exc_branches()?;
            t = Node {
                ast: Ast::Handle(Box::new(t), bs),
                span,
            };
        }
        Ok(t)
    }

    fn ty_arg(&mut self) -> Result<String, DslError> {
        self.expect(Tok::LParen)?;
        let t = self.ident()?;
        self.expect(Tok::RParen)?;
        Ok(t)
    }

    fn primary(&mut self) -> Result<Node, DslError> {
        let span = self.span();
        let node = |ast| Ok(Node { ast, span });
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Some(Tok::LBrack) => {
                self.pos += 1;
                if self.eat(Tok::RBrack) {
                    let y = self.ty_arg()?;
                    return node(Ast::Empty(y));
                }
                let bs = self.branches()?;
                self.expect(Tok::RBrack)?;
                node(Ast::Match(bs))
            }
            Some(Tok::Ident(s)) => match s.as_str() {
                "id" => {
                    self.pos += 1;
                    if self.peek() == Some(&Tok::LParen) {
                        let y = self.ty_arg()?;
                        node(Ast::Id(Some(y)))
                    } else {
                        node(Ast::Id(None))
                    }
                }
                "raise" => {
                    self.pos += 1;
                    match self.peek() {
                        Some(Tok::LParen) => {
                            let y = self.ty_arg()?;
                            node(Ast::Raise(Some(y)))
                        }
                        Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()) => {
                            let y = self.ident()?;
                            let e = self.ident()?;
                            node(Ast::RaiseExc(y, e))
                        }
                        _ => node(Ast::Raise(None)),
                    }
                }
                "case" => {
                    self.pos += 1;
                    let flavor = if self.eat(Tok::Caret) { Some(self.ident_any()?) } else { None };
                    let scrut = Box::new(self.term()?);
                    self.keyword("of")?;
                    match flavor.as_deref() {
                        None => {
                            self.expect(Tok::LBrack)?;
                            let bs = self.branches()?;
                            self.expect(Tok::RBrack)?;
                            node(Ast::Case(scrut, bs))
                        }
                        Some("t") => {
                            self.expect(Tok::LBrack)?;
                            self.keyword("id")?;
                            self.expect(Tok::FatArrow)?;
                            let f1 = self.term()?;
                            self.expect(Tok::Bar)?;
                            self.keyword("raise")?;
                            self.expect(Tok::FatArrow)?;
                            let f0 = self.term()?;
                            self.expect(Tok::RBrack)?;
                            node(Ast::CaseT(scrut, Box::new(f1), Box::new(f0)))
                        }
                        Some("e") => {
                            let bs = self.exc_branches()?;
                            let to = if self.is_kw("to") {
                                self.pos += 1;
                                Some(self.ident()?)
                            } else {
                                None
                            };
                            node(Ast::CaseE(scrut, bs, to))
                        }
                        Some(other) => self.err(format!("unknown case form `case^{other}`")),
                    }
                }
                _ => {
                    let n = self.ident()?;
                    node(Ast::Name(n))
                }
            },
            _ => self.err(format!("expected a term, found {}", self.found())),
        }
    }

    fn ident_any(&mut self) -> Result<String, DslError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.err(format!("expected a name, found {}", self.found())),
        }
    }

    fn label(&mut self) -> Result<String, DslError> {
        self.ident_any()
    }

    fn branches(&mut self) -> Result<Vec<(String, Node)>, DslError> {
        let mut out = Vec::new();
        loop {
            let l = self.label()?;
            self.expect(Tok::FatArrow)?;
            out.push((l, self.term()?));
            if !self.eat(Tok::Bar) {
                return Ok(out);
            }
        }
    }

    fn exc_branches(&mut self) -> Result<Vec<(String, Node)>, DslError> {
        self.expect(Tok::LBrack)?;
        let mut out = Vec::new();
        if self.eat(Tok::RBrack) {
            return Ok(out);
        }
        loop {
            let l = self.label()?;
            self.expect(Tok::FatArrow)?;
            out.push((l, self.term()?));
            if !self.eat(Tok::Comma) {
                break;
            }
        }
        self.expect(Tok::RBrack)?;
        Ok(out)
    }
}
