//! Recursive-descent parser producing unresolved blocks.
//!
//! A syntax error abandons the current block and resumes at the next
//! top-level keyword, so one document can report several independent errors.

use crate::typeside::{Predicate, Value};

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::source::{Diagnostic, SourceDocument, Span};

const TOP: [&str; 4] = ["schema", "instance", "extension", "query"];
const SCHEMA_SECTIONS: [&str; 4] = ["entities", "foreign_keys", "attributes", "constraints"];
const EXTENSION_SECTIONS: [&str; 3] = ["include", "identify", "constraints"];
const RESERVED: [&str; 4] = ["forall", "exists", "where", "and"];
const MAX_DEPTH: usize = 64;

type PResult<T> = Result<T, ()>;

pub fn parse_blocks(doc: &SourceDocument) -> (Vec<RawBlock>, Vec<Diagnostic>) {
    let mut diags = Vec::new();
    let toks = tokenize(doc, &mut diags);
    let mut p = Parser {
        doc,
        toks,
        pos: 0,
        diags,
    };
    let blocks = p.document();
    (blocks, p.diags)
}

/// Parses a document holding exactly one constraint.
pub fn parse_constraint_block(doc: &SourceDocument) -> (Option<RawConstraint>, Vec<Diagnostic>) {
    let mut diags = Vec::new();
    let toks = tokenize(doc, &mut diags);
    let mut p = Parser {
        doc,
        toks,
        pos: 0,
        diags,
    };
    let c = p.constraint().ok();
    let c = match c {
        Some(c) if *p.peek() == Tok::Eof => Some(c),
        Some(_) => p.fail("end of input").ok(),
        None => None,
    };
    (c, p.diags)
}

struct Parser<'a> {
    doc: &'a SourceDocument,
    toks: Vec<Token>,
    pos: usize,
    diags: Vec<Diagnostic>,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        &self.toks[(self.pos + n).min(self.toks.len() - 1)].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn prev_span(&self) -> Span {
        self.toks[self.pos.saturating_sub(1)].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn is_one_of(&self, kws: &[&str]) -> bool {
        matches!(self.peek(), Tok::Ident(s) if kws.contains(&s.as_str()))
    }

    fn fail<T>(&mut self, expected: &str) -> PResult<T> {
        let found = self.peek().describe();
        let d = self.doc.error(self.span(), format!("expected {expected}, found {found}"));
        self.diags.push(d);
        Err(())
    }

    fn error_at(&mut self, span: Span, message: impl Into<String>) {
        let d = self.doc.error(span, message);
        self.diags.push(d);
    }

    fn expect(&mut self, tok: Tok) -> PResult<Span> {
        if *self.peek() == tok {
            Ok(self.bump().span)
        } else {
            self.fail(&tok.describe())
        }
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<Span> {
        if self.is_kw(kw) {
            Ok(self.bump().span)
        } else {
            self.fail(&format!("`{kw}`"))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<Name> {
        match self.peek().clone() {
            Tok::Ident(text) if !RESERVED.contains(&text.as_str()) => {
                let span = self.bump().span;
                Ok(Name { text, span })
            }
            _ => self.fail(what),
        }
    }

    /// A plain identifier that is not a section or top-level keyword.
    fn at_item(&self, sections: &[&str]) -> bool {
        matches!(self.peek(), Tok::Ident(s)
            if !sections.contains(&s.as_str()) && !TOP.contains(&s.as_str()) && !RESERVED.contains(&s.as_str()))
    }

    fn document(&mut self) -> Vec<RawBlock> {
        let mut blocks = Vec::new();
        loop {
            let start = self.pos;
            let block = match self.peek() {
                Tok::Eof => break,
                Tok::Ident(k) if k == "schema" => self.schema().map(RawBlock::Schema),
                Tok::Ident(k) if k == "instance" => self.instance().map(RawBlock::Instance),
                Tok::Ident(k) if k == "extension" => self.extension().map(RawBlock::Extension),
                Tok::Ident(k) if k == "query" => self.query().map(RawBlock::Query),
                _ => self.fail("`schema`, `instance`, `extension` or `query`"),
            };
            match block {
                Ok(b) => blocks.push(b),
                Err(()) => self.recover(start),
            }
        }
        blocks
    }

    fn recover(&mut self, start: usize) {
        if self.pos == start {
            self.bump();
        }
        while *self.peek() != Tok::Eof && !self.is_one_of(&TOP) {
            self.bump();
        }
    }

    // ---- schema -----------------------------------------------------------

    fn schema(&mut self) -> PResult<RawSchema> {
        self.expect_kw("schema")?;
        let name = self.ident("a schema name")?;
        self.expect(Tok::LBrace)?;
        let mut s = RawSchema {
            name,
            entities: Vec::new(),
            foreign_keys: Vec::new(),
            attributes: Vec::new(),
            constraints: Vec::new(),
        };
        loop {
            match self.peek().clone() {
                Tok::RBrace => {
                    self.bump();
                    return Ok(s);
                }
                Tok::Ident(k) if k == "entities" => {
                    self.bump();
                    while self.at_item(&SCHEMA_SECTIONS) {
                        s.entities.push(self.ident("an entity name")?);
                    }
                }
                Tok::Ident(k) if k == "foreign_keys" || k == "attributes" => {
                    self.bump();
                    while self.at_item(&SCHEMA_SECTIONS) {
                        let name = self.ident("a member name")?;
                        self.expect(Tok::Colon)?;
                        let source = self.ident("an entity name")?;
                        self.expect(Tok::Arrow)?;
                        let target = self.ident(if k == "attributes" { "a base type" } else { "an entity name" })?;
                        let m = RawMember { name, source, target };
                        if k == "attributes" {
                            s.attributes.push(m);
                        } else {
                            s.foreign_keys.push(m);
                        }
                    }
                }
                Tok::Ident(k) if k == "constraints" => {
                    self.bump();
                    self.constraints(&SCHEMA_SECTIONS, &mut s.constraints)?;
                }
                _ => return self.fail("a schema section or `}`"),
            }
        }
    }

    fn constraints(&mut self, sections: &[&str], out: &mut Vec<RawConstraint>) -> PResult<()> {
        while *self.peek() != Tok::RBrace && *self.peek() != Tok::Eof && !self.is_one_of(sections) {
            out.push(self.constraint()?);
        }
        Ok(())
    }

    // ---- constraints ------------------------------------------------------

    fn constraint(&mut self) -> PResult<RawConstraint> {
        let start = self.span();
        let label = match (self.peek(), self.peek_at(1)) {
            (Tok::Ident(l), Tok::Colon) if !RESERVED.contains(&l.as_str()) => {
                let name = self.ident("a label")?;
                self.bump();
                Some(name)
            }
            _ => None,
        };
        if !self.is_kw("forall") {
            return self.shorthand(label, start);
        }
        self.bump();
        let universals = self.binders()?;
        if universals.is_empty() {
            return self.fail("a variable declaration `x : Entity`");
        }
        let premise = if self.is_kw("where") {
            self.bump();
            self.atoms()?
        } else {
            Vec::new()
        };
        self.expect(Tok::Arrow)?;
        let existentials = if self.is_kw("exists") {
            self.bump();
            let bs = self.binders()?;
            if bs.is_empty() {
                return self.fail("a variable declaration `x : Entity`");
            }
            self.expect_kw("where")?;
            bs
        } else {
            Vec::new()
        };
        let conclusion = self.atoms()?;
        for a in &conclusion {
            if a.pred != Predicate::Eq {
                let span = a.pred_span;
                self.error_at(span, format!("predicate `{}` in a conclusion", a.pred.symbol()));
                return Err(());
            }
        }
        Ok(RawConstraint {
            label,
            universals,
            premise,
            existentials,
            conclusion,
            span: start.to(self.prev_span()),
        })
    }

    /// `Entity.p = Entity.q`, read as `forall x:Entity -> x.p = x.q`.
    fn shorthand(&mut self, label: Option<Name>, start: Span) -> PResult<RawConstraint> {
        let lhs = self.term(0)?;
        let pred_span = self.expect(Tok::Eq)?;
        let rhs = self.term(0)?;
        let (RawTerm::Path { var: l, steps: ls }, RawTerm::Path { var: r, steps: rs }) = (lhs, rhs) else {
            self.error_at(start, "path equations must relate two paths `Entity.p = Entity.q`");
            return Err(());
        };
        if l.text != r.text {
            self.error_at(r.span, format!("both sides must start at `{}`", l.text));
            return Err(());
        }
        let var = |span| Name {
            text: "x".into(),
            span,
        };
        Ok(RawConstraint {
            label,
            universals: vec![RawBinder {
                var: var(l.span),
                entity: l.clone(),
            }],
            premise: Vec::new(),
            existentials: Vec::new(),
            conclusion: vec![RawAtom {
                pred: Predicate::Eq,
                pred_span,
                lhs: RawTerm::Path {
                    var: var(l.span),
                    steps: ls,
                },
                rhs: RawTerm::Path {
                    var: var(r.span),
                    steps: rs,
                },
            }],
            span: start.to(self.prev_span()),
        })
    }

    /// Groups `a b : E` separated by whitespace or commas. A group is only
    /// started when the run of names is followed by `:`.
    fn binders(&mut self) -> PResult<Vec<RawBinder>> {
        let mut out = Vec::new();
        loop {
            let mut i = 0;
            while matches!(self.peek_at(i), Tok::Ident(s) if !RESERVED.contains(&s.as_str())) {
                i += 1;
            }
            if i == 0 || *self.peek_at(i) != Tok::Colon {
                return Ok(out);
            }
            let names: Vec<Name> = (0..i).map(|_| self.ident("a variable")).collect::<PResult<_>>()?;
            self.expect(Tok::Colon)?;
            let entity = self.ident("an entity name")?;
            out.extend(names.into_iter().map(|var| RawBinder {
                var,
                entity: entity.clone(),
            }));
            if *self.peek() == Tok::Comma {
                self.bump();
            }
        }
    }

    fn atoms(&mut self) -> PResult<Vec<RawAtom>> {
        let mut out = vec![self.atom()?];
        while self.is_kw("and") {
            self.bump();
            out.push(self.atom()?);
        }
        Ok(out)
    }

    fn atom(&mut self) -> PResult<RawAtom> {
        let lhs = self.term(0)?;
        let pred = match self.peek() {
            Tok::Eq => Predicate::Eq,
            Tok::Lt => Predicate::Lt,
            Tok::Gt => Predicate::Gt,
            Tok::Le => Predicate::Le,
            Tok::Ge => Predicate::Ge,
            _ => return self.fail("`=`, `<`, `>`, `<=` or `>=`"),
        };
        let pred_span = self.bump().span;
        let rhs = self.term(0)?;
        Ok(RawAtom {
            pred,
            pred_span,
            lhs,
            rhs,
        })
    }

    fn term(&mut self, depth: usize) -> PResult<RawTerm> {
        if depth > MAX_DEPTH {
            return self.fail("a shallower term (nesting limit reached)");
        }
        let span = self.span();
        match self.peek().clone() {
            Tok::Str(s) => {
                self.bump();
                Ok(RawTerm::Lit {
                    value: Value::Str(s),
                    span,
                })
            }
            Tok::Int(i) => {
                self.bump();
                Ok(RawTerm::Lit {
                    value: Value::Int(i),
                    span,
                })
            }
            Tok::Double(x) => {
                self.bump();
                Ok(RawTerm::Lit {
                    value: Value::double(x),
                    span,
                })
            }
            Tok::Ident(s) if (s == "true" || s == "false") && !matches!(self.peek_at(1), Tok::Dot | Tok::LParen) => {
                self.bump();
                Ok(RawTerm::Lit {
                    value: Value::Bool(s == "true"),
                    span,
                })
            }
            Tok::Ident(_) if *self.peek_at(1) == Tok::LParen => {
                let func = self.ident("a function name")?;
                self.bump();
                let mut args = Vec::new();
                if *self.peek() != Tok::RParen {
                    args.push(self.term(depth + 1)?);
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        args.push(self.term(depth + 1)?);
                    }
                }
                let end = self.expect(Tok::RParen)?;
                Ok(RawTerm::App {
                    func,
                    args,
                    span: span.to(end),
                })
            }
            Tok::Ident(_) => {
                let var = self.ident("a variable")?;
                let mut steps = Vec::new();
                while *self.peek() == Tok::Dot {
                    self.bump();
                    steps.push(self.ident("a foreign key or attribute name")?);
                }
                Ok(RawTerm::Path { var, steps })
            }
            _ => self.fail("a term"),
        }
    }

    // ---- instances --------------------------------------------------------

    fn instance(&mut self) -> PResult<RawInstance> {
        self.expect_kw("instance")?;
        let name = self.ident("an instance name")?;
        self.expect(Tok::Colon)?;
        let schema = self.ident("a schema name")?;
        self.expect(Tok::LBrace)?;
        let mut rows = Vec::new();
        while self.is_kw("entity") {
            self.bump();
            let entity = self.ident("an entity name")?;
            self.expect(Tok::LBrace)?;
            while self.is_kw("row") {
                self.bump();
                let id = match self.peek().clone() {
                    Tok::Str(text) => Name {
                        text,
                        span: self.bump().span,
                    },
                    _ => self.ident("a row id")?,
                };
                self.expect(Tok::LBrace)?;
                let mut cells = Vec::new();
                while let Tok::Ident(_) = self.peek() {
                    let member = self.ident("a member name")?;
                    self.expect(Tok::Eq)?;
                    cells.push((member, self.value()?));
                }
                self.expect(Tok::RBrace)?;
                rows.push(RawRow {
                    entity: entity.clone(),
                    id,
                    cells,
                });
            }
            self.expect(Tok::RBrace)?;
        }
        if *self.peek() != Tok::RBrace {
            return self.fail("`entity` or `}`");
        }
        self.bump();
        Ok(RawInstance { name, schema, rows })
    }

    fn value(&mut self) -> PResult<RawValue> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Ident(s) if s == "null" => {
                self.bump();
                Ok(RawValue::Null(span))
            }
            Tok::Ident(text) => {
                self.bump();
                Ok(RawValue::Ident(Name { text, span }))
            }
            Tok::Str(text) => {
                self.bump();
                Ok(RawValue::Str(Name { text, span }))
            }
            Tok::Int(i) => {
                self.bump();
                Ok(RawValue::Number(Value::Int(i), span))
            }
            Tok::Double(x) => {
                self.bump();
                Ok(RawValue::Number(Value::double(x), span))
            }
            Tok::Question => {
                self.bump();
                let label = self.ident("a null label")?;
                Ok(RawValue::Label(Name {
                    text: label.text,
                    span: span.to(label.span),
                }))
            }
            _ => self.fail("a value"),
        }
    }

    // ---- extensions -------------------------------------------------------

    fn extension(&mut self) -> PResult<RawExtension> {
        self.expect_kw("extension")?;
        let name = self.ident("an extension name")?;
        self.expect(Tok::LBrace)?;
        let mut x = RawExtension {
            name,
            includes: Vec::new(),
            identifications: Vec::new(),
            constraints: Vec::new(),
        };
        loop {
            match self.peek().clone() {
                Tok::RBrace => {
                    self.bump();
                    return Ok(x);
                }
                Tok::Ident(k) if k == "include" => {
                    self.bump();
                    while self.at_item(&EXTENSION_SECTIONS) {
                        x.includes.push(self.ident("a schema name")?);
                    }
                }
                Tok::Ident(k) if k == "identify" => {
                    self.bump();
                    while self.at_item(&EXTENSION_SECTIONS) {
                        let left = self.qualified()?;
                        self.expect(Tok::Eq)?;
                        let right = self.qualified()?;
                        x.identifications.push((left, right));
                    }
                }
                Tok::Ident(k) if k == "constraints" => {
                    self.bump();
                    self.constraints(&EXTENSION_SECTIONS, &mut x.constraints)?;
                }
                _ => return self.fail("`include`, `identify`, `constraints` or `}`"),
            }
        }
    }

    fn qualified(&mut self) -> PResult<RawQualified> {
        let schema = self.ident("a schema name")?;
        self.expect(Tok::Dot)?;
        let entity = self.ident("an entity name")?;
        Ok(RawQualified { schema, entity })
    }

    // ---- queries ----------------------------------------------------------

    fn query(&mut self) -> PResult<RawQuery> {
        self.expect_kw("query")?;
        let name = self.ident("a query name")?;
        if *self.peek() == Tok::Eq {
            self.bump();
            if !self.is_kw("simple") {
                return self.fail("`simple` (the only supported query shape)");
            }
            self.bump();
        }
        self.expect(Tok::Colon)?;
        let target = self.ident("an extension name")?;
        self.expect(Tok::LBrace)?;
        let from_span = self.expect_kw("from")?;
        let from = self.binders()?;
        if from.is_empty() {
            self.error_at(from_span, "query has no `from` bindings");
            return Err(());
        }
        let mut atoms = Vec::new();
        if self.is_kw("where") {
            self.bump();
            while !self.is_kw("attributes") && *self.peek() != Tok::RBrace && *self.peek() != Tok::Eof {
                let a = self.atom()?;
                if a.pred != Predicate::Eq {
                    self.error_at(a.pred_span, "queries only support `=` in `where`");
                    return Err(());
                }
                atoms.push(a);
                if self.is_kw("and") {
                    self.bump();
                }
            }
        }
        let mut attributes = Vec::new();
        if self.is_kw("attributes") {
            self.bump();
            while let Tok::Ident(_) = self.peek() {
                let column = self.ident("a column name")?;
                self.expect(Tok::Arrow)?;
                attributes.push((column, self.term(0)?));
            }
        }
        self.expect(Tok::RBrace)?;
        Ok(RawQuery {
            name,
            target,
            from,
            atoms,
            attributes,
        })
    }
}
