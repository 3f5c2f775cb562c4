//! Recursive-descent parser for surface scripts.

use super::ast::*;
use super::lex::{tokenize, Tok, Token};

#[derive(Debug, Clone, thiserror::Error)]
#[error("parse error at {line}:{col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

pub fn parse_script(text: &str) -> Result<Script, ParseError> {
    let toks = tokenize(text).map_err(|e| ParseError {
        line: e.line,
        col: e.col,
        msg: e.msg,
    })?;
    let mut p = Parser { toks, pos: 0 };
    let mut statements = Vec::new();
    loop {
        p.skip_newlines();
        if p.at_end() {
            break;
        }
        let line = p.peek_line();
        let stmt = p.statement()?;
        statements.push(Spanned { node: stmt, line });
        p.expect_newline_or_end()?;
    }
    Ok(Script { statements })
}

impl Parser {
    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek_line(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.line).unwrap_or(0)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos.min(self.toks.len().saturating_sub(1)))
            .map(|t| (t.line, t.col))
            .unwrap_or((0, 0))
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let (line, col) = self.here();
        Err(ParseError {
            line,
            col,
            msg: msg.into(),
        })
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.tok.clone());
        self.pos += 1;
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            match self.peek() {
                Some(got) => self.err(format!("expected {tok}, found {got}")),
                None => self.err(format!("expected {tok}, found end of input")),
            }
        }
    }

    fn skip_newlines(&mut self) {
        while self.eat(&Tok::Newline) {}
    }

    fn expect_newline_or_end(&mut self) -> Result<(), ParseError> {
        if self.at_end() || self.eat(&Tok::Newline) {
            Ok(())
        } else {
            let got = self.peek().unwrap().clone();
            self.err(format!("expected end of statement, found {got}"))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok(s)
            }
            Some(got) => self.err(format!("expected identifier, found {got}")),
            None => self.err("expected identifier, found end of input"),
        }
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if let Some(Tok::Ident(s)) = self.peek() {
            if s == kw {
                self.pos += 1;
                return true;
            }
        }
        false
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.eat_keyword(kw) {
            Ok(())
        } else {
            self.err(format!("expected `{kw}`"))
        }
    }

    fn uint(&mut self) -> Result<i64, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Int(v)) => {
                self.pos += 1;
                Ok(v)
            }
            Some(got) => self.err(format!("expected integer, found {got}")),
            None => self.err("expected integer, found end of input"),
        }
    }

    fn sint(&mut self) -> Result<i64, ParseError> {
        let neg = self.eat(&Tok::Minus);
        let v = self.uint()?;
        Ok(if neg { -v } else { v })
    }

    fn string(&mut self) -> Result<String, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Str(s)) => {
                self.pos += 1;
                Ok(s)
            }
            _ => self.err("expected a quoted string"),
        }
    }

    /// A curve-record name: IDENT or E[IDENT].
    fn curve_name(&mut self) -> Result<String, ParseError> {
        let head = self.ident()?;
        if head == "E" && self.eat(&Tok::LBracket) {
            let pt = self.ident()?;
            self.expect(Tok::RBracket)?;
            Ok(format!("E[{pt}]"))
        } else {
            Ok(head)
        }
    }

    fn curve_name_list(&mut self) -> Result<Vec<String>, ParseError> {
        let mut names = vec![self.curve_name()?];
        while self.eat(&Tok::Comma) {
            names.push(self.curve_name()?);
        }
        Ok(names)
    }

    fn div_atom(&mut self) -> Result<DivAtom, ParseError> {
        let name = self.ident()?;
        match name.as_str() {
            "f" => {
                if self.eat(&Tok::LBracket) {
                    let p = self.ident()?;
                    self.expect(Tok::RBracket)?;
                    Ok(DivAtom::Fiber(Some(p)))
                } else {
                    Ok(DivAtom::Fiber(None))
                }
            }
            "E" => {
                self.expect(Tok::LBracket)?;
                let p = self.ident()?;
                self.expect(Tok::RBracket)?;
                Ok(DivAtom::Exceptional(p))
            }
            "mobile" | "fixed" => {
                self.expect(Tok::LParen)?;
                let class = Box::new(self.div_expr()?);
                self.expect(Tok::Semi)?;
                let candidates = self.curve_name_list()?;
                self.expect(Tok::RParen)?;
                Ok(if name == "mobile" {
                    DivAtom::Mobile { class, candidates }
                } else {
                    DivAtom::Fixed { class, candidates }
                })
            }
            _ => Ok(DivAtom::Name(name)),
        }
    }

    fn div_term(&mut self, sign: i64) -> Result<Option<(i64, DivAtom)>, ParseError> {
        if let Some(Tok::Int(v)) = self.peek().cloned() {
            self.pos += 1;
            if self.eat(&Tok::Star) {
                let atom = self.div_atom()?;
                return Ok(Some((sign * v, atom)));
            }
            if v == 0 {
                return Ok(None); // the zero class
            }
            return self.err("bare integers other than 0 are not divisor classes");
        }
        let atom = self.div_atom()?;
        Ok(Some((sign, atom)))
    }

    fn div_expr(&mut self) -> Result<DivExpr, ParseError> {
        let mut terms = Vec::new();
        let sign = if self.eat(&Tok::Minus) { -1 } else { 1 };
        if let Some(t) = self.div_term(sign)? {
            terms.push(t);
        }
        loop {
            let sign = if self.eat(&Tok::Plus) {
                1
            } else if self.eat(&Tok::Minus) {
                -1
            } else {
                break;
            };
            if let Some(t) = self.div_term(sign)? {
                terms.push(t);
            }
        }
        Ok(DivExpr { terms })
    }

    fn base_atom(&mut self) -> Result<BaseAtom, ParseError> {
        let name = self.ident()?;
        if name == "K" {
            Ok(BaseAtom::K)
        } else {
            Ok(BaseAtom::Name(name))
        }
    }

    fn base_term(&mut self, sign: i64) -> Result<Option<(i64, BaseAtom)>, ParseError> {
        if let Some(Tok::Int(v)) = self.peek().cloned() {
            self.pos += 1;
            if self.eat(&Tok::Star) {
                let atom = self.base_atom()?;
                return Ok(Some((sign * v, atom)));
            }
            if v == 0 {
                return Ok(None);
            }
            return self.err("bare integers other than 0 are not divisor expressions");
        }
        let atom = self.base_atom()?;
        Ok(Some((sign, atom)))
    }

    fn base_expr(&mut self) -> Result<BaseExpr, ParseError> {
        let mut terms = Vec::new();
        let sign = if self.eat(&Tok::Minus) { -1 } else { 1 };
        if let Some(t) = self.base_term(sign)? {
            terms.push(t);
        }
        loop {
            let sign = if self.eat(&Tok::Plus) {
                1
            } else if self.eat(&Tok::Minus) {
                -1
            } else {
                break;
            };
            if let Some(t) = self.base_term(sign)? {
                terms.push(t);
            }
        }
        Ok(BaseExpr { terms })
    }

    fn int_list(&mut self) -> Result<Vec<i64>, ParseError> {
        let mut v = Vec::new();
        loop {
            v.push(self.sint()?);
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        Ok(v)
    }

    fn query(&mut self) -> Result<Query, ParseError> {
        let name = self.ident()?;
        self.expect(Tok::LParen)?;
        let q = match name.as_str() {
            "intersect" => {
                let a = self.div_expr()?;
                self.expect(Tok::Comma)?;
                let b = self.div_expr()?;
                Query::Intersect(a, b)
            }
            "selfint" => Query::SelfInt(self.div_expr()?),
            "pa" => Query::Pa(self.div_expr()?),
            "chi" => Query::Chi(self.div_expr()?),
            "lineq" => {
                let a = self.div_expr()?;
                self.expect(Tok::Comma)?;
                let b = self.div_expr()?;
                Query::LinEq(a, b)
            }
            "numeq" => {
                let a = self.div_expr()?;
                self.expect(Tok::Comma)?;
                let b = self.div_expr()?;
                Query::NumEq(a, b)
            }
            "degree" => Query::Degree(self.base_expr()?),
            "h0_curve" => Query::H0Curve(self.base_expr()?),
            "h1_curve" => Query::H1Curve(self.base_expr()?),
            "rr_curve" => Query::RrCurve(self.base_expr()?),
            "positivity" => Query::Positivity(self.base_expr()?),
            "h0_ruled" => {
                let a = self.sint()?;
                self.expect(Tok::Comma)?;
                let e = self.base_expr()?;
                Query::H0Ruled(a, e)
            }
            "h0_anti_k" => Query::H0AntiK,
            "model" => Query::Model,
            "h0_anti_2k" => Query::H0Anti2K,
            "h0" => Query::H(0, self.div_expr()?),
            "h1" => Query::H(1, self.div_expr()?),
            "h2" => Query::H(2, self.div_expr()?),
            "expected_dim_plane" => {
                let d = self.sint()?;
                let m = if self.eat(&Tok::Comma) {
                    self.int_list()?
                } else {
                    vec![]
                };
                Query::ExpectedDimPlane(d, m)
            }
            "plane_count" => {
                let d = self.sint()?;
                let m = if self.eat(&Tok::Comma) {
                    self.int_list()?
                } else {
                    vec![]
                };
                Query::PlaneCount(d, m)
            }
            "plucker" => {
                let d = self.sint()?;
                let m = if self.eat(&Tok::Comma) {
                    self.int_list()?
                } else {
                    vec![]
                };
                Query::Plucker(d, m)
            }
            "cs_bound" => {
                let a = self.sint()?;
                self.expect(Tok::Comma)?;
                let b = self.sint()?;
                self.expect(Tok::Comma)?;
                let c = self.sint()?;
                self.expect(Tok::Comma)?;
                let d = self.sint()?;
                Query::CsBound(a, b, c, d)
            }
            "product_genus" => {
                let a = self.sint()?;
                self.expect(Tok::Comma)?;
                let b = self.sint()?;
                Query::ProductGenus(a, b)
            }
            "parity_bound" => Query::ParityBound(self.sint()?),
            "bpf_drop" => {
                let a = self.div_expr()?;
                self.expect(Tok::Comma)?;
                let b = self.div_expr()?;
                Query::BpfDrop(a, b)
            }
            "separation_drop" => {
                let a = self.div_expr()?;
                self.expect(Tok::Comma)?;
                let b = self.div_expr()?;
                Query::SeparationDrop(a, b)
            }
            "nef" => {
                let d = self.div_expr()?;
                self.expect(Tok::Semi)?;
                let dec = self.div_expr()?;
                Query::Nef(d, dec)
            }
            "big" => {
                let d = self.div_expr()?;
                self.expect(Tok::Semi)?;
                let dec = self.div_expr()?;
                Query::Big(d, dec)
            }
            "negdef" => Query::NegDef(self.curve_name_list()?),
            "z0_self" => Query::Z0Self(self.curve_name_list()?),
            "z0_pa" => Query::Z0Pa(self.curve_name_list()?),
            "sing_mult" => Query::SingMult(self.curve_name_list()?),
            "is_rdp" => Query::IsRdp(self.curve_name_list()?),
            "nonrational_pa" => Query::NonRationalPa(self.curve_name_list()?),
            "classify" => Query::Classify(self.curve_name_list()?),
            "genus_budget" => {
                let q = self.sint()?;
                let genera = if self.eat(&Tok::Comma) {
                    self.int_list()?
                } else {
                    Vec::new()
                };
                Query::GenusBudget(q, genera)
            }
            "reider" => {
                let c = self.curve_name()?;
                self.expect(Tok::Comma)?;
                let b = self.sint()?;
                let t = if self.eat(&Tok::Comma) {
                    Some(self.sint()?)
                } else {
                    None
                };
                Query::Reider(c, b, t)
            }
            other => return self.err(format!("unknown operation `{other}`")),
        };
        self.expect(Tok::RParen)?;
        Ok(q)
    }

    fn h_slot(&mut self) -> Result<usize, ParseError> {
        let name = self.ident()?;
        match name.as_str() {
            "h0" => Ok(0),
            "h1" => Ok(1),
            "h2" => Ok(2),
            other => self.err(format!("expected h0/h1/h2, found `{other}`")),
        }
    }

    fn ledger_stmt(&mut self) -> Result<LedgerStmt, ParseError> {
        if self.eat_keyword("fact") {
            let class = self.div_expr()?;
            self.expect(Tok::Colon)?;
            let mut specs = Vec::new();
            loop {
                let slot = self.h_slot()?;
                let op = if self.eat(&Tok::Eq) {
                    CmpOp::Eq
                } else if self.eat(&Tok::Ge) {
                    CmpOp::Ge
                } else if self.eat(&Tok::Le) {
                    CmpOp::Le
                } else {
                    return self.err("expected `=`, `>=` or `<=` after h-slot");
                };
                let v = self.sint()?;
                specs.push((slot, op, v));
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            let why = if self.eat_keyword("because") {
                Some(self.string()?)
            } else {
                None
            };
            return Ok(LedgerStmt::Fact { class, specs, why });
        }
        if self.eat_keyword("ses") {
            let a = self.div_expr()?;
            self.expect_keyword("by")?;
            let by = self.curve_name()?;
            let with = if self.eat_keyword("with") {
                self.expect_keyword("h0")?;
                self.expect(Tok::Eq)?;
                let h0 = self.sint()?;
                self.expect(Tok::Comma)?;
                self.expect_keyword("h1")?;
                self.expect(Tok::Eq)?;
                let h1 = self.sint()?;
                Some((h0, h1))
            } else {
                None
            };
            let why = if self.eat_keyword("because") {
                Some(self.string()?)
            } else {
                None
            };
            return Ok(LedgerStmt::Ses { a, by, with, why });
        }
        if self.eat_keyword("serre") {
            return Ok(LedgerStmt::Serre(self.div_expr()?));
        }
        self.err("expected `fact`, `ses` or `serre` in ledger block")
    }

    fn statement(&mut self) -> Result<Stmt, ParseError> {
        if self.eat_keyword("surface") {
            if self.eat_keyword("plane") {
                return Ok(Stmt::SurfacePlane);
            }
            self.expect_keyword("ruled")?;
            self.expect_keyword("q")?;
            self.expect(Tok::Eq)?;
            let q = self.uint()?;
            if q < 0 {
                return self.err("genus must be nonnegative");
            }
            self.expect_keyword("e")?;
            self.expect(Tok::Eq)?;
            let e = self.sint()?;
            let mut fibers = Vec::new();
            if self.eat_keyword("fibers") {
                while let Some(Tok::Ident(s)) = self.peek() {
                    if s == "nondecomposable" {
                        break;
                    }
                    fibers.push(self.ident()?);
                }
            }
            let decomposable = !self.eat_keyword("nondecomposable");
            return Ok(Stmt::SurfaceRuled {
                q: q as u32,
                e,
                fibers,
                decomposable,
            });
        }
        if self.eat_keyword("torsion") {
            let expr = self.base_expr()?;
            self.expect_keyword("order")?;
            let order = self.uint()?;
            if order < 2 {
                return self.err("torsion order must be >= 2");
            }
            let nonzero = self.eat_keyword("nonzero");
            return Ok(Stmt::Torsion {
                expr,
                order: order as u32,
                nonzero,
            });
        }
        if self.eat_keyword("bundle") {
            let name = self.ident()?;
            self.expect(Tok::Eq)?;
            let expr = self.base_expr()?;
            return Ok(Stmt::Bundle { name, expr });
        }
        if self.eat_keyword("curve") {
            let name = self.ident()?;
            self.expect(Tok::Eq)?;
            let class = self.div_expr()?;
            let mut pa = None;
            let mut smooth = false;
            let mut irreducible = false;
            let mut rational = false;
            let mut covers = Vec::new();
            loop {
                if self.eat_keyword("pa") {
                    pa = Some(self.sint()?);
                } else if self.eat_keyword("smooth") {
                    smooth = true;
                } else if self.eat_keyword("irreducible") {
                    irreducible = true;
                } else if self.eat_keyword("rational") {
                    rational = true;
                } else if self.eat_keyword("covers") {
                    self.expect(Tok::LParen)?;
                    let d = self.sint()?;
                    self.expect(Tok::Comma)?;
                    let g = self.sint()?;
                    self.expect(Tok::RParen)?;
                    covers.push((d, g));
                } else {
                    break;
                }
            }
            return Ok(Stmt::Curve {
                name,
                class,
                pa,
                smooth,
                irreducible,
                rational,
                covers,
            });
        }
        if self.eat_keyword("let") {
            let name = self.ident()?;
            self.expect(Tok::Eq)?;
            let expr = self.div_expr()?;
            return Ok(Stmt::Let { name, expr });
        }
        if self.eat_keyword("blowup") {
            let point = self.ident()?;
            self.expect_keyword("on")?;
            let mut hosts = Vec::new();
            loop {
                let h = self.curve_name()?;
                let m = if self.eat(&Tok::Colon) {
                    self.uint()?
                } else {
                    1
                };
                hosts.push((h, m));
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            let parent = if self.eat_keyword("over") {
                Some(self.ident()?)
            } else {
                None
            };
            return Ok(Stmt::BlowUp {
                point,
                hosts,
                parent,
            });
        }
        if self.eat_keyword("set_canonical") {
            return Ok(Stmt::SetCanonical(self.div_expr()?));
        }
        if self.eat_keyword("hypothesis") {
            let h = self.ident()?;
            return Ok(Stmt::Hypothesis(h));
        }
        if self.eat_keyword("assert") {
            let query = self.query()?;
            self.expect(Tok::EqEq)?;
            let expected = self.sint()?;
            return Ok(Stmt::Assert { query, expected });
        }
        if self.eat_keyword("expect_paper") {
            let query = self.query()?;
            self.expect(Tok::EqEq)?;
            let expected = self.sint()?;
            return Ok(Stmt::ExpectPaper { query, expected });
        }
        if self.eat_keyword("query") {
            return Ok(Stmt::Query(self.query()?));
        }
        if self.eat_keyword("note") {
            return Ok(Stmt::Note(self.string()?));
        }
        if self.eat_keyword("ledger") {
            self.expect(Tok::LBrace)?;
            let mut items = Vec::new();
            loop {
                self.skip_newlines();
                if self.eat(&Tok::RBrace) {
                    break;
                }
                if self.at_end() {
                    return self.err("unterminated ledger block");
                }
                items.push(self.ledger_stmt()?);
            }
            return Ok(Stmt::Ledger(items));
        }
        match self.bump() {
            Some(t) => self.err(format!("expected a statement, found {t}")),
            None => self.err("expected a statement"),
        }
    }
}
