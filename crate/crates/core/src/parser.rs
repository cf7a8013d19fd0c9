//! Reader and printer for `.spv` protocol files.
//!
//! ```text
//! consts ok, start.
//! names ska, skb.
//! frame F0 = [ w0 -> pk(ska); w1 -> pk(skb) ].
//! let R(c, k) = in(c, x); if x = ok then out(c, k).
//! query equiv reduced { R(c1, ska) } F0 ~ { R(c1, skb) } F0.
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::checker::Mode;
use crate::frame::Frame;
use crate::process::{Channel, ExtendedProcess, Proc, SimpleProcess};
use crate::term::{is_valid, AnyVar, Fun, Ident, Subst, Term, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{pos}: {kind}")]
pub struct ParseError {
    pub pos: Pos,
    pub kind: ParseErrorKind,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("undeclared identifier `{0}`")]
    Undeclared(String),
    #[error("duplicate channel `{0}` in query")]
    DuplicateChannel(String),
    #[error("{0}")]
    Invalid(String),
}

fn err<T>(pos: Pos, kind: ParseErrorKind) -> Result<T, ParseError> {
    Err(ParseError { pos, kind })
}

fn syntax<T>(pos: Pos, msg: impl Into<String>) -> Result<T, ParseError> {
    err(pos, ParseErrorKind::Syntax(msg.into()))
}

/// Argument of a process reference in a query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Arg {
    Term(Term),
    Channel(Channel),
}

impl fmt::Display for Arg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arg::Term(t) => write!(f, "{t}"),
            Arg::Channel(c) => write!(f, "{c}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProcRef {
    pub name: Ident,
    pub args: Vec<Arg>,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProcessDef {
    pub name: Ident,
    pub params: Vec<Ident>,
    pub body: Proc,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    pub mode: Mode,
    pub left: Vec<ProcRef>,
    pub left_frame: Ident,
    pub right: Vec<ProcRef>,
    pub right_frame: Ident,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ProtocolFile {
    pub constants: Vec<Ident>,
    pub names: Vec<Ident>,
    pub frames: Vec<(Ident, Frame)>,
    pub defs: Vec<ProcessDef>,
    pub queries: Vec<Query>,
}

// ---------------------------------------------------------------------------
// Lexer

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Sym(&'static str),
    Eof,
}

const SYMBOLS: [&str; 13] = ["->", "(", ")", ",", ";", ".", "=", "[", "]", "{", "}", "|", "~"];

fn lex(src: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphanumeric() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += i - start;
            out.push((Tok::Ident(word), pos));
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            Some(s) => {
                i += s.len();
                col += s.len();
                out.push((Tok::Sym(s), pos));
            }
            None => return syntax(pos, format!("unexpected character `{c}`")),
        }
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

// ---------------------------------------------------------------------------
// Parser

#[derive(Clone, Copy, PartialEq, Eq)]
enum ParamUse {
    Unused,
    Channel,
    Term,
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    file: ProtocolFile,
}

const KEYWORDS: [&str; 12] = [
    "consts", "names", "frame", "let", "query", "equiv", "in", "out", "if", "then", "else", "0",
];

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn next(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_kw(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == s)
    }

    fn expect_sym(&mut self, s: &str) -> Result<(), ParseError> {
        if self.is_sym(s) {
            self.next();
            Ok(())
        } else {
            let pos = self.pos();
            syntax(pos, format!("expected `{s}`, found {}", describe(self.peek())))
        }
    }

    fn expect_kw(&mut self, s: &str) -> Result<(), ParseError> {
        if self.is_kw(s) {
            self.next();
            Ok(())
        } else {
            let pos = self.pos();
            syntax(pos, format!("expected `{s}`, found {}", describe(self.peek())))
        }
    }

    fn ident(&mut self) -> Result<(String, Pos), ParseError> {
        match self.next() {
            (Tok::Ident(s), p) if !KEYWORDS.contains(&s.as_str()) => Ok((s, p)),
            (t, p) => syntax(p, format!("expected identifier, found {}", describe(&t))),
        }
    }

    fn ident_list(&mut self) -> Result<Vec<(String, Pos)>, ParseError> {
        let mut out = vec![self.ident()?];
        while self.is_sym(",") {
            self.next();
            out.push(self.ident()?);
        }
        Ok(out)
    }

    fn declared(&self, s: &str) -> bool {
        self.file.constants.iter().any(|c| &**c == s) || self.file.names.iter().any(|c| &**c == s)
    }

    fn declare(&mut self, s: &str, pos: Pos) -> Result<(), ParseError> {
        if self.declared(s) || Fun::builtin(s).is_some() {
            return err(pos, ParseErrorKind::Invalid(format!("`{s}` is already declared")));
        }
        Ok(())
    }

    fn file(mut self) -> Result<ProtocolFile, ParseError> {
        while *self.peek() != Tok::Eof {
            let pos = self.pos();
            match self.peek().clone() {
                Tok::Ident(k) if k == "consts" => {
                    self.next();
                    for (c, p) in self.ident_list()? {
                        self.declare(&c, p)?;
                        self.file.constants.push(Arc::from(c));
                    }
                    self.expect_sym(".")?;
                }
                Tok::Ident(k) if k == "names" => {
                    self.next();
                    for (c, p) in self.ident_list()? {
                        self.declare(&c, p)?;
                        self.file.names.push(Arc::from(c));
                    }
                    self.expect_sym(".")?;
                }
                Tok::Ident(k) if k == "frame" => {
                    self.next();
                    self.frame_decl()?;
                }
                Tok::Ident(k) if k == "let" => {
                    self.next();
                    self.let_decl()?;
                }
                Tok::Ident(k) if k == "query" => {
                    self.next();
                    self.query_decl(pos)?;
                }
                t => return syntax(pos, format!("expected declaration, found {}", describe(&t))),
            }
        }
        Ok(self.file)
    }

    fn frame_decl(&mut self) -> Result<(), ParseError> {
        let (name, npos) = self.ident()?;
        if self.file.frames.iter().any(|(f, _)| &**f == name) {
            return err(npos, ParseErrorKind::Invalid(format!("frame `{name}` defined twice")));
        }
        self.expect_sym("=")?;
        self.expect_sym("[")?;
        let mut entries = Vec::new();
        while !self.is_sym("]") {
            let (h, hpos) = self.ident()?;
            let idx = h
                .strip_prefix('w')
                .and_then(|d| d.parse::<u32>().ok())
                .filter(|_| h.len() > 1);
            let Some(idx) = idx else {
                return syntax(hpos, format!("expected handle w<k>, found `{h}`"));
            };
            if idx as usize != entries.len() {
                return err(
                    hpos,
                    ParseErrorKind::Invalid(format!("handles must be consecutive; expected w{}", entries.len())),
                );
            }
            self.expect_sym("->")?;
            let tpos = self.pos();
            let t = self.term(&Scope::default())?;
            if !t.is_ground() || !is_valid(&t) {
                return err(tpos, ParseErrorKind::Invalid(format!("payload of {h} is not a valid ground term")));
            }
            entries.push(t);
            if self.is_sym(";") {
                self.next();
            } else {
                break;
            }
        }
        self.expect_sym("]")?;
        self.expect_sym(".")?;
        self.file.frames.push((Arc::from(name), Frame::from_terms(entries)));
        Ok(())
    }

    fn let_decl(&mut self) -> Result<(), ParseError> {
        let (name, pos) = self.ident()?;
        if self.file.defs.iter().any(|d| &*d.name == name) {
            return err(pos, ParseErrorKind::Invalid(format!("process `{name}` defined twice")));
        }
        let mut params = Vec::new();
        if self.is_sym("(") {
            self.next();
            if !self.is_sym(")") {
                for (p, ppos) in self.ident_list()? {
                    if params.iter().any(|q: &(String, ParamUse)| q.0 == p) {
                        return err(ppos, ParseErrorKind::Invalid(format!("parameter `{p}` repeated")));
                    }
                    params.push((p, ParamUse::Unused));
                }
            }
            self.expect_sym(")")?;
        }
        self.expect_sym("=")?;
        let mut scope = Scope {
            params,
            bound: Vec::new(),
        };
        let body = self.body(&mut scope)?;
        self.expect_sym(".")?;
        let chans = body.channels();
        if chans.len() > 1 {
            return err(
                pos,
                ParseErrorKind::Invalid(format!("`{name}` uses several channels ({} and {})", chans[0], chans[1])),
            );
        }
        self.file.defs.push(ProcessDef {
            name: Arc::from(name),
            params: scope.params.into_iter().map(|(p, _)| Arc::from(p)).collect(),
            body,
            pos,
        });
        Ok(())
    }

    fn body(&mut self, scope: &mut Scope) -> Result<Proc, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(k) if k == "0" => {
                self.next();
                Ok(Proc::Null)
            }
            Tok::Sym("(") => {
                self.next();
                let p = self.body(scope)?;
                self.expect_sym(")")?;
                Ok(p)
            }
            Tok::Ident(k) if k == "in" => {
                self.next();
                self.expect_sym("(")?;
                let c = self.channel(scope)?;
                self.expect_sym(",")?;
                let (x, xpos) = self.ident()?;
                if self.declared(&x) || Fun::builtin(&x).is_some() {
                    return err(xpos, ParseErrorKind::Invalid(format!("`{x}` cannot be used as a variable")));
                }
                self.expect_sym(")")?;
                scope.bound.push(x.clone());
                let k = self.continuation(scope)?;
                scope.bound.pop();
                Ok(Proc::In(c, Var::Named(Arc::from(x)), Arc::new(k)))
            }
            Tok::Ident(k) if k == "out" => {
                self.next();
                self.expect_sym("(")?;
                let c = self.channel(scope)?;
                self.expect_sym(",")?;
                let u = self.term_mut(scope)?;
                self.expect_sym(")")?;
                let k = self.continuation(scope)?;
                Ok(Proc::Out(c, u, Arc::new(k)))
            }
            Tok::Ident(k) if k == "if" => {
                self.next();
                let u = self.term_mut(scope)?;
                self.expect_sym("=")?;
                let v = self.term_mut(scope)?;
                self.expect_kw("then")?;
                let p = self.body(scope)?;
                let q = if self.is_kw("else") {
                    self.next();
                    self.body(scope)?
                } else {
                    Proc::Null
                };
                Ok(Proc::If(u, v, Arc::new(p), Arc::new(q)))
            }
            t => syntax(pos, format!("expected process, found {}", describe(&t))),
        }
    }

    fn continuation(&mut self, scope: &mut Scope) -> Result<Proc, ParseError> {
        if self.is_sym(";") {
            self.next();
            self.body(scope)
        } else {
            Ok(Proc::Null)
        }
    }

    fn channel(&mut self, scope: &mut Scope) -> Result<Channel, ParseError> {
        let (c, pos) = self.ident()?;
        if let Some(p) = scope.params.iter_mut().find(|p| p.0 == c) {
            if p.1 == ParamUse::Term {
                return err(pos, ParseErrorKind::Invalid(format!("parameter `{c}` used both as channel and term")));
            }
            p.1 = ParamUse::Channel;
        } else if self.declared(&c) || scope.bound.contains(&c) {
            return err(pos, ParseErrorKind::Invalid(format!("`{c}` is not a channel")));
        }
        Ok(Arc::from(c))
    }

    fn term_mut(&mut self, scope: &mut Scope) -> Result<Term, ParseError> {
        let start = self.at;
        let t = self.term(scope)?;
        // Mark parameters used as terms.
        for (tok, pos) in self.toks[start..self.at].to_vec() {
            if let Tok::Ident(s) = tok {
                if let Some(p) = scope.params.iter_mut().find(|p| p.0 == s) {
                    if scope.bound.contains(&s) {
                        continue;
                    }
                    if p.1 == ParamUse::Channel {
                        return err(pos, ParseErrorKind::Invalid(format!("parameter `{s}` used both as channel and term")));
                    }
                    p.1 = ParamUse::Term;
                }
            }
        }
        Ok(t)
    }

    fn term(&mut self, scope: &Scope) -> Result<Term, ParseError> {
        let (id, pos) = self.ident()?;
        if self.is_sym("(") {
            self.next();
            let mut args = Vec::new();
            if !self.is_sym(")") {
                args.push(self.term(scope)?);
                while self.is_sym(",") {
                    self.next();
                    args.push(self.term(scope)?);
                }
            }
            self.expect_sym(")")?;
            let Some(f) = Fun::builtin(&id) else {
                return err(pos, ParseErrorKind::Undeclared(id));
            };
            if f.arity() != args.len() {
                return err(
                    pos,
                    ParseErrorKind::Invalid(format!("`{id}` expects {} arguments, got {}", f.arity(), args.len())),
                );
            }
            return Ok(Term::App(f, args.into()));
        }
        self.atom(&id, pos, scope)
    }

    fn atom(&self, id: &str, pos: Pos, scope: &Scope) -> Result<Term, ParseError> {
        if scope.bound.iter().any(|b| b == id) || scope.params.iter().any(|p| p.0 == id) {
            return Ok(Term::Var(Var::Named(Arc::from(id))));
        }
        if self.file.names.iter().any(|n| &**n == id) {
            return Ok(Term::Name(Arc::from(id)));
        }
        if self.file.constants.iter().any(|n| &**n == id) {
            return Ok(Term::constant(id));
        }
        err(pos, ParseErrorKind::Undeclared(id.to_string()))
    }

    fn query_decl(&mut self, pos: Pos) -> Result<(), ParseError> {
        self.expect_kw("equiv")?;
        let (m, mpos) = self.ident()?;
        let mode: Mode = match m.parse() {
            Ok(m) => m,
            Err(_) => return syntax(mpos, format!("unknown mode `{m}`")),
        };
        let left = self.proc_set()?;
        let (lf, lpos) = self.ident()?;
        self.expect_sym("~")?;
        let right = self.proc_set()?;
        let (rf, rpos) = self.ident()?;
        self.expect_sym(".")?;
        for (f, p) in [(&lf, lpos), (&rf, rpos)] {
            if !self.file.frames.iter().any(|(g, _)| &**g == f) {
                return err(p, ParseErrorKind::Undeclared(f.clone()));
            }
        }
        let q = Query {
            mode,
            left,
            left_frame: Arc::from(lf),
            right,
            right_frame: Arc::from(rf),
            pos,
        };
        self.file.resolve(&q)?;
        self.file.queries.push(q);
        Ok(())
    }

    fn proc_set(&mut self) -> Result<Vec<ProcRef>, ParseError> {
        self.expect_sym("{")?;
        let mut out = Vec::new();
        if self.is_sym("}") {
            self.next();
            return Ok(out);
        }
        loop {
            if self.is_kw("0") {
                self.next();
            } else {
                out.push(self.proc_ref()?);
            }
            if self.is_sym("|") {
                self.next();
            } else {
                break;
            }
        }
        self.expect_sym("}")?;
        Ok(out)
    }

    fn proc_ref(&mut self) -> Result<ProcRef, ParseError> {
        let (name, pos) = self.ident()?;
        let mut args = Vec::new();
        if self.is_sym("(") {
            self.next();
            if !self.is_sym(")") {
                loop {
                    args.push(self.arg()?);
                    if self.is_sym(",") {
                        self.next();
                    } else {
                        break;
                    }
                }
            }
            self.expect_sym(")")?;
        }
        Ok(ProcRef {
            name: Arc::from(name),
            args,
            pos,
        })
    }

    fn arg(&mut self) -> Result<Arg, ParseError> {
        let save = self.at;
        let (id, _) = self.ident()?;
        if !self.is_sym("(") && !self.declared(&id) {
            return Ok(Arg::Channel(Arc::from(id)));
        }
        self.at = save;
        Ok(Arg::Term(self.term(&Scope::default())?))
    }
}

#[derive(Default)]
struct Scope {
    params: Vec<(String, ParamUse)>,
    bound: Vec<String>,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Sym(s) => format!("`{s}`"),
        Tok::Eof => "end of input".to_string(),
    }
}

pub fn parse(src: &str) -> Result<ProtocolFile, ParseError> {
    let toks = lex(src)?;
    Parser {
        toks,
        at: 0,
        file: ProtocolFile::default(),
    }
    .file()
}

impl ProtocolFile {
    pub fn frame(&self, name: &str) -> Option<&Frame> {
        self.frames.iter().find(|(f, _)| &**f == name).map(|(_, f)| f)
    }

    pub fn def(&self, name: &str) -> Option<&ProcessDef> {
        self.defs.iter().find(|d| &*d.name == name)
    }

    /// Instantiates a process reference with its arguments.
    pub fn instantiate(&self, r: &ProcRef) -> Result<Proc, ParseError> {
        let Some(def) = self.def(&r.name) else {
            return err(r.pos, ParseErrorKind::Undeclared(r.name.to_string()));
        };
        if def.params.len() != r.args.len() {
            return err(
                r.pos,
                ParseErrorKind::Invalid(format!(
                    "`{}` expects {} arguments, got {}",
                    r.name,
                    def.params.len(),
                    r.args.len()
                )),
            );
        }
        let chans = def.body.channels();
        let mut chan_map: BTreeMap<Channel, Channel> = BTreeMap::new();
        let mut subst = Subst::new();
        for (p, a) in def.params.iter().zip(&r.args) {
            let as_channel = chans.contains(p);
            match (as_channel, a) {
                (true, Arg::Channel(c)) => {
                    chan_map.insert(p.clone(), c.clone());
                }
                (true, Arg::Term(t)) => {
                    return err(r.pos, ParseErrorKind::Invalid(format!("parameter `{p}` expects a channel, got `{t}`")));
                }
                (false, Arg::Term(t)) => subst.insert(AnyVar::First(Var::Named(p.clone())), t.clone()),
                (false, Arg::Channel(c)) => return err(r.pos, ParseErrorKind::Undeclared(c.to_string())),
            }
        }
        Ok(def
            .body
            .subst(&subst)
            .rename_channels(&|c| chan_map.get(c).cloned().unwrap_or_else(|| c.clone())))
    }

    fn side(&self, refs: &[ProcRef], frame: &str, pos: Pos) -> Result<ExtendedProcess, ParseError> {
        let mut members = Vec::new();
        let mut seen: Vec<Channel> = Vec::new();
        for r in refs {
            let p = self.instantiate(r)?;
            for c in p.channels() {
                if seen.contains(&c) {
                    return err(r.pos, ParseErrorKind::DuplicateChannel(c.to_string()));
                }
                seen.push(c);
            }
            members.push(p);
        }
        let procs = SimpleProcess::new(members).map_err(|e| ParseError {
            pos,
            kind: ParseErrorKind::Invalid(e.to_string()),
        })?;
        let frame = self
            .frame(frame)
            .cloned()
            .ok_or_else(|| ParseError {
                pos,
                kind: ParseErrorKind::Undeclared(frame.to_string()),
            })?;
        Ok(ExtendedProcess::new(procs, frame))
    }

    /// Both sides of a query as extended processes.
    pub fn resolve(&self, q: &Query) -> Result<(ExtendedProcess, ExtendedProcess), ParseError> {
        let a = self.side(&q.left, &q.left_frame, q.pos)?;
        let b = self.side(&q.right, &q.right_frame, q.pos)?;
        Ok((a, b))
    }
}

fn print_list<T: fmt::Display>(items: &[T], sep: &str) -> String {
    items.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(sep)
}

impl fmt::Display for ProcRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.args.is_empty() {
            write!(f, "{}", self.name)
        } else {
            write!(f, "{}({})", self.name, print_list(&self.args, ", "))
        }
    }
}

/// Prints a file in the concrete syntax accepted by [`parse`].
pub fn print_file(file: &ProtocolFile) -> String {
    let mut out = String::new();
    if !file.constants.is_empty() {
        out += &format!("consts {}.\n", print_list(&file.constants, ", "));
    }
    if !file.names.is_empty() {
        out += &format!("names {}.\n", print_list(&file.names, ", "));
    }
    for (name, frame) in &file.frames {
        let entries: Vec<String> = frame.entries().map(|(h, t)| format!("w{h} -> {t}")).collect();
        out += &format!("frame {name} = [{}].\n", entries.join("; "));
    }
    for d in &file.defs {
        if d.params.is_empty() {
            out += &format!("let {} = {}.\n", d.name, d.body);
        } else {
            out += &format!("let {}({}) = {}.\n", d.name, print_list(&d.params, ", "), d.body);
        }
    }
    for q in &file.queries {
        out += &format!(
            "query equiv {} {{ {} }} {} ~ {{ {} }} {}.\n",
            q.mode,
            print_list(&q.left, " | "),
            q.left_frame,
            print_list(&q.right, " | "),
            q.right_frame
        );
    }
    out
}
