//! Reader and printer for `.dsut` fact files.
//!
//! A file is a sequence of ground facts, one per element of the model:
//!
//! ```text
//! object_(layer(3), component_(sql_server,1), type_('MySQL Server 5.6'), parameters_([])).
//! connection_(layer(3), component_(web_server,1), component_(sql_server,1), parameters_([])).
//! map_(layer(3), component_(web_server,1), component_(vserver,1), parameters_([])).
//! requirement_(layer(3), component_(ss,_), component_(dns_server,_), parameters_([])).
//! requirement_(layer(2), _, _).
//! ```
//!
//! `%` starts a comment that runs to the end of the line. Parameter lists are
//! carried as opaque strings holding the canonical text of each term.

use std::cmp::Reverse;
use std::fmt;

use thiserror::Error;

use crate::model::{ComponentRef, LayerId};

/// 1-based source position.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position {
    pub line: u32,
    pub column: u32,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FactError {
    #[error("{pos}: expected {expected}, found {found}")]
    Parse {
        pos: Position,
        expected: String,
        found: String,
    },
    #[error("{pos}: {message}")]
    Shape { pos: Position, message: String },
}

impl FactError {
    pub fn pos(&self) -> Position {
        match self {
            FactError::Parse { pos, .. } | FactError::Shape { pos, .. } => *pos,
        }
    }

    fn shape(pos: Position, message: impl Into<String>) -> Self {
        FactError::Shape {
            pos,
            message: message.into(),
        }
    }
}

/// Component pattern in a requirement fact.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ComponentPattern {
    /// `component_(Class, Num)`
    Exact(ComponentRef),
    /// `component_(Class, _)`
    ClassAll(String),
    /// `_`
    Any,
}

impl ComponentPattern {
    pub fn class(&self) -> Option<&str> {
        match self {
            ComponentPattern::Exact(c) => Some(&c.class),
            ComponentPattern::ClassAll(class) => Some(class),
            ComponentPattern::Any => None,
        }
    }
}

impl fmt::Display for ComponentPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComponentPattern::Exact(c) => write!(f, "component_({},{})", c.class, c.index),
            ComponentPattern::ClassAll(class) => write!(f, "component_({class},_)"),
            ComponentPattern::Any => f.write_str("_"),
        }
    }
}

#[derive(Debug, Clone, Eq)]
pub struct ObjectFact {
    pub layer: LayerId,
    pub component: ComponentRef,
    pub type_label: Option<String>,
    pub params: Vec<String>,
    pub pos: Position,
}

#[derive(Debug, Clone, Eq)]
pub struct ConnectionFact {
    pub layer: LayerId,
    pub a: ComponentRef,
    pub b: ComponentRef,
    pub params: Vec<String>,
    pub pos: Position,
}

#[derive(Debug, Clone, Eq)]
pub struct MapFact {
    /// Layer of the upper component.
    pub layer: LayerId,
    pub upper: ComponentRef,
    pub lower: ComponentRef,
    pub params: Vec<String>,
    pub pos: Position,
}

#[derive(Debug, Clone, Eq)]
pub struct RequirementFact {
    /// Raw layer number. Out-of-range values survive parsing so that
    /// validation can report them against the requirement.
    pub layer: u32,
    pub source: ComponentPattern,
    pub target: ComponentPattern,
    /// `None` for the three-argument form.
    pub params: Option<Vec<String>>,
    pub pos: Position,
}

// Fact equality is structural and ignores source positions.

impl ObjectFact {
    fn key(&self) -> (Reverse<LayerId>, &ComponentRef, &Option<String>, &[String]) {
        (
            Reverse(self.layer),
            &self.component,
            &self.type_label,
            &self.params,
        )
    }
}

impl ConnectionFact {
    fn key(&self) -> (Reverse<LayerId>, &ComponentRef, &ComponentRef, &[String]) {
        (Reverse(self.layer), &self.a, &self.b, &self.params)
    }
}

impl MapFact {
    fn key(&self) -> (Reverse<LayerId>, &ComponentRef, &ComponentRef, &[String]) {
        (Reverse(self.layer), &self.upper, &self.lower, &self.params)
    }
}

impl RequirementFact {
    fn key(
        &self,
    ) -> (
        Reverse<u32>,
        &ComponentPattern,
        &ComponentPattern,
        &Option<Vec<String>>,
    ) {
        (Reverse(self.layer), &self.source, &self.target, &self.params)
    }
}

macro_rules! keyed_eq {
    ($($t:ty),*) => {$(
        impl PartialEq for $t {
            fn eq(&self, other: &Self) -> bool {
                self.key() == other.key()
            }
        }
    )*};
}

keyed_eq!(ObjectFact, ConnectionFact, MapFact, RequirementFact);

/// Parsed facts, grouped by kind, each group in source order.
#[derive(Debug, Clone, Default, Eq)]
pub struct FactSet {
    pub objects: Vec<ObjectFact>,
    pub connections: Vec<ConnectionFact>,
    pub maps: Vec<MapFact>,
    pub requirements: Vec<RequirementFact>,
}

impl FactSet {
    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
            && self.connections.is_empty()
            && self.maps.is_empty()
            && self.requirements.is_empty()
    }

    pub fn len(&self) -> usize {
        self.objects.len() + self.connections.len() + self.maps.len() + self.requirements.len()
    }

    /// Appends every fact of `other`, keeping group order.
    pub fn extend(&mut self, other: FactSet) {
        self.objects.extend(other.objects);
        self.connections.extend(other.connections);
        self.maps.extend(other.maps);
        self.requirements.extend(other.requirements);
    }

    /// Copy with every group in render order.
    pub fn canonical(&self) -> FactSet {
        let mut out = self.clone();
        out.objects.sort_by(|x, y| x.key().cmp(&y.key()));
        out.connections.sort_by(|x, y| x.key().cmp(&y.key()));
        out.maps.sort_by(|x, y| x.key().cmp(&y.key()));
        out.requirements.sort_by(|x, y| x.key().cmp(&y.key()));
        out
    }
}

/// Two fact sets are equal when they hold the same facts, regardless of
/// source order or positions.
impl PartialEq for FactSet {
    fn eq(&self, other: &Self) -> bool {
        if self.len() != other.len() {
            return false;
        }
        let (a, b) = (self.canonical(), other.canonical());
        a.objects == b.objects
            && a.connections == b.connections
            && a.maps == b.maps
            && a.requirements == b.requirements
    }
}

// ---------------------------------------------------------------------------
// Lexer

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Atom(String),
    Quoted(String),
    Int(String),
    Wildcard,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Dot,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Atom(a) => write!(f, "atom `{a}`"),
            Tok::Quoted(q) => write!(f, "quoted atom '{q}'"),
            Tok::Int(i) => write!(f, "integer {i}"),
            Tok::Wildcard => f.write_str("`_`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    column: u32,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.chars().peekable(),
            line: 1,
            column: 1,
        }
    }

    fn pos(&self) -> Position {
        Position {
            line: self.line,
            column: self.column,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let ch = self.chars.next()?;
        if ch == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(ch)
    }

    fn skip_trivia(&mut self) {
        while let Some(&ch) = self.chars.peek() {
            if ch.is_whitespace() {
                self.bump();
            } else if ch == '%' {
                while let Some(&c) = self.chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn word(&mut self) -> String {
        let mut s = String::new();
        while let Some(&c) = self.chars.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        s
    }

    fn next_token(&mut self) -> Result<(Tok, Position), FactError> {
        self.skip_trivia();
        let pos = self.pos();
        let Some(&ch) = self.chars.peek() else {
            return Ok((Tok::Eof, pos));
        };
        let single = match ch {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ',' => Some(Tok::Comma),
            '.' => Some(Tok::Dot),
            _ => None,
        };
        if let Some(tok) = single {
            self.bump();
            return Ok((tok, pos));
        }
        match ch {
            'a'..='z' => Ok((Tok::Atom(self.word()), pos)),
            '0'..='9' => {
                let w = self.word();
                if w.chars().all(|c| c.is_ascii_digit()) {
                    Ok((Tok::Int(w), pos))
                } else {
                    Err(FactError::Parse {
                        pos,
                        expected: "integer".into(),
                        found: format!("`{w}`"),
                    })
                }
            }
            '_' => {
                let w = self.word();
                if w == "_" {
                    Ok((Tok::Wildcard, pos))
                } else {
                    Err(FactError::Parse {
                        pos,
                        expected: "`_` (named variables are not supported)".into(),
                        found: format!("`{w}`"),
                    })
                }
            }
            'A'..='Z' => {
                let w = self.word();
                Err(FactError::Parse {
                    pos,
                    expected: "a ground term (variables are not supported)".into(),
                    found: format!("variable `{w}`"),
                })
            }
            '\'' => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        Some('\'') => return Ok((Tok::Quoted(s), pos)),
                        Some('\\') => match self.bump() {
                            Some(c) => s.push(c),
                            None => break,
                        },
                        Some(c) => s.push(c),
                        None => break,
                    }
                }
                Err(FactError::Parse {
                    pos,
                    expected: "closing `'`".into(),
                    found: "end of input".into(),
                })
            }
            other => Err(FactError::Parse {
                pos,
                expected: "a term".into(),
                found: format!("character {other:?}"),
            }),
        }
    }
}

// ---------------------------------------------------------------------------
// Terms

#[derive(Debug, Clone, PartialEq, Eq)]
enum TermKind {
    Atom(String),
    Quoted(String),
    Int(String),
    Wildcard,
    List(Vec<Term>),
    Compound(String, Vec<Term>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Term {
    kind: TermKind,
    pos: Position,
}

fn is_bare_atom(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some('a'..='z')) && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('\'');
    for c in s.chars() {
        if c == '\'' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('\'');
    out
}

impl Term {
    /// Canonical text used for opaque parameters.
    fn render(&self) -> String {
        fn join(items: &[Term]) -> String {
            items.iter().map(Term::render).collect::<Vec<_>>().join(",")
        }
        match &self.kind {
            TermKind::Atom(a) => a.clone(),
            TermKind::Quoted(q) => quote(q),
            TermKind::Int(i) => i.clone(),
            TermKind::Wildcard => "_".into(),
            TermKind::List(items) => format!("[{}]", join(items)),
            TermKind::Compound(name, args) => format!("{name}({})", join(args)),
        }
    }

    fn describe(&self) -> String {
        match &self.kind {
            TermKind::Compound(name, args) => format!("{name}/{}", args.len()),
            TermKind::List(_) => "a list".into(),
            _ => format!("`{}`", self.render()),
        }
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
    pos: Position,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Result<Self, FactError> {
        let mut lexer = Lexer::new(text);
        let (tok, pos) = lexer.next_token()?;
        Ok(Parser { lexer, tok, pos })
    }

    fn advance(&mut self) -> Result<(Tok, Position), FactError> {
        let (tok, pos) = self.lexer.next_token()?;
        let prev_tok = std::mem::replace(&mut self.tok, tok);
        let prev_pos = std::mem::replace(&mut self.pos, pos);
        Ok((prev_tok, prev_pos))
    }

    fn error(&self, expected: &str) -> FactError {
        FactError::Parse {
            pos: self.pos,
            expected: expected.into(),
            found: self.tok.to_string(),
        }
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<(), FactError> {
        if self.tok == tok {
            self.advance()?;
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    fn args(&mut self, close: Tok, close_name: &str) -> Result<Vec<Term>, FactError> {
        let mut items = vec![self.term()?];
        loop {
            if self.tok == Tok::Comma {
                self.advance()?;
                items.push(self.term()?);
            } else if self.tok == close {
                self.advance()?;
                return Ok(items);
            } else {
                return Err(self.error(&format!("`,` or {close_name}")));
            }
        }
    }

    fn term(&mut self) -> Result<Term, FactError> {
        let pos = self.pos;
        let kind = match self.tok.clone() {
            Tok::Atom(name) => {
                self.advance()?;
                if self.tok == Tok::LParen {
                    self.advance()?;
                    TermKind::Compound(name, self.args(Tok::RParen, "`)`")?)
                } else {
                    TermKind::Atom(name)
                }
            }
            Tok::Quoted(q) => {
                self.advance()?;
                TermKind::Quoted(q)
            }
            Tok::Int(i) => {
                self.advance()?;
                TermKind::Int(i)
            }
            Tok::Wildcard => {
                self.advance()?;
                TermKind::Wildcard
            }
            Tok::LBracket => {
                self.advance()?;
                if self.tok == Tok::RBracket {
                    self.advance()?;
                    TermKind::List(Vec::new())
                } else {
                    TermKind::List(self.args(Tok::RBracket, "`]`")?)
                }
            }
            _ => return Err(self.error("a term")),
        };
        Ok(Term { kind, pos })
    }

    fn fact(&mut self, facts: &mut FactSet) -> Result<(), FactError> {
        let pos = self.pos;
        let name = match &self.tok {
            Tok::Atom(a) if matches!(a.as_str(), "object_" | "connection_" | "map_" | "requirement_") => {
                a.clone()
            }
            _ => return Err(self.error("`object_`, `connection_`, `map_` or `requirement_`")),
        };
        self.advance()?;
        self.expect(Tok::LParen, "`(`")?;
        let args = self.args(Tok::RParen, "`)`")?;
        self.expect(Tok::Dot, "`.`")?;
        match name.as_str() {
            "object_" => facts.objects.push(object_fact(pos, &args)?),
            "connection_" => {
                let (layer, a, b, params) = edge_args(pos, "connection_", &args)?;
                facts.connections.push(ConnectionFact {
                    layer,
                    a,
                    b,
                    params,
                    pos,
                });
            }
            "map_" => {
                let (layer, upper, lower, params) = edge_args(pos, "map_", &args)?;
                facts.maps.push(MapFact {
                    layer,
                    upper,
                    lower,
                    params,
                    pos,
                });
            }
            _ => facts.requirements.push(requirement_fact(pos, &args)?),
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Shape rules

fn arity(pos: Position, name: &str, args: &[Term], allowed: &[usize]) -> Result<(), FactError> {
    if allowed.contains(&args.len()) {
        Ok(())
    } else {
        let want = allowed
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(" or ");
        Err(FactError::shape(
            pos,
            format!("{name} takes {want} arguments, got {}", args.len()),
        ))
    }
}

fn compound<'t>(term: &'t Term, name: &str, n: usize) -> Result<&'t [Term], FactError> {
    match &term.kind {
        TermKind::Compound(f, args) if f == name && args.len() == n => Ok(args),
        _ => Err(FactError::shape(
            term.pos,
            format!("expected {name}/{n}, found {}", term.describe()),
        )),
    }
}

fn integer(term: &Term, what: &str) -> Result<u32, FactError> {
    match &term.kind {
        TermKind::Int(digits) => digits
            .parse::<u32>()
            .map_err(|_| FactError::shape(term.pos, format!("{what} {digits} is too large"))),
        _ => Err(FactError::shape(
            term.pos,
            format!("expected an integer {what}, found {}", term.describe()),
        )),
    }
}

fn raw_layer(term: &Term) -> Result<u32, FactError> {
    let args = compound(term, "layer", 1)?;
    integer(&args[0], "layer")
}

fn layer(term: &Term) -> Result<LayerId, FactError> {
    let n = raw_layer(term)?;
    LayerId::new(n).ok_or_else(|| FactError::shape(term.pos, format!("layer {n} out of range 1..4")))
}

fn class(term: &Term) -> Result<String, FactError> {
    match &term.kind {
        TermKind::Atom(a) => Ok(a.clone()),
        _ => Err(FactError::shape(
            term.pos,
            format!("expected a class atom, found {}", term.describe()),
        )),
    }
}

fn index(term: &Term) -> Result<u32, FactError> {
    match integer(term, "component index")? {
        0 => Err(FactError::shape(term.pos, "component index must be positive")),
        n => Ok(n),
    }
}

fn component(term: &Term) -> Result<ComponentRef, FactError> {
    let args = compound(term, "component_", 2)?;
    Ok(ComponentRef::new(class(&args[0])?, index(&args[1])?))
}

fn pattern(term: &Term) -> Result<ComponentPattern, FactError> {
    if term.kind == TermKind::Wildcard {
        return Ok(ComponentPattern::Any);
    }
    let args = compound(term, "component_", 2)?;
    let class = class(&args[0])?;
    if args[1].kind == TermKind::Wildcard {
        Ok(ComponentPattern::ClassAll(class))
    } else {
        Ok(ComponentPattern::Exact(ComponentRef::new(
            class,
            index(&args[1])?,
        )))
    }
}

fn params(term: &Term) -> Result<Vec<String>, FactError> {
    let args = compound(term, "parameters_", 1)?;
    match &args[0].kind {
        TermKind::List(items) => Ok(items.iter().map(Term::render).collect()),
        _ => Err(FactError::shape(
            args[0].pos,
            format!("expected a parameter list, found {}", args[0].describe()),
        )),
    }
}

fn type_label(term: &Term) -> Result<Option<String>, FactError> {
    let args = compound(term, "type_", 1)?;
    match &args[0].kind {
        TermKind::Atom(a) => Ok(Some(a.clone())),
        TermKind::Quoted(q) => Ok(Some(q.clone())),
        TermKind::List(items) if items.is_empty() => Ok(None),
        _ => Err(FactError::shape(
            args[0].pos,
            format!(
                "type must be an atom, a quoted atom or [], found {}",
                args[0].describe()
            ),
        )),
    }
}

fn object_fact(pos: Position, args: &[Term]) -> Result<ObjectFact, FactError> {
    arity(pos, "object_", args, &[4])?;
    Ok(ObjectFact {
        layer: layer(&args[0])?,
        component: component(&args[1])?,
        type_label: type_label(&args[2])?,
        params: params(&args[3])?,
        pos,
    })
}

fn edge_args(
    pos: Position,
    name: &str,
    args: &[Term],
) -> Result<(LayerId, ComponentRef, ComponentRef, Vec<String>), FactError> {
    arity(pos, name, args, &[4])?;
    Ok((
        layer(&args[0])?,
        component(&args[1])?,
        component(&args[2])?,
        params(&args[3])?,
    ))
}

fn requirement_fact(pos: Position, args: &[Term]) -> Result<RequirementFact, FactError> {
    arity(pos, "requirement_", args, &[3, 4])?;
    Ok(RequirementFact {
        layer: raw_layer(&args[0])?,
        source: pattern(&args[1])?,
        target: pattern(&args[2])?,
        params: args.get(3).map(params).transpose()?,
        pos,
    })
}

/// Parses a whole fact file. Any error rejects the whole input.
pub fn parse_facts(text: &str) -> Result<FactSet, FactError> {
    let mut parser = Parser::new(text)?;
    let mut facts = FactSet::default();
    while parser.tok != Tok::Eof {
        parser.fact(&mut facts)?;
    }
    Ok(facts)
}

// ---------------------------------------------------------------------------
// Printer

fn render_params(params: &[String]) -> String {
    format!("parameters_([{}])", params.join(", "))
}

fn render_component(c: &ComponentRef) -> String {
    format!("component_({},{})", c.class, c.index)
}

/// Canonical text: one fact per line, grouped by kind and sorted by
/// descending layer, then component.
pub fn render_facts(facts: &FactSet) -> String {
    let facts = facts.canonical();
    let mut out = String::new();
    for o in &facts.objects {
        let ty = match &o.type_label {
            None => "[]".to_string(),
            Some(t) if is_bare_atom(t) => t.clone(),
            Some(t) => quote(t),
        };
        out.push_str(&format!(
            "object_(layer({}), {}, type_({}), {}).\n",
            o.layer,
            render_component(&o.component),
            ty,
            render_params(&o.params)
        ));
    }
    for (name, l, a, b, p) in facts
        .connections
        .iter()
        .map(|c| ("connection_", c.layer, &c.a, &c.b, &c.params))
        .chain(
            facts
                .maps
                .iter()
                .map(|m| ("map_", m.layer, &m.upper, &m.lower, &m.params)),
        )
    {
        out.push_str(&format!(
            "{name}(layer({l}), {}, {}, {}).\n",
            render_component(a),
            render_component(b),
            render_params(p)
        ));
    }
    for r in &facts.requirements {
        match &r.params {
            Some(p) => out.push_str(&format!(
                "requirement_(layer({}), {}, {}, {}).\n",
                r.layer,
                r.source,
                r.target,
                render_params(p)
            )),
            None => out.push_str(&format!(
                "requirement_(layer({}), {}, {}).\n",
                r.layer, r.source, r.target
            )),
        }
    }
    out
}
