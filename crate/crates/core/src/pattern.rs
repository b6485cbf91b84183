//! Substructure constraints: basic graph patterns with one distinguished
//! focus variable.
//!
//! The text form is a small SPARQL subset:
//!
//! ```text
//! SELECT ?x WHERE { ?x friendOf v3 . v3 likes ?y }
//! ```
//!
//! Terms are vertex names or `?variables`; predicates are label names. Names
//! containing whitespace, braces, or a trailing dot can be written as `<name>`.
//! A vertex satisfies a constraint when binding the focus to it admits a
//! homomorphism of every pattern into the graph; the other variables are
//! existential and must bind consistently across patterns.

use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{KnowledgeGraph, LabelId, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Vertex(VertexId),
    /// Index into [`SubstructureConstraint::variables`]; 0 is the focus.
    Var(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TriplePattern {
    pub subject: Term,
    pub predicate: LabelId,
    pub object: Term,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubstructureConstraint {
    variables: Vec<String>,
    patterns: Vec<TriplePattern>,
}

impl SubstructureConstraint {
    /// `variables[0]` is the focus. Checks that the focus is used and that the
    /// pattern graph (variables and concrete vertices as nodes) is connected.
    pub fn new(variables: Vec<String>, patterns: Vec<TriplePattern>) -> Result<Self> {
        let focus = variables
            .first()
            .cloned()
            .ok_or_else(|| Error::SyntaxError("missing focus variable".into()))?;
        let uses_focus = patterns
            .iter()
            .any(|p| p.subject == Term::Var(0) || p.object == Term::Var(0));
        if !uses_focus {
            return Err(Error::FocusUnused(focus));
        }
        for p in &patterns {
            for t in [p.subject, p.object] {
                if let Term::Var(i) = t {
                    if i >= variables.len() {
                        return Err(Error::SyntaxError(format!("variable index {i} out of range")));
                    }
                }
            }
        }
        let c = SubstructureConstraint {
            variables,
            patterns,
        };
        if !c.is_connected() {
            return Err(Error::SyntaxError(
                "patterns do not form a connected graph".into(),
            ));
        }
        Ok(c)
    }

    pub fn focus_name(&self) -> &str {
        &self.variables[0]
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn patterns(&self) -> &[TriplePattern] {
        &self.patterns
    }

    /// Concrete vertices mentioned by the patterns, sorted.
    pub fn concrete_vertices(&self) -> Vec<VertexId> {
        let mut out: Vec<VertexId> = self
            .patterns
            .iter()
            .flat_map(|p| [p.subject, p.object])
            .filter_map(|t| match t {
                Term::Vertex(v) => Some(v),
                Term::Var(_) => None,
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    fn is_connected(&self) -> bool {
        // union-find over terms
        let mut nodes: Vec<Term> = Vec::new();
        let id = |nodes: &mut Vec<Term>, t: Term| match nodes.iter().position(|&n| n == t) {
            Some(i) => i,
            None => {
                nodes.push(t);
                nodes.len() - 1
            }
        };
        let mut links = Vec::new();
        for p in &self.patterns {
            let a = id(&mut nodes, p.subject);
            let b = id(&mut nodes, p.object);
            links.push((a, b));
        }
        let mut parent: Vec<usize> = (0..nodes.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (a, b) in links {
            let ra = find(&mut parent, a);
            let rb = find(&mut parent, b);
            parent[ra] = rb;
        }
        let root = find(&mut parent, 0);
        (0..nodes.len()).all(|i| find(&mut parent, i) == root)
    }

    /// Renders the constraint in the text form accepted by [`parse_constraint`].
    pub fn to_text(&self, g: &KnowledgeGraph) -> String {
        let term = |t: Term| match t {
            Term::Var(i) => format!("?{}", self.variables[i]),
            Term::Vertex(v) => quote_name(g.vertex_name(v)),
        };
        let body: Vec<String> = self
            .patterns
            .iter()
            .map(|p| {
                format!(
                    "{} {} {}",
                    term(p.subject),
                    quote_name(g.label_name(p.predicate)),
                    term(p.object)
                )
            })
            .collect();
        format!("SELECT ?{} WHERE {{ {} }}", self.variables[0], body.join(" . "))
    }
}

fn quote_name(name: &str) -> String {
    let plain = !name.is_empty()
        && !name.starts_with('?')
        && !name.starts_with('<')
        && !name.ends_with('.')
        && !name.chars().any(|c| c.is_whitespace() || c == '{' || c == '}');
    if plain {
        name.to_owned()
    } else {
        format!("<{name}>")
    }
}

/// Sorted, duplicate-free set of vertices satisfying a constraint.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VertexSetResult {
    members: Vec<VertexId>,
}

impl VertexSetResult {
    pub fn from_unsorted(mut members: Vec<VertexId>) -> Self {
        members.sort_unstable();
        members.dedup();
        VertexSetResult { members }
    }

    pub fn members(&self) -> &[VertexId] {
        &self.members
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Word(String),
    Quoted(String),
    LBrace,
    RBrace,
    Dot,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Word(w) => write!(f, "`{w}`"),
            Token::Quoted(w) => write!(f, "`<{w}>`"),
            Token::LBrace => f.write_str("`{`"),
            Token::RBrace => f.write_str("`}`"),
            Token::Dot => f.write_str("`.`"),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let ends_word = |i: usize| i >= chars.len() || chars[i].is_whitespace() || chars[i] == '}';
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '{' {
            out.push(Token::LBrace);
            i += 1;
        } else if c == '}' {
            out.push(Token::RBrace);
            i += 1;
        } else if c == '.' && ends_word(i + 1) {
            out.push(Token::Dot);
            i += 1;
        } else if c == '<' {
            let start = i + 1;
            let Some(len) = chars[start..].iter().position(|&c| c == '>') else {
                return Err(Error::SyntaxError("unterminated `<`".into()));
            };
            out.push(Token::Quoted(chars[start..start + len].iter().collect()));
            i = start + len + 1;
        } else {
            let start = i;
            while i < chars.len() {
                let c = chars[i];
                if c.is_whitespace() || c == '{' || c == '}' || (c == '.' && ends_word(i + 1)) {
                    break;
                }
                i += 1;
            }
            out.push(Token::Word(chars[start..i].iter().collect()));
        }
    }
    Ok(out)
}

/// Parses the constraint DSL, resolving names against `g`.
pub fn parse_constraint(text: &str, g: &KnowledgeGraph) -> Result<SubstructureConstraint> {
    let tokens = tokenize(text)?;
    let mut it = tokens.into_iter().peekable();
    let syntax = |msg: String| Error::SyntaxError(msg);

    let expect_keyword = |it: &mut std::iter::Peekable<std::vec::IntoIter<Token>>, kw: &str| {
        match it.next() {
            Some(Token::Word(w)) if w.eq_ignore_ascii_case(kw) => Ok(()),
            Some(t) => Err(syntax(format!("expected {kw}, found {t}"))),
            None => Err(syntax(format!("expected {kw}, found end of input"))),
        }
    };
    expect_keyword(&mut it, "SELECT")?;
    let focus = match it.next() {
        Some(Token::Word(w)) if w.len() > 1 && w.starts_with('?') => w[1..].to_owned(),
        Some(t) => return Err(syntax(format!("expected a ?variable after SELECT, found {t}"))),
        None => return Err(syntax("expected a ?variable after SELECT".into())),
    };
    expect_keyword(&mut it, "WHERE")?;
    match it.next() {
        Some(Token::LBrace) => {}
        Some(t) => return Err(syntax(format!("expected `{{`, found {t}"))),
        None => return Err(syntax("expected `{`".into())),
    }

    let mut variables = vec![focus];
    let mut patterns = Vec::new();
    let term = |tok: Option<Token>, variables: &mut Vec<String>| -> Result<Term> {
        match tok {
            Some(Token::Word(w)) if w.starts_with('?') => {
                let name = &w[1..];
                if name.is_empty() {
                    return Err(Error::SyntaxError("empty variable name".into()));
                }
                let idx = match variables.iter().position(|v| v == name) {
                    Some(i) => i,
                    None => {
                        variables.push(name.to_owned());
                        variables.len() - 1
                    }
                };
                Ok(Term::Var(idx))
            }
            Some(Token::Word(w)) | Some(Token::Quoted(w)) => g
                .vertex_by_name(&w)
                .map(Term::Vertex)
                .ok_or(Error::UnknownVertexName(w)),
            Some(t) => Err(Error::SyntaxError(format!("expected a term, found {t}"))),
            None => Err(Error::SyntaxError("unexpected end of input".into())),
        }
    };
    loop {
        match it.peek() {
            Some(Token::RBrace) => {
                it.next();
                break;
            }
            None => return Err(syntax("missing `}`".into())),
            _ => {}
        }
        let subject = term(it.next(), &mut variables)?;
        let predicate = match it.next() {
            Some(Token::Word(w)) | Some(Token::Quoted(w)) if !w.starts_with('?') => g
                .label_by_name(&w)
                .ok_or(Error::UnknownLabelName(w))?,
            Some(t) => return Err(syntax(format!("expected a label name, found {t}"))),
            None => return Err(syntax("unexpected end of input".into())),
        };
        let object = term(it.next(), &mut variables)?;
        patterns.push(TriplePattern {
            subject,
            predicate,
            object,
        });
        match it.peek() {
            Some(Token::Dot) => {
                it.next();
            }
            Some(Token::RBrace) => {}
            Some(t) => return Err(syntax(format!("expected `.` or `}}`, found {t}"))),
            None => return Err(syntax("missing `}`".into())),
        }
    }
    if let Some(t) = it.next() {
        return Err(syntax(format!("trailing input starting at {t}")));
    }
    SubstructureConstraint::new(variables, patterns)
}

struct Matcher<'a> {
    g: &'a KnowledgeGraph,
    patterns: &'a [TriplePattern],
    binding: Vec<Option<VertexId>>,
    done: Vec<bool>,
}

impl Matcher<'_> {
    fn resolve(&self, t: Term) -> Option<VertexId> {
        match t {
            Term::Vertex(v) => Some(v),
            Term::Var(i) => self.binding[i],
        }
    }

    /// Most constrained open pattern: both ends bound, else the smallest
    /// adjacency list to scan.
    fn pick(&self) -> Option<usize> {
        let mut best: Option<(usize, usize)> = None;
        for (i, p) in self.patterns.iter().enumerate() {
            if self.done[i] {
                continue;
            }
            let cost = match (self.resolve(p.subject), self.resolve(p.object)) {
                (Some(_), Some(_)) => 0,
                (Some(s), None) => 1 + self.g.out_adjacency(s).len(),
                (None, Some(o)) => 1 + self.g.in_adjacency(o).len(),
                (None, None) => 1 + self.g.edge_count(),
            };
            if best.is_none_or(|(_, c)| cost < c) {
                best = Some((i, cost));
            }
        }
        best.map(|(i, _)| i)
    }

    fn bind(&mut self, t: Term, v: VertexId) -> Option<Option<usize>> {
        match t {
            Term::Vertex(c) => (c == v).then_some(None),
            Term::Var(i) => match self.binding[i] {
                Some(b) => (b == v).then_some(None),
                None => {
                    self.binding[i] = Some(v);
                    Some(Some(i))
                }
            },
        }
    }

    fn try_edge(&mut self, p: TriplePattern, s: VertexId, o: VertexId) -> bool {
        let Some(bs) = self.bind(p.subject, s) else {
            return false;
        };
        let ok = match self.bind(p.object, o) {
            Some(bo) => {
                let r = self.solve();
                if let Some(i) = bo {
                    self.binding[i] = None;
                }
                r
            }
            None => false,
        };
        if let Some(i) = bs {
            self.binding[i] = None;
        }
        ok
    }

    fn solve(&mut self) -> bool {
        let Some(i) = self.pick() else {
            return true;
        };
        let p = self.patterns[i];
        self.done[i] = true;
        let g = self.g;
        let found = match (self.resolve(p.subject), self.resolve(p.object)) {
            (Some(s), Some(o)) => g.has_edge(s, p.predicate, o) && self.solve(),
            (Some(s), None) => g
                .out_adjacency(s)
                .iter()
                .filter(|(l, _)| *l == p.predicate)
                .any(|&(_, o)| self.try_edge(p, s, o)),
            (None, Some(o)) => g
                .in_adjacency(o)
                .iter()
                .filter(|(l, _)| *l == p.predicate)
                .any(|&(_, s)| self.try_edge(p, s, o)),
            (None, None) => g
                .edges()
                .iter()
                .filter(|e| e.label == p.predicate)
                .any(|e| self.try_edge(p, e.source, e.target)),
        };
        self.done[i] = false;
        found
    }
}

/// Whether `v` satisfies `s` (the SCck check).
pub fn satisfies(g: &KnowledgeGraph, v: VertexId, s: &SubstructureConstraint) -> bool {
    let mut m = Matcher {
        g,
        patterns: &s.patterns,
        binding: vec![None; s.variables.len()],
        done: vec![false; s.patterns.len()],
    };
    m.binding[0] = Some(v);
    m.solve()
}

/// All vertices satisfying `s`, i.e. `V(S,G)`.
///
/// Candidates come from the most selective pattern touching the focus, then
/// each candidate is confirmed with [`satisfies`].
pub fn match_all(g: &KnowledgeGraph, s: &SubstructureConstraint) -> VertexSetResult {
    let mut label_freq = vec![0usize; g.label_count()];
    for e in g.edges() {
        label_freq[e.label.index()] += 1;
    }
    let focus = Term::Var(0);
    let estimate = |p: &TriplePattern| -> usize {
        if p.subject == focus && p.object == focus {
            label_freq[p.predicate.index()]
        } else if p.subject == focus {
            match p.object {
                Term::Vertex(o) => g.in_adjacency(o).len(),
                Term::Var(_) => label_freq[p.predicate.index()],
            }
        } else {
            match p.subject {
                Term::Vertex(src) => g.out_adjacency(src).len(),
                Term::Var(_) => label_freq[p.predicate.index()],
            }
        }
    };
    let seed = s
        .patterns
        .iter()
        .filter(|p| p.subject == focus || p.object == focus)
        .min_by_key(|p| estimate(p))
        .copied()
        .expect("constructor guarantees a focus pattern");

    let l = seed.predicate;
    let candidates: Vec<VertexId> = if seed.subject == focus {
        match seed.object {
            Term::Vertex(o) => g
                .in_adjacency(o)
                .iter()
                .filter(|(x, _)| *x == l)
                .map(|&(_, src)| src)
                .collect(),
            Term::Var(_) => g
                .edges()
                .iter()
                .filter(|e| e.label == l && (seed.object != focus || e.source == e.target))
                .map(|e| e.source)
                .collect(),
        }
    } else {
        match seed.subject {
            Term::Vertex(src) => g
                .out_adjacency(src)
                .iter()
                .filter(|(x, _)| *x == l)
                .map(|&(_, o)| o)
                .collect(),
            Term::Var(_) => g
                .edges()
                .iter()
                .filter(|e| e.label == l)
                .map(|e| e.target)
                .collect(),
        }
    };
    let mut candidates = VertexSetResult::from_unsorted(candidates).members;
    candidates.retain(|&v| satisfies(g, v, s));
    VertexSetResult {
        members: candidates,
    }
}
