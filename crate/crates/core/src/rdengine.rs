//! Forward-chaining engine over resolvent-degree upper bounds.
//!
//! Facts are keyed by `(group, p)` with `p = 0` standing for characteristic
//! zero. Axioms come from a line-oriented fact file; the general rules
//! (subgroups, abelian groups, extensions, `A_n` vs `S_n`, characteristic
//! comparison, invariant varieties and classical hypersurfaces) are built in.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::grouplab::{sp_order, su_order, u_order};

pub const DEFAULT_FACTS: &str = include_str!("default_facts.rd");
pub const TABLE_GROUPS: [&str; 4] = ["S6", "S7", "S8", "W(E6)"];
pub const TABLE_CHARS: [u32; 5] = [0, 2, 3, 5, 7];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown group id `{0}`")]
    UnknownGroup(String),
    #[error("line {line}: axiom has no citation")]
    Uncited { line: usize },
    #[error("no bound derivable for rd_{p}({group})")]
    Underivable { group: String, p: u32 },
    #[error("fact rd_{p}({group}) is absent")]
    Absent { group: String, p: u32 },
    #[error("unsound trace: {0}")]
    Unsound(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Family {
    Sp,
    SU,
    U,
    PSp,
    PSL,
}

impl Family {
    fn prefix(self) -> &'static str {
        match self {
            Family::Sp => "Sp",
            Family::SU => "SU",
            Family::U => "U",
            Family::PSp => "PSp",
            Family::PSL => "PSL",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroupKind {
    Sym(u32),
    Alt(u32),
    Cyclic(u32),
    Classical { family: Family, n: u32, q: u64 },
    WeylE6,
    /// `m.G`: a central extension of `G` by `Z/m`.
    CentralExt { m: u32, base: Box<GroupKind> },
    /// `Z_m * G`, glued along the common central subgroup.
    CentralProduct { m: u32, inner: Box<GroupKind> },
}

/// A symbolic group name together with its structural attributes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupId {
    kind: GroupKind,
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 { a } else { gcd(b, a % b) }
}

fn factorial(n: u32) -> Option<u128> {
    (1..=n as u128).try_fold(1u128, |acc, k| acc.checked_mul(k))
}

fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut r = 0;
    let mut t = q;
    while t.is_multiple_of(p) {
        t /= p;
        r += 1;
    }
    (t == 1).then_some((p, r))
}

impl GroupKind {
    fn name(&self) -> String {
        match self {
            GroupKind::Sym(n) => format!("S{n}"),
            GroupKind::Alt(n) => format!("A{n}"),
            GroupKind::Cyclic(m) => format!("Z{m}"),
            GroupKind::Classical { family, n, q } => format!("{}{n}({q})", family.prefix()),
            GroupKind::WeylE6 => "W(E6)".into(),
            GroupKind::CentralExt { m, base } => format!("{m}.{}", base.name()),
            GroupKind::CentralProduct { m, inner } => format!("Z{m}*{}", inner.name()),
        }
    }

    fn order(&self) -> Option<u128> {
        match self {
            GroupKind::Sym(n) => factorial(*n),
            GroupKind::Alt(n) => factorial(*n).map(|f| if *n >= 2 { f / 2 } else { f }),
            GroupKind::Cyclic(m) => Some(*m as u128),
            GroupKind::WeylE6 => Some(51840),
            GroupKind::Classical { family, n, q } => {
                let (n, q) = (*n, *q);
                if n > 12 || q > 1 << 16 {
                    return None;
                }
                match family {
                    Family::Sp => Some(sp_order(n / 2, q)),
                    Family::PSp => Some(sp_order(n / 2, q) / gcd(2, q as u128 - 1)),
                    Family::SU => Some(su_order(n, q)),
                    Family::U => Some(u_order(n, q)),
                    Family::PSL => {
                        let q = q as u128;
                        let mut o = q.checked_pow(n * (n - 1) / 2)?;
                        for i in 2..=n {
                            o = o.checked_mul(q.checked_pow(i)? - 1)?;
                        }
                        Some(o / gcd(n as u128, q - 1))
                    }
                }
            }
            GroupKind::CentralExt { m, base } => base.order()?.checked_mul(*m as u128),
            GroupKind::CentralProduct { m, inner } => {
                let glue = match inner.as_ref() {
                    GroupKind::CentralExt { m: k, .. } => gcd(*m as u128, *k as u128),
                    _ => 1,
                };
                inner.order()?.checked_mul(*m as u128).map(|o| o / glue)
            }
        }
    }

    fn is_abelian(&self) -> bool {
        match self {
            GroupKind::Sym(n) => *n <= 2,
            GroupKind::Alt(n) => *n <= 3,
            GroupKind::Cyclic(_) => true,
            _ => false,
        }
    }
}

impl GroupId {
    /// Parses `S7`, `A6`, `Z4`, `Sp4(3)`, `SU4(2)`, `U3(5)`, `PSp4(3)`,
    /// `PSL2(9)`, `W(E6)`, `2.A7`, `Z4*2.A7`.
    pub fn parse(s: &str) -> Result<GroupId, EngineError> {
        parse_kind(s.trim())
            .map(|kind| GroupId { kind })
            .ok_or_else(|| EngineError::UnknownGroup(s.to_string()))
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    pub fn name(&self) -> String {
        self.kind.name()
    }

    pub fn order(&self) -> Option<u128> {
        self.kind.order()
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == Some(1)
    }

    pub fn is_abelian(&self) -> bool {
        self.kind.is_abelian()
    }

    pub fn symmetric(n: u32) -> GroupId {
        GroupId { kind: GroupKind::Sym(n) }
    }
}

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

fn parse_uint<T: std::str::FromStr>(s: &str) -> Option<T> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

fn parse_kind(s: &str) -> Option<GroupKind> {
    if s == "W(E6)" {
        return Some(GroupKind::WeylE6);
    }
    if let Some((left, right)) = s.split_once('*') {
        let m = parse_uint(left.strip_prefix('Z')?)?;
        return Some(GroupKind::CentralProduct { m, inner: Box::new(parse_kind(right)?) });
    }
    if let Some((left, right)) = s.split_once('.') {
        let m: u32 = parse_uint(left)?;
        if m < 2 {
            return None;
        }
        return Some(GroupKind::CentralExt { m, base: Box::new(parse_kind(right)?) });
    }
    for (prefix, family) in
        [("PSp", Family::PSp), ("PSL", Family::PSL), ("Sp", Family::Sp), ("SU", Family::SU), ("U", Family::U)]
    {
        if let Some(rest) = s.strip_prefix(prefix) {
            let (n, q) = rest.strip_suffix(')')?.split_once('(')?;
            let n: u32 = parse_uint(n)?;
            let q: u64 = parse_uint(q)?;
            prime_power(q)?;
            let ok = match family {
                Family::Sp | Family::PSp => n >= 2 && n.is_multiple_of(2),
                _ => n >= 1,
            };
            return ok.then_some(GroupKind::Classical { family, n, q });
        }
    }
    let (head, tail) = s.split_at(s.chars().next().map_or(0, char::len_utf8));
    let v: u32 = parse_uint(tail)?;
    match head {
        "S" if v >= 1 => Some(GroupKind::Sym(v)),
        "A" if v >= 1 => Some(GroupKind::Alt(v)),
        "Z" if v >= 1 => Some(GroupKind::Cyclic(v)),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Axiom {
    Bound { group: String, p: u32, d: u32 },
    Subgroup { sub: String, sup: String },
    Extension { group: String, normal: String, quotient: String },
    CentralExtension { group: String, normal: String, quotient: String },
    Isomorphism { left: String, right: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CitedAxiom {
    pub axiom: Axiom,
    pub cite: String,
    pub line: usize,
}

/// An instance of the invariant-variety rule: `rd_p(G) <= max(b, rd_p(S_a))`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VarietyInstance {
    pub group: String,
    pub p: u32,
    pub a: u32,
    pub b: u32,
    pub certified_by: Vec<String>,
    pub cite: String,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct FactKey {
    pub group: String,
    pub p: u32,
}

impl FactKey {
    fn new(group: &str, p: u32) -> FactKey {
        FactKey { group: group.to_string(), p }
    }
}

impl fmt::Display for FactKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rd_{}({})", self.p, self.group)
    }
}

/// How a bound was obtained. `premises` records the premise bounds in force
/// when the rule fired, so the conclusion can be recomputed exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Justification {
    pub rule: String,
    pub cite: String,
    pub premises: Vec<(FactKey, u32)>,
    pub constant: u32,
}

impl Justification {
    fn value(&self) -> u32 {
        self.premises.iter().map(|(_, d)| *d).fold(self.constant, u32::max)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundFact {
    pub key: FactKey,
    pub bound: u32,
    pub why: Justification,
}

/// Built-in rules with their descriptive anchors.
pub const RULES: &[(&str, &str)] = &[
    ("axiom", "cited literature"),
    ("subgroup", "rd(H) <= rd(G) for H a subgroup of G"),
    ("abelian", "abelian groups have rd <= 1"),
    ("extension", "rd(G) <= max(rd A, rd B) for 1 -> A -> G -> B -> 1"),
    ("central-equality", "rd(G) = rd(B) when A is central, B != 1 and char does not divide |A|"),
    ("isomorphism", "isomorphic groups share rd"),
    ("alt-sym", "rd_p(A_n) = rd_p(S_n) for n >= 3"),
    ("char-zero", "rd_p(G) <= rd_0(G) for p > 0"),
    ("invariant-variety", "generically free action on a variety with an invariant pencil: rd <= max(b, rd(S_a))"),
    (
        "classical-hypersurface",
        "smooth invariant hypersurface of degree q+1: rd_p(G) <= max(n - 2, rd_p(S_{q+1})) for Sp_n(q), U_n(q)",
    ),
];

/// Check ids that certify the classical-hypersurface rule.
pub const CLASSICAL_CERTIFICATES: &[&str] = &[
    "prop3.1a.sympl-invariance",
    "prop3.1a.sympl-smooth",
    "prop3.1b.unit-invariance",
    "prop3.1b.unit-smooth",
    "prop3.1b.min-vanish",
];

pub fn rule_anchor(rule: &str) -> &'static str {
    RULES.iter().find(|(r, _)| *r == rule).map_or("", |(_, a)| a)
}

#[derive(Debug, Clone)]
pub struct Engine {
    groups: BTreeMap<String, GroupId>,
    axioms: Vec<CitedAxiom>,
    instances: Vec<VarietyInstance>,
    chars: Vec<u32>,
    facts: BTreeMap<FactKey, (u32, Justification)>,
}

/// A symbolic inequality `rd(from) <= rd(to)` used for equality detection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Step {
    pub from: FactKey,
    pub to: FactKey,
    pub rule: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Equality {
    pub forward: Vec<Step>,
    pub backward: Vec<Step>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceNode {
    pub fact: FactKey,
    pub bound: u32,
    pub rule: String,
    pub anchor: String,
    pub cite: String,
    pub children: Vec<TraceNode>,
}

impl TraceNode {
    pub fn leaves(&self) -> Vec<&TraceNode> {
        if self.children.is_empty() {
            vec![self]
        } else {
            self.children.iter().flat_map(|c| c.leaves()).collect()
        }
    }

    pub fn rules(&self) -> BTreeSet<&str> {
        let mut out: BTreeSet<&str> = self.children.iter().flat_map(|c| c.rules()).collect();
        out.insert(&self.rule);
        out
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(0, &mut out);
        out
    }

    fn render_into(&self, depth: usize, out: &mut String) {
        let pad = "  ".repeat(depth);
        let mut line = format!("{pad}{} <= {}  [{}]", self.fact, self.bound, self.rule);
        if !self.cite.is_empty() {
            line.push_str(&format!(" {}", self.cite));
        } else if !self.anchor.is_empty() {
            line.push_str(&format!(" {}", self.anchor));
        }
        out.push_str(&line);
        out.push('\n');
        for c in &self.children {
            c.render_into(depth + 1, out);
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Table {
    pub groups: Vec<String>,
    pub chars: Vec<u32>,
    pub cells: Vec<Vec<u32>>,
}

impl Table {
    pub fn render(&self) -> String {
        let w = self.groups.iter().map(|g| g.len()).max().unwrap_or(1).max(5);
        let mut out = format!("{:w$}", "p");
        for p in &self.chars {
            out.push_str(&format!(" {p:>3}"));
        }
        out.push('\n');
        for (g, row) in self.groups.iter().zip(&self.cells) {
            out.push_str(&format!("{g:w$}"));
            for d in row {
                out.push_str(&format!(" {d:>3}"));
            }
            out.push('\n');
        }
        out
    }
}

fn tokenize(line: &str, lineno: usize) -> Result<(Vec<String>, Option<String>), EngineError> {
    let (body, cite) = match line.find(" cite ") {
        Some(pos) => {
            let rest = line[pos + 6..].trim();
            let inner = rest
                .strip_prefix('"')
                .and_then(|r| r.strip_suffix('"'))
                .ok_or(EngineError::Parse { line: lineno, msg: "citation must be a quoted string".into() })?;
            if inner.trim().is_empty() {
                return Err(EngineError::Uncited { line: lineno });
            }
            (&line[..pos], Some(inner.to_string()))
        }
        None => (line, None),
    };
    Ok((body.split_whitespace().map(str::to_string).collect(), cite))
}

fn kv<'a>(tokens: &'a [String], key: &str, line: usize) -> Result<&'a str, EngineError> {
    tokens
        .iter()
        .find_map(|t| t.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .ok_or(EngineError::Parse { line, msg: format!("missing `{key}=`") })
}

fn kv_num(tokens: &[String], key: &str, line: usize) -> Result<u32, EngineError> {
    let v = kv(tokens, key, line)?;
    v.parse().map_err(|_| EngineError::Parse { line, msg: format!("`{key}` must be a number, got `{v}`") })
}

fn is_prime_char(p: u32) -> bool {
    p == 0 || (p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d)))
}

impl Engine {
    pub fn default_base() -> Engine {
        Engine::parse(DEFAULT_FACTS).expect("embedded fact base is well formed")
    }

    pub fn parse(src: &str) -> Result<Engine, EngineError> {
        let mut engine = Engine {
            groups: BTreeMap::new(),
            axioms: Vec::new(),
            instances: Vec::new(),
            chars: TABLE_CHARS.to_vec(),
            facts: BTreeMap::new(),
        };
        for (i, raw) in src.lines().enumerate() {
            let line = i + 1;
            let text = raw.trim();
            if text.is_empty() || text.starts_with('#') {
                continue;
            }
            engine.parse_line(text, line)?;
        }
        engine.close_universe();
        Ok(engine)
    }

    fn parse_line(&mut self, text: &str, line: usize) -> Result<(), EngineError> {
        let (tokens, cite) = tokenize(text, line)?;
        let bad = |msg: &str| EngineError::Parse { line, msg: msg.to_string() };
        match tokens.first().map(String::as_str) {
            Some("axiom") => {
                let cite = cite.ok_or(EngineError::Uncited { line })?;
                let kind = tokens.get(1).ok_or_else(|| bad("missing axiom kind"))?;
                let mut arg = |k: usize| -> Result<String, EngineError> {
                    let name = tokens.get(k).ok_or_else(|| bad("missing group argument"))?;
                    self.intern(name)
                };
                let axiom = match kind.as_str() {
                    "bound" => {
                        let group = arg(2)?;
                        let p = kv_num(&tokens, "p", line)?;
                        let d = kv_num(&tokens, "d", line)?;
                        if !is_prime_char(p) {
                            return Err(bad("characteristic must be 0 or prime"));
                        }
                        if d == 0 && !GroupId::parse(&group)?.is_trivial() {
                            return Err(bad("bound below the floor of 1 for a nontrivial group"));
                        }
                        Axiom::Bound { group, p, d }
                    }
                    "subgroup" => Axiom::Subgroup { sub: arg(2)?, sup: arg(3)? },
                    "extension" => Axiom::Extension { group: arg(2)?, normal: arg(3)?, quotient: arg(4)? },
                    "central-extension" => {
                        let (group, normal, quotient) = (arg(2)?, arg(3)?, arg(4)?);
                        if !GroupId::parse(&normal)?.is_abelian() {
                            return Err(bad("central subgroup must be abelian"));
                        }
                        Axiom::CentralExtension { group, normal, quotient }
                    }
                    "isomorphism" => Axiom::Isomorphism { left: arg(2)?, right: arg(3)? },
                    other => return Err(bad(&format!("unknown axiom kind `{other}`"))),
                };
                self.check_orders(&axiom).map_err(|m| bad(&m))?;
                self.axioms.push(CitedAxiom { axiom, cite, line });
            }
            Some("rule-instance") => {
                match tokens.get(1).map(String::as_str) {
                    Some("invariant-variety") => {}
                    Some(other) => return Err(bad(&format!("unknown rule `{other}`"))),
                    None => return Err(bad("missing rule id")),
                }
                let group = self.intern(tokens.get(2).ok_or_else(|| bad("missing group"))?)?;
                let p = kv_num(&tokens, "p", line)?;
                if !is_prime_char(p) {
                    return Err(bad("characteristic must be 0 or prime"));
                }
                let a = kv_num(&tokens, "a", line)?;
                let b = kv_num(&tokens, "b", line)?;
                if a == 0 {
                    return Err(bad("`a` must be at least 1"));
                }
                let certified_by: Vec<String> =
                    kv(&tokens, "certified-by", line)?.split(',').map(str::to_string).collect();
                self.intern(&format!("S{a}"))?;
                self.instances.push(VarietyInstance {
                    group,
                    p,
                    a,
                    b,
                    certified_by,
                    cite: cite.unwrap_or_default(),
                    line,
                });
            }
            Some(other) => return Err(bad(&format!("unknown directive `{other}`"))),
            None => {}
        }
        Ok(())
    }

    fn check_orders(&self, axiom: &Axiom) -> Result<(), String> {
        let ord = |g: &str| self.groups[g].order();
        match axiom {
            Axiom::Subgroup { sub, sup } => {
                if let (Some(h), Some(g)) = (ord(sub), ord(sup)) {
                    if g % h != 0 {
                        return Err(format!("|{sub}| = {h} does not divide |{sup}| = {g}"));
                    }
                }
            }
            Axiom::Extension { group, normal, quotient } | Axiom::CentralExtension { group, normal, quotient } => {
                if let (Some(g), Some(a), Some(b)) = (ord(group), ord(normal), ord(quotient)) {
                    if a.checked_mul(b) != Some(g) {
                        return Err(format!("|{group}| = {g} is not |{normal}| * |{quotient}| = {a} * {b}"));
                    }
                }
            }
            Axiom::Isomorphism { left, right } => {
                if let (Some(a), Some(b)) = (ord(left), ord(right)) {
                    if a != b {
                        return Err(format!("|{left}| = {a} differs from |{right}| = {b}"));
                    }
                }
            }
            Axiom::Bound { .. } => {}
        }
        Ok(())
    }

    fn intern(&mut self, name: &str) -> Result<String, EngineError> {
        let id = GroupId::parse(name)?;
        let canon = id.name();
        self.groups.entry(canon.clone()).or_insert(id);
        Ok(canon)
    }

    /// Adds the companions the built-in rules need: `S_n` for each `A_n`
    /// and back, and `S_{q+1}` for each classical group.
    fn close_universe(&mut self) {
        let mut extra = Vec::new();
        for id in self.groups.values() {
            match id.kind() {
                GroupKind::Alt(n) if *n >= 3 => extra.push(format!("S{n}")),
                GroupKind::Sym(n) if *n >= 3 => extra.push(format!("A{n}")),
                GroupKind::Classical { family: Family::Sp | Family::U, q, .. } => extra.push(format!("S{}", q + 1)),
                _ => {}
            }
        }
        for name in extra {
            self.intern(&name).expect("companion names parse");
        }
    }

    pub fn axioms(&self) -> &[CitedAxiom] {
        &self.axioms
    }

    pub fn instances(&self) -> &[VarietyInstance] {
        &self.instances
    }

    pub fn groups(&self) -> impl Iterator<Item = &GroupId> {
        self.groups.values()
    }

    pub fn characteristics(&self) -> &[u32] {
        &self.chars
    }

    /// Every check id the engine's certified rules rely on.
    pub fn certificate_ids(&self) -> BTreeSet<String> {
        let mut ids: BTreeSet<String> = CLASSICAL_CERTIFICATES.iter().map(|s| s.to_string()).collect();
        for inst in &self.instances {
            ids.extend(inst.certified_by.iter().cloned());
        }
        ids
    }

    /// Adds an axiom after loading, e.g. for monotonicity experiments.
    pub fn add_axiom(&mut self, axiom: Axiom, cite: &str) -> Result<(), EngineError> {
        if cite.trim().is_empty() {
            return Err(EngineError::Uncited { line: 0 });
        }
        let mut canon = axiom;
        match &mut canon {
            Axiom::Bound { group, .. } => *group = self.intern(group)?,
            Axiom::Subgroup { sub, sup } => {
                *sub = self.intern(sub)?;
                *sup = self.intern(sup)?;
            }
            Axiom::Extension { group, normal, quotient } | Axiom::CentralExtension { group, normal, quotient } => {
                *group = self.intern(group)?;
                *normal = self.intern(normal)?;
                *quotient = self.intern(quotient)?;
            }
            Axiom::Isomorphism { left, right } => {
                *left = self.intern(left)?;
                *right = self.intern(right)?;
            }
        }
        self.check_orders(&canon).map_err(|msg| EngineError::Parse { line: 0, msg })?;
        self.axioms.push(CitedAxiom { axiom: canon, cite: cite.to_string(), line: 0 });
        self.close_universe();
        Ok(())
    }

    pub fn remove_axiom(&mut self, index: usize) -> CitedAxiom {
        self.axioms.remove(index)
    }

    fn bound_of(&self, group: &str, p: u32) -> Option<u32> {
        self.facts.get(&FactKey::new(group, p)).map(|(d, _)| *d)
    }

    fn central_equality_applies(&self, normal: &str, quotient: &str, p: u32) -> bool {
        let b_nontrivial = !self.groups[quotient].is_trivial();
        let coprime = p == 0 || self.groups[normal].order().is_some_and(|a| a % p as u128 != 0);
        b_nontrivial && coprime
    }

    /// All rule firings available from the current fact set.
    fn candidates(&self) -> Vec<BoundFact> {
        let mut out = Vec::new();
        let premise = |g: &str, p: u32| self.bound_of(g, p).map(|d| (FactKey::new(g, p), d));
        let mut push = |key: FactKey, rule: &str, cite: &str, premises: Vec<(FactKey, u32)>, constant: u32| {
            let why = Justification { rule: rule.into(), cite: cite.into(), premises, constant };
            out.push(BoundFact { bound: why.value(), key, why });
        };
        for ax in &self.axioms {
            let cite = ax.cite.as_str();
            match &ax.axiom {
                Axiom::Bound { group, p, d } => push(FactKey::new(group, *p), "axiom", cite, vec![], *d),
                Axiom::Subgroup { sub, sup } => {
                    for &p in &self.chars {
                        if let Some(pr) = premise(sup, p) {
                            push(FactKey::new(sub, p), "subgroup", cite, vec![pr], 0);
                        }
                    }
                }
                Axiom::Extension { group, normal, quotient }
                | Axiom::CentralExtension { group, normal, quotient } => {
                    let central = matches!(ax.axiom, Axiom::CentralExtension { .. });
                    for &p in &self.chars {
                        if let (Some(a), Some(b)) = (premise(normal, p), premise(quotient, p)) {
                            push(FactKey::new(group, p), "extension", cite, vec![a, b], 0);
                        }
                        if central && self.central_equality_applies(normal, quotient, p) {
                            if let Some(b) = premise(quotient, p) {
                                push(FactKey::new(group, p), "central-equality", cite, vec![b], 0);
                            }
                            if let Some(g) = premise(group, p) {
                                push(FactKey::new(quotient, p), "central-equality", cite, vec![g], 0);
                            }
                        }
                    }
                }
                Axiom::Isomorphism { left, right } => {
                    for &p in &self.chars {
                        if let Some(r) = premise(right, p) {
                            push(FactKey::new(left, p), "isomorphism", cite, vec![r], 0);
                        }
                        if let Some(l) = premise(left, p) {
                            push(FactKey::new(right, p), "isomorphism", cite, vec![l], 0);
                        }
                    }
                }
            }
        }
        for (name, id) in &self.groups {
            for &p in &self.chars {
                if id.is_abelian() {
                    push(FactKey::new(name, p), "abelian", "", vec![], if id.is_trivial() { 0 } else { 1 });
                }
                if p > 0 {
                    if let Some(pr) = premise(name, 0) {
                        push(FactKey::new(name, p), "char-zero", "", vec![pr], 0);
                    }
                }
                match id.kind() {
                    GroupKind::Alt(n) if *n >= 3 => {
                        if let Some(pr) = premise(&format!("S{n}"), p) {
                            push(FactKey::new(name, p), "alt-sym", "", vec![pr], 0);
                        }
                    }
                    GroupKind::Sym(n) if *n >= 3 => {
                        if let Some(pr) = premise(&format!("A{n}"), p) {
                            push(FactKey::new(name, p), "alt-sym", "", vec![pr], 0);
                        }
                    }
                    GroupKind::Classical { family: Family::Sp | Family::U, n, q } if *n >= 3 => {
                        let char_q = prime_power(*q).map(|(c, _)| c as u32);
                        if char_q == Some(p) {
                            if let Some(pr) = premise(&format!("S{}", q + 1), p) {
                                push(FactKey::new(name, p), "classical-hypersurface", "", vec![pr], n - 2);
                            }
                        }
                    }
                    _ => {}
                }
            }
        }
        for inst in &self.instances {
            if let Some(pr) = premise(&format!("S{}", inst.a), inst.p) {
                push(FactKey::new(&inst.group, inst.p), "invariant-variety", &inst.cite, vec![pr], inst.b);
            }
        }
        out
    }

    /// Forward chaining to the fixpoint. Returns the number of rounds.
    pub fn derive(&mut self) -> usize {
        self.facts.clear();
        let mut rounds = 0;
        loop {
            rounds += 1;
            let mut changed = false;
            for fact in self.candidates() {
                let better = self.facts.get(&fact.key).is_none_or(|(d, _)| fact.bound < *d);
                if better {
                    self.facts.insert(fact.key, (fact.bound, fact.why));
                    changed = true;
                }
            }
            if !changed {
                return rounds;
            }
        }
    }

    pub fn bound(&self, group: &str, p: u32) -> Option<u32> {
        let canon = GroupId::parse(group).ok()?.name();
        self.bound_of(&canon, p)
    }

    pub fn facts(&self) -> impl Iterator<Item = BoundFact> + '_ {
        self.facts.iter().map(|(k, (d, why))| BoundFact { key: k.clone(), bound: *d, why: why.clone() })
    }

    pub fn table(&self, groups: &[&str], chars: &[u32]) -> Result<Table, EngineError> {
        let mut cells = Vec::new();
        let mut names = Vec::new();
        for g in groups {
            let canon = GroupId::parse(g)?.name();
            let row = chars
                .iter()
                .map(|&p| {
                    self.bound_of(&canon, p).ok_or(EngineError::Underivable { group: canon.clone(), p })
                })
                .collect::<Result<Vec<_>, _>>()?;
            names.push(canon);
            cells.push(row);
        }
        Ok(Table { groups: names, chars: chars.to_vec(), cells })
    }

    pub fn explain(&self, group: &str, p: u32) -> Result<TraceNode, EngineError> {
        let canon = GroupId::parse(group)?.name();
        self.trace(&FactKey::new(&canon, p), 0)
    }

    fn trace(&self, key: &FactKey, depth: usize) -> Result<TraceNode, EngineError> {
        if depth > self.facts.len() {
            return Err(EngineError::Unsound(format!("cyclic trace through {key}")));
        }
        let (bound, why) =
            self.facts.get(key).ok_or(EngineError::Absent { group: key.group.clone(), p: key.p })?;
        let children = why.premises.iter().map(|(k, _)| self.trace(k, depth + 1)).collect::<Result<_, _>>()?;
        Ok(TraceNode {
            fact: key.clone(),
            bound: *bound,
            rule: why.rule.clone(),
            anchor: rule_anchor(&why.rule).to_string(),
            cite: why.cite.clone(),
            children,
        })
    }

    /// Re-checks every derived fact: the rule's side conditions hold, the
    /// recorded premise bounds reproduce the conclusion, the premises are
    /// at least as strong now, and the trace reaches cited axioms.
    pub fn replay(&self) -> Result<usize, EngineError> {
        for (key, (bound, why)) in &self.facts {
            let err = |m: String| Err(EngineError::Unsound(format!("{key}: {m}")));
            if why.value() != *bound {
                return err(format!("premises give {} but {} was recorded", why.value(), bound));
            }
            if *bound < 1 && !self.groups[&key.group].is_trivial() {
                return err("bound below 1 for a nontrivial group".into());
            }
            for (pk, used) in &why.premises {
                match self.facts.get(pk) {
                    Some((now, _)) if now <= used => {}
                    _ => return err(format!("premise {pk} no longer supports {used}")),
                }
            }
            if !self.side_conditions(key, why) {
                return err(format!("side conditions of `{}` fail", why.rule));
            }
            let trace = self.trace(key, 0)?;
            for leaf in trace.leaves() {
                if leaf.rule == "axiom" && leaf.cite.is_empty() {
                    return err(format!("leaf {} lacks a citation", leaf.fact));
                }
                if leaf.rule != "axiom" && leaf.rule != "abelian" {
                    return err(format!("leaf {} is not an axiom", leaf.fact));
                }
            }
        }
        Ok(self.facts.len())
    }

    fn side_conditions(&self, key: &FactKey, why: &Justification) -> bool {
        let g = &self.groups[&key.group];
        let prem = |i: usize| why.premises.get(i).map(|(k, _)| k);
        let same_p = why.premises.iter().all(|(k, _)| k.p == key.p);
        match why.rule.as_str() {
            "axiom" => self.axioms.iter().any(|ax| {
                ax.cite == why.cite
                    && matches!(&ax.axiom, Axiom::Bound { group, p, d }
                        if *group == key.group && *p == key.p && *d == why.constant)
            }),
            "abelian" => g.is_abelian() && why.premises.is_empty() && why.constant <= 1,
            "subgroup" => {
                same_p
                    && prem(0).is_some_and(|sup| {
                        self.axioms.iter().any(|ax| {
                            matches!(&ax.axiom, Axiom::Subgroup { sub, sup: s } if *sub == key.group && *s == sup.group)
                        })
                    })
            }
            "extension" => {
                same_p
                    && why.premises.len() == 2
                    && self.axioms.iter().any(|ax| match &ax.axiom {
                        Axiom::Extension { group, normal, quotient }
                        | Axiom::CentralExtension { group, normal, quotient } => {
                            *group == key.group && prem(0).unwrap().group == *normal && prem(1).unwrap().group == *quotient
                        }
                        _ => false,
                    })
            }
            "central-equality" => {
                same_p
                    && prem(0).is_some_and(|other| {
                        self.axioms.iter().any(|ax| match &ax.axiom {
                            Axiom::CentralExtension { group, normal, quotient } => {
                                let pair = (*group == key.group && *quotient == other.group)
                                    || (*quotient == key.group && *group == other.group);
                                pair && self.central_equality_applies(normal, quotient, key.p)
                            }
                            _ => false,
                        })
                    })
            }
            "isomorphism" => {
                same_p
                    && prem(0).is_some_and(|other| {
                        self.axioms.iter().any(|ax| {
                            matches!(&ax.axiom, Axiom::Isomorphism { left, right }
                                if (*left == key.group && *right == other.group)
                                    || (*right == key.group && *left == other.group))
                        })
                    })
            }
            "alt-sym" => {
                same_p
                    && prem(0).is_some_and(|other| match (g.kind(), self.groups[&other.group].kind()) {
                        (GroupKind::Alt(n), GroupKind::Sym(m)) | (GroupKind::Sym(n), GroupKind::Alt(m)) => {
                            n == m && *n >= 3
                        }
                        _ => false,
                    })
            }
            "char-zero" => key.p > 0 && prem(0).is_some_and(|o| o.p == 0 && o.group == key.group),
            "classical-hypersurface" => match g.kind() {
                GroupKind::Classical { family: Family::Sp | Family::U, n, q } => {
                    same_p
                        && *n >= 3
                        && prime_power(*q).map(|(c, _)| c as u32) == Some(key.p)
                        && why.constant == n - 2
                        && prem(0).is_some_and(|s| s.group == format!("S{}", q + 1))
                }
                _ => false,
            },
            "invariant-variety" => {
                same_p
                    && self.instances.iter().any(|inst| {
                        inst.group == key.group
                            && inst.p == key.p
                            && inst.b == why.constant
                            && prem(0).is_some_and(|s| s.group == format!("S{}", inst.a))
                    })
            }
            _ => false,
        }
    }

    /// Symbolic inequalities `rd(x) <= rd(y)` implied by the rules, using
    /// the floor `rd >= 1` to drop constants `<= 1` from a maximum.
    pub fn dominance_edges(&self) -> Vec<Step> {
        let mut out = Vec::new();
        let nontrivial = |g: &str| !self.groups[g].is_trivial();
        let mut edge = |a: &str, pa: u32, b: &str, pb: u32, rule: &str| {
            out.push(Step { from: FactKey::new(a, pa), to: FactKey::new(b, pb), rule: rule.into() });
        };
        for ax in &self.axioms {
            for &p in &self.chars {
                match &ax.axiom {
                    Axiom::Subgroup { sub, sup } => edge(sub, p, sup, p, "subgroup"),
                    Axiom::Isomorphism { left, right } => {
                        edge(left, p, right, p, "isomorphism");
                        edge(right, p, left, p, "isomorphism");
                    }
                    Axiom::Extension { group, normal, quotient }
                    | Axiom::CentralExtension { group, normal, quotient } => {
                        if matches!(ax.axiom, Axiom::CentralExtension { .. })
                            && self.central_equality_applies(normal, quotient, p)
                        {
                            edge(group, p, quotient, p, "central-equality");
                            edge(quotient, p, group, p, "central-equality");
                        }
                        if self.bound_of(normal, p).is_some_and(|d| d <= 1) && nontrivial(quotient) {
                            edge(group, p, quotient, p, "extension");
                        }
                        if self.bound_of(quotient, p).is_some_and(|d| d <= 1) && nontrivial(normal) {
                            edge(group, p, normal, p, "extension");
                        }
                    }
                    Axiom::Bound { .. } => {}
                }
            }
        }
        for (name, id) in &self.groups {
            for &p in &self.chars {
                if p > 0 {
                    edge(name, p, name, 0, "char-zero");
                }
                match id.kind() {
                    GroupKind::Alt(n) if *n >= 3 => {
                        edge(name, p, &format!("S{n}"), p, "alt-sym");
                        edge(&format!("S{n}"), p, name, p, "alt-sym");
                    }
                    GroupKind::Classical { family: Family::Sp | Family::U, n, q } if *n >= 3 && *n - 2 <= 1
                        && prime_power(*q).map(|(c, _)| c as u32) == Some(p) => {
                            edge(name, p, &format!("S{}", q + 1), p, "classical-hypersurface");
                        }
                    _ => {}
                }
            }
        }
        for inst in &self.instances {
            if inst.b <= 1 && inst.a >= 2 {
                edge(&inst.group, inst.p, &format!("S{}", inst.a), inst.p, "invariant-variety");
            }
        }
        out
    }

    fn path(&self, edges: &[Step], from: &FactKey, to: &FactKey) -> Option<Vec<Step>> {
        let mut prev: BTreeMap<&FactKey, &Step> = BTreeMap::new();
        let mut seen: BTreeSet<&FactKey> = BTreeSet::from([from]);
        let mut queue = VecDeque::from([from]);
        while let Some(cur) = queue.pop_front() {
            if cur == to {
                let mut steps = Vec::new();
                let mut at = to;
                while at != from {
                    let s = prev[at];
                    steps.push(s.clone());
                    at = &s.from;
                }
                steps.reverse();
                return Some(steps);
            }
            for e in edges.iter().filter(|e| &e.from == cur) {
                if seen.insert(&e.to) {
                    prev.insert(&e.to, e);
                    queue.push_back(&e.to);
                }
            }
        }
        None
    }

    /// `rd_p(a) = rd_p(b)` when both inequalities are traceable.
    pub fn equality(&self, a: &str, b: &str, p: u32) -> Option<Equality> {
        let ka = FactKey::new(&GroupId::parse(a).ok()?.name(), p);
        let kb = FactKey::new(&GroupId::parse(b).ok()?.name(), p);
        let edges = self.dominance_edges();
        let forward = self.path(&edges, &ka, &kb)?;
        let backward = self.path(&edges, &kb, &ka)?;
        Some(Equality { forward, backward })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn derived() -> Engine {
        let mut e = Engine::default_base();
        e.derive();
        e
    }

    #[test]
    fn group_ids_parse_canonically() {
        for (s, order) in [
            ("S7", 5040u128),
            ("A6", 360),
            ("Z4", 4),
            ("PSL2(9)", 360),
            ("Sp4(3)", 51840),
            ("PSp4(3)", 25920),
            ("SU4(2)", 25920),
            ("W(E6)", 51840),
            ("2.A7", 5040),
            ("Z4*2.A7", 10080),
            ("U3(5)", 2268000),
        ] {
            let g = GroupId::parse(s).unwrap();
            assert_eq!(g.name(), s);
            assert_eq!(g.order(), Some(order), "{s}");
        }
        for bad in ["S", "X7", "Sp3(3)", "SU4(6)", "1.A7", "Z4*", "S7x"] {
            assert!(GroupId::parse(bad).is_err(), "{bad}");
        }
        assert!(GroupId::parse("Z1").unwrap().is_trivial());
        assert!(GroupId::parse("A3").unwrap().is_abelian());
    }

    #[test]
    fn default_base_loads() {
        let e = Engine::default_base();
        assert!(e.axioms().len() >= 12);
        assert!(e.axioms().iter().any(|a| a.cite.contains("Table 8.11")));
    }

    #[test]
    fn uncited_and_unknown_rejected() {
        assert_eq!(Engine::parse("axiom bound S6 p=0 d=2").unwrap_err(), EngineError::Uncited { line: 1 });
        assert_eq!(Engine::parse("axiom bound S6 p=0 d=2 cite \"\"").unwrap_err(), EngineError::Uncited { line: 1 });
        assert!(matches!(
            Engine::parse("axiom subgroup Q8 S8 cite \"x\"").unwrap_err(),
            EngineError::UnknownGroup(_)
        ));
        assert!(matches!(
            Engine::parse("axiom subgroup S8 S7 cite \"x\"").unwrap_err(),
            EngineError::Parse { .. }
        ));
        assert!(matches!(
            Engine::parse("axiom bound S6 p=4 d=2 cite \"x\"").unwrap_err(),
            EngineError::Parse { .. }
        ));
    }

    #[test]
    fn reproduces_summary_table() {
        let e = derived();
        let t = e.table(&TABLE_GROUPS, &TABLE_CHARS).unwrap();
        assert_eq!(t.cells, vec![vec![2, 2, 1, 2, 2], vec![3, 3, 2, 2, 2], vec![4, 3, 4, 4, 4], vec![3, 2, 2, 2, 3]]);
        assert!(e.replay().unwrap() > 20);
    }

    #[test]
    fn s7_in_char_three_routes_through_unitary_group() {
        let e = derived();
        let t = e.explain("S7", 3).unwrap();
        let rules = t.rules();
        for r in ["alt-sym", "central-equality", "subgroup", "classical-hypersurface"] {
            assert!(rules.contains(r), "{r} missing from\n{}", t.render());
        }
        let leaves: Vec<String> = t.leaves().iter().map(|l| l.cite.clone()).collect();
        assert!(leaves.iter().any(|c| c.contains("Table 8.11")) || t.render().contains("Table 8.11"));
        assert!(t.render().contains("rd_3(U4(3)) <= 2"));
        assert!(t.render().contains("rd_3(S4) <= 1"));
    }

    #[test]
    fn s6_in_char_three_uses_psl2_9() {
        let e = derived();
        let t = e.explain("S6", 3).unwrap().render();
        assert!(t.contains("PSL2(9)") && t.contains("invariant-variety") && t.contains("ATLAS"), "{t}");
    }

    #[test]
    fn s8_in_char_two_uses_cone_base() {
        let e = derived();
        let t = e.explain("S8", 2).unwrap();
        assert_eq!(t.bound, 3);
        assert!(t.rules().contains("invariant-variety"));
    }

    #[test]
    fn absent_fact_reported() {
        let e = derived();
        assert!(matches!(e.explain("S9", 3), Err(EngineError::Absent { .. })));
        let empty = Engine::parse("").unwrap();
        assert!(matches!(empty.table(&["S6"], &[0]), Err(EngineError::Underivable { .. })));
    }

    #[test]
    fn equality_in_char_five() {
        let e = derived();
        let eq = e.equality("S7", "S6", 5).expect("both directions traceable");
        assert!(eq.forward.iter().any(|s| s.rule == "classical-hypersurface"));
        assert!(eq.backward.iter().any(|s| s.rule == "subgroup"));
        assert!(e.equality("S7", "S6", 0).is_none());
    }

    #[test]
    fn central_equality_needs_coprime_order() {
        let src = "axiom bound A7 p=0 d=9 cite \"x\"\naxiom bound 2.A7 p=0 d=3 cite \"x\"\n\
                   axiom central-extension 2.A7 Z2 A7 cite \"x\"\naxiom bound 2.A7 p=2 d=2 cite \"x\"";
        let mut e = Engine::parse(src).unwrap();
        e.derive();
        assert_eq!(e.bound("A7", 0), Some(3));
        // char 2 divides |Z2|: only the char-zero fallback applies.
        assert_eq!(e.bound("A7", 2), Some(3));
        e.replay().unwrap();
    }

    #[test]
    fn floor_respected() {
        let e = derived();
        for f in e.facts() {
            if !GroupId::parse(&f.key.group).unwrap().is_trivial() {
                assert!(f.bound >= 1, "{}", f.key);
            }
        }
    }
}
