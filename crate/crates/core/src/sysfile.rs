//! Text format for systems, wave matrices, hydrodynamic systems and adapted
//! distributions.
//!
//! ```text
//! # comment
//! format = 1
//! kind = "dmz"
//! coords = ["x", "y", "z"]
//! Gamma[1][2][1] = "z^3/(y*z^3-1)"
//! C[1][2] = "0"
//!
//! [field X]
//! x = "1"
//! w1 = "v1"
//! ```
//!
//! Top-level keys: `format`, `kind`, `coords`, `chart`, `opaque`, `expect`, `check`,
//! `jets`, `bases`, `p`, and the indexed families `Gamma[i][j][k]` (`Γ^k_ij`),
//! `C[i][j]`, `A[i][j]`, `f[i][j]`, `v[i]`, `w[i]`, `h[i]`, `part[i]`,
//! `inverse[name]`, `map[name]`. Indices are one-based.

use crate::dmz::{AdaptedData, DmzSystem, GdmzSystem, LamePotentials};
use crate::geometry::{Chart, Distribution, VectorField};
use crate::hydro::HydroSystem;
use crate::jets::{contact_basis, pushforward, JetProduct, SymbolicMap};
use crate::symkernel::{parse_with, Expr, ParseOptions};
use crate::waves::WaveMatrix;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

pub const FORMAT_VERSION: i64 = 1;

pub const KINDS: [&str; 6] = ["dmz", "gdmz", "wave", "hydro", "distribution", "jetquotient"];

#[derive(Debug, thiserror::Error)]
pub enum FileError {
    #[error("{path}:{line}:{col}: {message}")]
    At {
        path: String,
        line: usize,
        col: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Whole { path: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Str(String),
    Int(i64),
    List(Vec<Value>),
}

impl Value {
    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::Str(s) => Some(s),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Str(s) => write!(f, "\"{}\"", s),
            Value::Int(n) => write!(f, "{}", n),
            Value::List(xs) => {
                write!(f, "[")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{}", x)?;
                }
                write!(f, "]")
            }
        }
    }
}

/// `name[idx]...[idx] = value` at a source position.
#[derive(Clone, Debug, PartialEq)]
pub struct Entry {
    pub name: String,
    pub indices: Vec<String>,
    pub value: Value,
    pub line: usize,
    /// Column of the value.
    pub col: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Section {
    pub kind: String,
    pub name: String,
    pub line: usize,
    pub entries: Vec<Entry>,
}

#[derive(Clone, Debug, Default)]
pub struct SystemFile {
    pub path: String,
    pub entries: Vec<Entry>,
    pub sections: Vec<Section>,
}

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn ws(&mut self) {
        while self.pos < self.s.len() && (self.s[self.pos] == b' ' || self.s[self.pos] == b'\t') {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        self.ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Option<String> {
        self.ws();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == b'_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        (self.pos > start).then(|| String::from_utf8_lossy(&self.s[start..self.pos]).into_owned())
    }

    fn value(&mut self) -> Result<Value, (usize, String)> {
        self.ws();
        match self.peek() {
            Some(b'"') => {
                self.pos += 1;
                let start = self.pos;
                while let Some(c) = self.peek() {
                    if c == b'"' {
                        let s = String::from_utf8_lossy(&self.s[start..self.pos]).into_owned();
                        self.pos += 1;
                        return Ok(Value::Str(s));
                    }
                    self.pos += 1;
                }
                Err((start - 1, "unterminated string".into()))
            }
            Some(b'[') => {
                self.pos += 1;
                let mut items = Vec::new();
                if self.eat(b']') {
                    return Ok(Value::List(items));
                }
                loop {
                    items.push(self.value()?);
                    if self.eat(b']') {
                        return Ok(Value::List(items));
                    }
                    if !self.eat(b',') {
                        return Err((self.pos, "expected `,` or `]`".into()));
                    }
                }
            }
            Some(c) if c == b'-' || c.is_ascii_digit() => {
                let start = self.pos;
                self.pos += 1;
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
                let text = String::from_utf8_lossy(&self.s[start..self.pos]).into_owned();
                text.parse().map(Value::Int).map_err(|_| (start, format!("bad integer `{}`", text)))
            }
            _ => Err((self.pos, "expected a string, integer or list".into())),
        }
    }
}

fn strip_comment(line: &str) -> &str {
    let mut in_str = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => in_str = !in_str,
            '#' if !in_str => return &line[..i],
            _ => {}
        }
    }
    line
}

impl SystemFile {
    pub fn parse(path: &str, text: &str) -> Result<SystemFile, FileError> {
        let mut file = SystemFile {
            path: path.to_string(),
            ..Default::default()
        };
        let err = |line: usize, col: usize, message: String| FileError::At {
            path: path.to_string(),
            line,
            col,
            message,
        };
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = strip_comment(raw);
            if line.trim().is_empty() {
                continue;
            }
            let mut c = Cursor {
                s: line.as_bytes(),
                pos: 0,
            };
            if c.eat(b'[') {
                let kind = c.ident().ok_or_else(|| err(line_no, c.pos + 1, "expected section kind".into()))?;
                let name = c.ident().unwrap_or_default();
                if !c.eat(b']') {
                    return Err(err(line_no, c.pos + 1, "expected `]`".into()));
                }
                file.sections.push(Section {
                    kind,
                    name,
                    line: line_no,
                    entries: Vec::new(),
                });
                continue;
            }
            let name = c.ident().ok_or_else(|| err(line_no, c.pos + 1, "expected a key".into()))?;
            let mut indices = Vec::new();
            while c.eat(b'[') {
                let idx = c.ident().ok_or_else(|| err(line_no, c.pos + 1, "expected an index".into()))?;
                if !c.eat(b']') {
                    return Err(err(line_no, c.pos + 1, "expected `]`".into()));
                }
                indices.push(idx);
            }
            if !c.eat(b'=') {
                return Err(err(line_no, c.pos + 1, "expected `=`".into()));
            }
            c.ws();
            let col = c.pos + 1;
            let value = c.value().map_err(|(p, m)| err(line_no, p + 1, m))?;
            c.ws();
            if c.pos < c.s.len() {
                return Err(err(line_no, c.pos + 1, "unexpected trailing input".into()));
            }
            let entry = Entry {
                name,
                indices,
                value,
                line: line_no,
                col,
            };
            match file.sections.last_mut() {
                Some(s) => s.entries.push(entry),
                None => file.entries.push(entry),
            }
        }
        Ok(file)
    }

    pub fn read(path: &Path) -> Result<SystemFile, FileError> {
        let text = std::fs::read_to_string(path).map_err(|source| FileError::Io {
            path: path.display().to_string(),
            source,
        })?;
        SystemFile::parse(&path.display().to_string(), &text)
    }

    fn whole(&self, message: impl Into<String>) -> FileError {
        FileError::Whole {
            path: self.path.clone(),
            message: message.into(),
        }
    }

    fn at(&self, e: &Entry, message: impl Into<String>) -> FileError {
        FileError::At {
            path: self.path.clone(),
            line: e.line,
            col: e.col,
            message: message.into(),
        }
    }

    pub fn global(&self, name: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.name == name && e.indices.is_empty())
    }

    pub fn string(&self, name: &str) -> Result<Option<String>, FileError> {
        match self.global(name) {
            None => Ok(None),
            Some(e) => e
                .value
                .as_str()
                .map(|s| Some(s.to_string()))
                .ok_or_else(|| self.at(e, format!("`{}` must be a string", name))),
        }
    }

    pub fn strings(&self, name: &str) -> Result<Option<Vec<String>>, FileError> {
        let Some(e) = self.global(name) else { return Ok(None) };
        let Value::List(xs) = &e.value else {
            return Err(self.at(e, format!("`{}` must be a list of strings", name)));
        };
        xs.iter()
            .map(|x| x.as_str().map(str::to_string).ok_or_else(|| self.at(e, format!("`{}` must be a list of strings", name))))
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }

    pub fn integers(&self, name: &str) -> Result<Option<Vec<usize>>, FileError> {
        let Some(e) = self.global(name) else { return Ok(None) };
        let Value::List(xs) = &e.value else {
            return Err(self.at(e, format!("`{}` must be a list of integers", name)));
        };
        xs.iter()
            .map(|x| match x {
                Value::Int(n) if *n >= 0 => Ok(*n as usize),
                _ => Err(self.at(e, format!("`{}` must be a list of non-negative integers", name))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }

    pub fn kind(&self) -> Result<String, FileError> {
        if let Some(e) = self.global("format") {
            if e.value != Value::Int(FORMAT_VERSION) {
                return Err(self.at(e, format!("unsupported format version {}, expected {}", e.value, FORMAT_VERSION)));
            }
        }
        let kind = self.string("kind")?.ok_or_else(|| self.whole("missing `kind`"))?;
        if !KINDS.contains(&kind.as_str()) {
            let e = self.global("kind").expect("present");
            return Err(self.at(e, format!("unknown kind `{}`", kind)));
        }
        Ok(kind)
    }

    pub fn coords(&self) -> Result<Vec<String>, FileError> {
        self.strings("coords")?.ok_or_else(|| self.whole("missing `coords`"))
    }

    /// `Some(true)` for `expect = "pass"`, `Some(false)` for `"fail"`.
    pub fn expectation(&self) -> Result<Option<bool>, FileError> {
        match self.string("expect")? {
            None => Ok(None),
            Some(s) if s == "pass" => Ok(Some(true)),
            Some(s) if s == "fail" => Ok(Some(false)),
            Some(_) => Err(self.at(self.global("expect").expect("present"), "`expect` must be \"pass\" or \"fail\"")),
        }
    }

    pub fn options(&self) -> Result<ParseOptions, FileError> {
        let mut o = ParseOptions::default();
        if let Some(names) = self.strings("opaque")? {
            o.opaque = names.into_iter().collect();
        }
        Ok(o)
    }

    fn expr_of(&self, e: &Entry, opts: &ParseOptions, allowed: Option<&BTreeSet<String>>) -> Result<Expr, FileError> {
        let text = e
            .value
            .as_str()
            .ok_or_else(|| self.at(e, "expected a quoted expression"))?;
        let expr = parse_with(text, opts).map_err(|err| {
            let (col, message) = match &err {
                crate::symkernel::ParseError::Syntax { offset, .. } | crate::symkernel::ParseError::UnknownFunction { offset, .. } => {
                    (e.col + 1 + offset, err.to_string())
                }
                _ => (e.col, err.to_string()),
            };
            FileError::At {
                path: self.path.clone(),
                line: e.line,
                col,
                message,
            }
        })?;
        if let Some(allowed) = allowed {
            if let Some(v) = expr.free_symbols().into_iter().find(|v| !allowed.contains(v)) {
                return Err(self.at(e, format!("undeclared variable `{}`", v)));
            }
        }
        Ok(expr)
    }

    /// Parses one expression in this file's context.
    pub fn expr(&self, text: &str) -> Result<Expr, FileError> {
        parse_with(text, &self.options()?).map_err(|e| self.whole(format!("`{}`: {}", text, e)))
    }

    fn indexed(&self, name: &str) -> impl Iterator<Item = &Entry> {
        let name = name.to_string();
        self.entries.iter().filter(move |e| e.name == name && !e.indices.is_empty())
    }

    fn index(&self, e: &Entry, k: usize, n: usize) -> Result<usize, FileError> {
        let raw = &e.indices[k];
        match raw.parse::<usize>() {
            Ok(i) if (1..=n).contains(&i) => Ok(i - 1),
            _ => Err(self.at(e, format!("index `{}` must be between 1 and {}", raw, n))),
        }
    }

    fn arity(&self, e: &Entry, k: usize) -> Result<(), FileError> {
        if e.indices.len() == k {
            Ok(())
        } else {
            Err(self.at(e, format!("`{}` takes {} indices", e.name, k)))
        }
    }

    fn require_kind(&self, kinds: &[&str]) -> Result<String, FileError> {
        let k = self.kind()?;
        if kinds.contains(&k.as_str()) {
            Ok(k)
        } else {
            Err(self.whole(format!("kind `{}` where {} was expected", k, kinds.join(" or "))))
        }
    }

    fn coord_set(&self, coords: &[String], extra: &[&str]) -> BTreeSet<String> {
        coords.iter().cloned().chain(extra.iter().map(|s| s.to_string())).collect()
    }

    pub fn dmz(&self) -> Result<DmzSystem, FileError> {
        self.require_kind(&["dmz"])?;
        let coords = self.coords()?;
        let n = coords.len();
        let opts = self.options()?;
        let allowed = self.coord_set(&coords, &[]);
        let mut s = DmzSystem::new(&coords);
        for e in self.indexed("Gamma") {
            self.arity(e, 3)?;
            let (i, j, k) = (self.index(e, 0, n)?, self.index(e, 1, n)?, self.index(e, 2, n)?);
            let g = self.expr_of(e, &opts, Some(&allowed))?;
            s.set_gamma(k, i, j, g).map_err(|err| self.at(e, err.to_string()))?;
        }
        for e in self.indexed("C") {
            self.arity(e, 2)?;
            let (i, j) = (self.index(e, 0, n)?, self.index(e, 1, n)?);
            let c = self.expr_of(e, &opts, Some(&allowed))?;
            s.set_c(i, j, c).map_err(|err| self.at(e, err.to_string()))?;
        }
        Ok(s)
    }

    pub fn gdmz(&self) -> Result<GdmzSystem, FileError> {
        if self.kind()? == "dmz" {
            return Ok(self.dmz()?.to_gdmz());
        }
        self.require_kind(&["gdmz"])?;
        let coords = self.coords()?;
        let n = coords.len();
        let opts = self.options()?;
        let mut s = GdmzSystem::new(&coords);
        let allowed: BTreeSet<String> = coords.iter().cloned().chain(s.jet_names()).collect();
        for e in self.indexed("f") {
            self.arity(e, 2)?;
            let (i, j) = (self.index(e, 0, n)?, self.index(e, 1, n)?);
            if i == j {
                return Err(self.at(e, "f needs two distinct indices"));
            }
            let f = self.expr_of(e, &opts, Some(&allowed))?;
            s.f.insert((i.min(j), i.max(j)), f);
        }
        Ok(s)
    }

    pub fn wave(&self) -> Result<WaveMatrix, FileError> {
        self.require_kind(&["wave"])?;
        let coords = self.coords()?;
        let n = coords.len();
        let opts = self.options()?;
        let allowed = self.coord_set(&coords, &[]);
        let mut a = WaveMatrix::new(&coords);
        for e in self.indexed("A") {
            self.arity(e, 2)?;
            let (i, j) = (self.index(e, 0, n)?, self.index(e, 1, n)?);
            if i == j {
                return Err(self.at(e, "wave matrices have no diagonal"));
            }
            a.set(i, j, self.expr_of(e, &opts, Some(&allowed))?);
        }
        Ok(a)
    }

    /// One expression per coordinate from `name[i]`, if any are present.
    pub fn vector(&self, name: &str) -> Result<Option<Vec<Expr>>, FileError> {
        let coords = self.coords()?;
        let n = coords.len();
        let opts = self.options()?;
        let allowed = self.coord_set(&coords, &[]);
        let mut out: Vec<Option<Expr>> = vec![None; n];
        let mut any = false;
        for e in self.indexed(name) {
            self.arity(e, 1)?;
            let i = self.index(e, 0, n)?;
            out[i] = Some(self.expr_of(e, &opts, Some(&allowed))?);
            any = true;
        }
        if !any {
            return Ok(None);
        }
        out.into_iter()
            .enumerate()
            .map(|(i, x)| x.ok_or_else(|| self.whole(format!("missing {}[{}]", name, i + 1))))
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }

    pub fn hydro(&self) -> Result<HydroSystem, FileError> {
        self.require_kind(&["hydro"])?;
        let v = self.vector("v")?.ok_or_else(|| self.whole("missing v[i]"))?;
        HydroSystem::new(&self.coords()?, v).map_err(|e| self.whole(e.to_string()))
    }

    pub fn potentials(&self) -> Result<Option<LamePotentials>, FileError> {
        Ok(self.vector("h")?.map(LamePotentials))
    }

    fn field(&self, chart: &Chart, name: &str, opts: &ParseOptions, allowed: &BTreeSet<String>) -> Result<VectorField, FileError> {
        if let Some(coord) = name.strip_prefix("d_") {
            return VectorField::coordinate(chart, coord).map_err(|e| self.whole(format!("field `{}`: {}", name, e)));
        }
        let sec = self
            .sections
            .iter()
            .find(|s| s.kind == "field" && s.name == name)
            .ok_or_else(|| self.whole(format!("no [field {}] section", name)))?;
        let mut pairs = Vec::new();
        for e in &sec.entries {
            if !e.indices.is_empty() || chart.index(&e.name).is_none() {
                return Err(self.at(e, format!("`{}` is not a chart coordinate", e.name)));
            }
            pairs.push((e.name.as_str(), self.expr_of(e, opts, Some(allowed))?));
        }
        VectorField::from_pairs(chart, &pairs).map_err(|e| self.whole(e.to_string()))
    }

    pub fn chart(&self) -> Result<Chart, FileError> {
        let names = self.strings("chart")?.ok_or_else(|| self.whole("missing `chart`"))?;
        Chart::new(&names).map_err(|e| self.whole(e.to_string()))
    }

    /// The parts `part[i] = ["X", "d_v"]` as rank-2 distributions.
    pub fn parts(&self) -> Result<Vec<Distribution>, FileError> {
        let chart = self.chart()?;
        let opts = self.options()?;
        let allowed: BTreeSet<String> = chart.names().iter().cloned().collect();
        let mut parts: BTreeMap<usize, Distribution> = BTreeMap::new();
        for e in self.indexed("part") {
            self.arity(e, 1)?;
            let i: usize = e.indices[0].parse().map_err(|_| self.at(e, "part index must be an integer"))?;
            let Value::List(names) = &e.value else {
                return Err(self.at(e, "a part is a list of field names"));
            };
            let mut fields = Vec::new();
            for n in names {
                let n = n.as_str().ok_or_else(|| self.at(e, "field names are strings"))?;
                fields.push(self.field(&chart, n, &opts, &allowed)?);
            }
            let d = Distribution::new(&chart, fields).map_err(|err| self.at(e, err.to_string()))?;
            parts.insert(i, d);
        }
        if parts.is_empty() {
            return Err(self.whole("no part[i] entries"));
        }
        Ok(parts.into_values().collect())
    }

    /// Named map `name[key] = "expr"` over the chart variables.
    pub fn substitution(&self, name: &str, allowed: &BTreeSet<String>) -> Result<Option<BTreeMap<String, Expr>>, FileError> {
        let opts = self.options()?;
        let mut out = BTreeMap::new();
        for e in self.indexed(name) {
            self.arity(e, 1)?;
            out.insert(e.indices[0].clone(), self.expr_of(e, &opts, Some(allowed))?);
        }
        Ok((!out.is_empty()).then_some(out))
    }

    /// The contact parts of `jets = [k, …]` (bases from `bases`), pushed
    /// forward along `map[target] = "expr"` with inverse `inverse[jet] = "expr"`
    /// onto `chart`. Without `map` the parts are returned on the jet chart.
    pub fn jet_parts(&self) -> Result<Vec<Distribution>, FileError> {
        self.require_kind(&["jetquotient"])?;
        let orders = self.integers("jets")?.ok_or_else(|| self.whole("missing `jets`"))?;
        let jets = match self.strings("bases")? {
            Some(b) => JetProduct::with_bases(&orders, &b),
            None => JetProduct::new(&orders),
        }
        .map_err(|e| self.whole(e.to_string()))?;
        let parts = contact_basis(&jets);
        let source: BTreeSet<String> = jets.chart().names().iter().cloned().collect();
        let Some(forward) = self.substitution("map", &source)? else {
            return Ok(parts);
        };
        let target = self.chart()?;
        let target_names: BTreeSet<String> = target.names().iter().cloned().collect();
        let inverse = self
            .substitution("inverse", &target_names)?
            .ok_or_else(|| self.whole("`map` needs `inverse[...]` entries"))?;
        let pick = |m: &BTreeMap<String, Expr>, chart: &Chart, what: &str| -> Result<Vec<Expr>, FileError> {
            chart
                .names()
                .iter()
                .map(|n| m.get(n).cloned().ok_or_else(|| self.whole(format!("missing {}[{}]", what, n))))
                .collect()
        };
        let phi = SymbolicMap::new(
            jets.chart().clone(),
            target.clone(),
            pick(&forward, &target, "map")?,
            Some(pick(&inverse, jets.chart(), "inverse")?),
        )
        .map_err(|e| self.whole(e.to_string()))?;
        parts
            .iter()
            .map(|d| pushforward(&phi, d).map_err(|e| self.whole(e.to_string())))
            .collect()
    }

    pub fn adapted(&self) -> Result<AdaptedData, FileError> {
        self.require_kind(&["distribution"])?;
        let parts = self.parts()?;
        let chart = self.chart()?;
        let coords = self.coords()?;
        let opts = self.options()?;
        let allowed: BTreeSet<String> = chart.names().iter().cloned().collect();
        let p_entry = self.global("p").ok_or_else(|| self.whole("missing `p`"))?;
        let p = self.expr_of(p_entry, &opts, Some(&allowed))?;
        let g = GdmzSystem::new(&coords);
        let inv_allowed: BTreeSet<String> = coords.iter().cloned().chain(g.jet_names()).collect();
        let inverse = self.substitution("inverse", &inv_allowed)?;
        Ok(AdaptedData {
            parts,
            coords,
            p,
            inverse,
        })
    }
}

/// Renders a system in this format.
pub fn render_dmz(s: &DmzSystem, header: &str) -> String {
    let mut out = String::new();
    for line in header.lines() {
        out.push_str(&format!("# {}\n", line));
    }
    out.push_str("format = 1\nkind = \"dmz\"\n");
    let quoted: Vec<String> = s.coords.iter().map(|c| format!("\"{}\"", c)).collect();
    out.push_str(&format!("coords = [{}]\n", quoted.join(", ")));
    for ((i, j, k), e) in &s.gamma {
        out.push_str(&format!("Gamma[{}][{}][{}] = \"{}\"\n", i + 1, j + 1, k + 1, e));
    }
    for ((i, j), e) in &s.c {
        out.push_str(&format!("C[{}][{}] = \"{}\"\n", i + 1, j + 1, e));
    }
    out
}

pub fn render_gdmz(s: &GdmzSystem) -> String {
    let mut out = String::from("format = 1\nkind = \"gdmz\"\n");
    let quoted: Vec<String> = s.coords.iter().map(|c| format!("\"{}\"", c)).collect();
    out.push_str(&format!("coords = [{}]\n", quoted.join(", ")));
    for ((i, j), e) in &s.f {
        out.push_str(&format!("f[{}][{}] = \"{}\"\n", i + 1, j + 1, e));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
# comment
kind = "dmz"
coords = ["x", "y", "z"]
Gamma[1][3][1] = "-1/(y-z)"   # trailing comment
C[2][3] = "x"
"#;

    #[test]
    fn parses_dmz() {
        let f = SystemFile::parse("mem", SAMPLE).unwrap();
        let s = f.dmz().unwrap();
        assert_eq!(s.gamma(0, 0, 2).to_string(), f.expr("-1/(y-z)").unwrap().to_string());
        assert_eq!(s.c(2, 1), Expr::sym("x"));
        let back = SystemFile::parse("mem", &render_dmz(&s, "round trip")).unwrap().dmz().unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn reports_positions() {
        let bad = "kind = \"dmz\"\ncoords = [\"x\", \"y\"]\nC[1][2] = \"x +* y\"\n";
        let err = SystemFile::parse("mem", bad).unwrap().dmz().unwrap_err().to_string();
        assert!(err.starts_with("mem:3:"), "{}", err);
        let undeclared = "kind = \"dmz\"\ncoords = [\"x\", \"y\"]\nC[1][2] = \"q\"\n";
        let err = SystemFile::parse("mem", undeclared).unwrap().dmz().unwrap_err().to_string();
        assert!(err.contains("undeclared variable `q`"));
        let err = SystemFile::parse("mem", "kind = \"dmz\n").unwrap_err().to_string();
        assert!(err.contains("mem:1:8"), "{}", err);
        let err = SystemFile::parse("mem", "kind = \"dmz\"\nC[4][1] = \"1\"\ncoords = [\"x\"]\n")
            .unwrap()
            .dmz()
            .unwrap_err()
            .to_string();
        assert!(err.contains("between 1 and 1"));
    }

    #[test]
    fn parses_fields_and_parts() {
        let text = r#"
kind = "distribution"
chart = ["x", "y", "z", "v1"]
coords = ["x"]
p = "y"
part[1] = ["X", "d_v1"]

[field X]
x = "1"
y = "v1"
"#;
        let f = SystemFile::parse("mem", text).unwrap();
        let parts = f.parts().unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].rank(), 2);
        assert_eq!(parts[0].fields()[0].to_string(), "d_x + (v1)*d_y");
    }
}
