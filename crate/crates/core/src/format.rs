//! The line-oriented instance format.
//!
//! ```text
//! # two points swapped by Z/2
//! [space swap]
//! points = x0, x1
//!
//! [group]
//! kind = cyclic 2
//!
//! [elem g]
//! x0 -> x1
//! x1 -> x0
//! ```
//!
//! A file is a sequence of `include <path>` lines and sections. A section
//! starts with `[kind args...]` and holds `key = value` and `from -> to`
//! entries; `#` starts a comment. This module only deals with syntax; see
//! [`crate::model`] for what the sections mean.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Section kinds accepted in headers.
pub const SECTION_KINDS: &[&str] = &[
    "space", "group", "gen", "elem", "morphism", "coe", "partition", "vertices", "edges", "rule", "atoms",
    "alphabet", "theta", "ideal", "dr-coe", "groupoid",
];

/// Deepest chain of nested includes followed by [`load_instance`].
pub const MAX_INCLUDE_DEPTH: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EntryKind {
    Pair(String, String),
    Map(String, String),
}

/// One entry line. Equality ignores the line number.
#[derive(Clone, Debug)]
pub struct Entry {
    pub line: usize,
    pub kind: EntryKind,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Eq for Entry {}

#[derive(Clone, Debug)]
pub struct Section {
    pub line: usize,
    pub kind: String,
    pub args: Vec<String>,
    pub entries: Vec<Entry>,
}

impl PartialEq for Section {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.args == other.args && self.entries == other.entries
    }
}

impl Eq for Section {}

impl Section {
    pub fn new(kind: &str, args: &[&str]) -> Self {
        Section {
            line: 0,
            kind: kind.to_string(),
            args: args.iter().map(|s| s.to_string()).collect(),
            entries: Vec::new(),
        }
    }

    pub fn pair(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.entries.push(Entry { line: 0, kind: EntryKind::Pair(key.into(), value.into()) });
        self
    }

    pub fn map(mut self, from: impl Into<String>, to: impl Into<String>) -> Self {
        self.entries.push(Entry { line: 0, kind: EntryKind::Map(from.into(), to.into()) });
        self
    }

    pub fn arg(&self, i: usize) -> Option<&str> {
        self.args.get(i).map(String::as_str)
    }

    /// Value of the last `key = value` entry with this key.
    pub fn get(&self, key: &str) -> Option<&str> {
        self.pairs().filter(|(k, _, _)| *k == key).map(|(_, v, _)| v).last()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str, usize)> {
        self.entries.iter().filter_map(|e| match &e.kind {
            EntryKind::Pair(k, v) => Some((k.as_str(), v.as_str(), e.line)),
            EntryKind::Map(..) => None,
        })
    }

    pub fn maps(&self) -> impl Iterator<Item = (&str, &str, usize)> {
        self.entries.iter().filter_map(|e| match &e.kind {
            EntryKind::Map(a, b) => Some((a.as_str(), b.as_str(), e.line)),
            EntryKind::Pair(..) => None,
        })
    }

    pub fn header(&self) -> String {
        let mut out = format!("[{}", self.kind);
        for a in &self.args {
            out.push(' ');
            out.push_str(a);
        }
        out.push(']');
        out
    }
}

#[derive(Clone, Debug)]
pub enum Item {
    Include { line: usize, path: String },
    Section(Section),
}

impl PartialEq for Item {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Item::Include { path: a, .. }, Item::Include { path: b, .. }) => a == b,
            (Item::Section(a), Item::Section(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Item {}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Instance {
    pub items: Vec<Item>,
}

impl Instance {
    pub fn from_sections(sections: impl IntoIterator<Item = Section>) -> Self {
        Instance { items: sections.into_iter().map(Item::Section).collect() }
    }

    pub fn sections(&self) -> impl Iterator<Item = &Section> {
        self.items.iter().filter_map(|i| match i {
            Item::Section(s) => Some(s),
            Item::Include { .. } => None,
        })
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn parse_entry(line: usize, text: &str) -> Result<EntryKind> {
    let eq = text.find('=');
    let arrow = text.find("->");
    let kind = match (eq, arrow) {
        (Some(e), a) if a.map_or(true, |a| e < a) => {
            let key = text[..e].trim();
            if key.is_empty() {
                return Err(parse_err(line, "missing key before `=`"));
            }
            EntryKind::Pair(key.to_string(), text[e + 1..].trim().to_string())
        }
        (_, Some(a)) => {
            let (from, to) = (text[..a].trim(), text[a + 2..].trim());
            if from.is_empty() || to.is_empty() {
                return Err(parse_err(line, "`->` needs an item on both sides"));
            }
            EntryKind::Map(from.to_string(), to.to_string())
        }
        _ => return Err(parse_err(line, format!("expected `key = value` or `a -> b`, found `{text}`"))),
    };
    Ok(kind)
}

fn parse_header(line: usize, text: &str) -> Result<Section> {
    let inner = text
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| parse_err(line, "unterminated section header"))?;
    if inner.contains(['[', ']']) {
        return Err(parse_err(line, "nested brackets in section header"));
    }
    let mut words = inner.split_whitespace();
    let kind = words.next().ok_or_else(|| parse_err(line, "empty section header"))?;
    if !SECTION_KINDS.contains(&kind) {
        return Err(parse_err(line, format!("unknown section `{kind}`")));
    }
    Ok(Section {
        line,
        kind: kind.to_string(),
        args: words.map(str::to_string).collect(),
        entries: Vec::new(),
    })
}

/// Parses instance text. Includes are recorded, not followed.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut items = Vec::new();
    let mut current: Option<Section> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if content.starts_with('[') {
            items.extend(current.take().map(Item::Section));
            current = Some(parse_header(line, content)?);
        } else if let Some(path) = content
            .strip_prefix("include ")
            .or_else(|| (content == "include").then_some(""))
            .map(str::trim)
            .filter(|p| !p.starts_with('=') && !p.starts_with("->"))
        {
            if path.is_empty() {
                return Err(parse_err(line, "include needs a path"));
            }
            items.extend(current.take().map(Item::Section));
            items.push(Item::Include { line, path: path.to_string() });
        } else {
            let kind = parse_entry(line, content)?;
            match current.as_mut() {
                Some(s) => s.entries.push(Entry { line, kind }),
                None => return Err(parse_err(line, "entry outside of any section")),
            }
        }
    }
    items.extend(current.map(Item::Section));
    Ok(Instance { items })
}

/// Canonical text: one blank line between items, single spaces around `=`
/// and `->`, no comments.
pub fn to_text(instance: &Instance) -> String {
    let mut out = String::new();
    for (i, item) in instance.items.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        match item {
            Item::Include { path, .. } => {
                let _ = writeln!(out, "include {path}");
            }
            Item::Section(s) => {
                let _ = writeln!(out, "{}", s.header());
                for e in &s.entries {
                    match &e.kind {
                        EntryKind::Pair(k, v) if v.is_empty() => {
                            let _ = writeln!(out, "{k} =");
                        }
                        EntryKind::Pair(k, v) => {
                            let _ = writeln!(out, "{k} = {v}");
                        }
                        EntryKind::Map(a, b) => {
                            let _ = writeln!(out, "{a} -> {b}");
                        }
                    }
                }
            }
        }
    }
    out
}

/// Reads a file and splices in its includes, resolved relative to the file
/// that names them.
pub fn load_instance(path: &Path) -> Result<Instance> {
    let mut stack = HashSet::new();
    load_rec(path, &mut stack, 0)
}

fn load_rec(path: &Path, stack: &mut HashSet<PathBuf>, depth: usize) -> Result<Instance> {
    if depth > MAX_INCLUDE_DEPTH {
        return Err(Error::Io(format!("{}: includes nested too deeply", path.display())));
    }
    let canonical = path
        .canonicalize()
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    if !stack.insert(canonical.clone()) {
        return Err(Error::Io(format!("{}: include cycle", path.display())));
    }
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let parsed = parse_instance(&text).map_err(|e| match e {
        Error::Parse { line, message } => Error::Parse { line, message: format!("{}: {message}", path.display()) },
        other => other,
    })?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut items = Vec::new();
    for item in parsed.items {
        match item {
            Item::Include { path: p, .. } => items.extend(load_rec(&dir.join(p), stack, depth + 1)?.items),
            section => items.push(section),
        }
    }
    stack.remove(&canonical);
    Ok(Instance { items })
}

/// Splits a comma separated list, dropping empty items.
pub fn split_list(text: &str) -> Vec<&str> {
    text.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
}
