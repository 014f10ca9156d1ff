//! Exact arithmetic for the acting groups.
//!
//! Four kinds of group are supported: free groups over a finite alphabet
//! (elements are reduced words), the integers, finite groups given by a full
//! multiplication table, and groups presented by the label rewriting system
//! produced during groupoid recognition.
//!
//! Every [`GroupElement`] is kept in normal form at construction, so structural
//! equality is group equality and elements can be used as map keys.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest finite group accepted from a multiplication table.
pub const MAX_FINITE_ORDER: usize = 64;

/// Longest word accepted by [`GroupDescriptor::parse_element`].
pub const MAX_WORD_LENGTH: usize = 4096;

/// Most elements a ball may hold before tabulation is refused.
pub const MAX_BALL_SIZE: usize = 1 << 16;

/// Number of reduced words of length at most `bound` over `rank` generators,
/// or `None` past [`MAX_BALL_SIZE`].
pub fn ball_size(rank: u32, bound: usize) -> Option<usize> {
    let r = rank as usize;
    let (mut total, mut layer) = (1usize, 1usize);
    for n in 1..=bound {
        let step = if n == 1 { 2 * r } else { 2 * r - 1 };
        if step == 0 {
            break;
        }
        layer = layer.checked_mul(step)?;
        total = total.checked_add(layer)?;
        if total > MAX_BALL_SIZE {
            return None;
        }
    }
    Some(total)
}

/// A generator or the inverse of a generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub symbol: u32,
    pub inverse: bool,
}

impl Letter {
    pub fn pos(symbol: u32) -> Self {
        Letter { symbol, inverse: false }
    }

    pub fn neg(symbol: u32) -> Self {
        Letter { symbol, inverse: true }
    }

    pub fn inv(self) -> Self {
        Letter { symbol: self.symbol, inverse: !self.inverse }
    }

    pub fn sign(self) -> i64 {
        if self.inverse {
            -1
        } else {
            1
        }
    }
}

/// A reduced word in a free group.
///
/// Ordered shortlex (length first), which makes table listings read naturally.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FreeWord(Vec<Letter>);

impl Ord for FreeWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for FreeWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl FreeWord {
    pub fn identity() -> Self {
        FreeWord(Vec::new())
    }

    /// Freely reduces an arbitrary letter sequence.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inv()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        FreeWord(out)
    }

    /// The positive word spelling the given generator sequence.
    pub fn positive<I: IntoIterator<Item = u32>>(symbols: I) -> Self {
        FreeWord(symbols.into_iter().map(Letter::pos).collect())
    }

    pub fn generator(symbol: u32) -> Self {
        FreeWord(vec![Letter::pos(symbol)])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    /// Length of the reduced form.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_positive(&self) -> bool {
        self.0.iter().all(|l| !l.inverse)
    }

    /// Generator indices of a positive word, `None` if some letter is inverted.
    pub fn positive_symbols(&self) -> Option<Vec<u32>> {
        self.0.iter().map(|l| (!l.inverse).then_some(l.symbol)).collect()
    }

    pub fn mul(&self, other: &FreeWord) -> FreeWord {
        FreeWord::from_letters(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn inverse(&self) -> FreeWord {
        FreeWord(self.0.iter().rev().map(|l| l.inv()).collect())
    }

    pub fn pow(&self, n: i64) -> FreeWord {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut acc = FreeWord::identity();
        for _ in 0..n.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    /// The homomorphism to the integers sending every generator to 1.
    pub fn length_cocycle(&self) -> i64 {
        self.0.iter().map(|l| l.sign()).sum()
    }

    /// Splits the word as `alpha * beta^-1` with `alpha`, `beta` positive.
    ///
    /// Returns `None` when an inverse letter precedes a positive one.
    pub fn factor_positive(&self) -> Option<(FreeWord, FreeWord)> {
        let split = self.0.iter().position(|l| l.inverse).unwrap_or(self.0.len());
        let (alpha, rest) = self.0.split_at(split);
        if rest.iter().any(|l| !l.inverse) {
            return None;
        }
        let beta = rest.iter().rev().map(|l| l.inv()).collect();
        Some((FreeWord(alpha.to_vec()), FreeWord(beta)))
    }

    /// All reduced words of length at most `max_len` over `rank` generators,
    /// in shortlex order.
    pub fn all_up_to(rank: u32, max_len: usize) -> Vec<FreeWord> {
        let mut out = vec![FreeWord::identity()];
        let mut frontier = vec![FreeWord::identity()];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for w in &frontier {
                for s in 0..rank {
                    for l in [Letter::pos(s), Letter::neg(s)] {
                        if w.0.last() == Some(&l.inv()) {
                            continue;
                        }
                        let mut v = w.0.clone();
                        v.push(l);
                        next.push(FreeWord(v));
                    }
                }
            }
            next.sort();
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }
}

/// An element of one of the supported groups.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroupElement {
    Word(FreeWord),
    Int(i64),
    Finite(usize),
    /// Normal form of a product of block labels.
    Label(Vec<u32>),
}

impl GroupElement {
    pub fn as_word(&self) -> Option<&FreeWord> {
        match self {
            GroupElement::Word(w) => Some(w),
            _ => None,
        }
    }
}

impl From<FreeWord> for GroupElement {
    fn from(w: FreeWord) -> Self {
        GroupElement::Word(w)
    }
}

/// Generators of a free group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeAlphabet {
    symbols: Vec<String>,
    index: HashMap<String, u32>,
}

impl FreeAlphabet {
    pub fn new<S: Into<String>, I: IntoIterator<Item = S>>(symbols: I) -> Result<Self> {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(Error::InvalidTable("free alphabet must be nonempty".into()));
        }
        let mut index = HashMap::new();
        for (i, s) in symbols.iter().enumerate() {
            if !is_identifier(s) {
                return Err(Error::UnknownSymbol(s.clone()));
            }
            if index.insert(s.clone(), i as u32).is_some() {
                return Err(Error::InvalidTable(format!("duplicate generator `{s}`")));
            }
        }
        Ok(FreeAlphabet { symbols, index })
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn rank(&self) -> u32 {
        self.symbols.len() as u32
    }

    pub fn lookup(&self, name: &str) -> Option<u32> {
        self.index.get(name).copied()
    }

    pub fn name(&self, symbol: u32) -> &str {
        &self.symbols[symbol as usize]
    }
}

/// A finite group given by its full multiplication table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    names: Vec<String>,
    table: Vec<Vec<usize>>,
    identity: usize,
    inverses: Vec<usize>,
}

impl FiniteGroup {
    /// Validates associativity, identity and two-sided inverses.
    pub fn new(names: Vec<String>, table: Vec<Vec<usize>>, identity: usize) -> Result<Self> {
        let n = names.len();
        if n == 0 || n > MAX_FINITE_ORDER {
            return Err(Error::InvalidTable(format!(
                "order {n} outside 1..={MAX_FINITE_ORDER}"
            )));
        }
        for (i, s) in names.iter().enumerate() {
            if !is_identifier(s) {
                return Err(Error::UnknownSymbol(s.clone()));
            }
            if names[..i].contains(s) {
                return Err(Error::InvalidTable(format!("duplicate element `{s}`")));
            }
        }
        if table.len() != n || table.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidTable("table must be square".into()));
        }
        if table.iter().flatten().any(|&v| v >= n) || identity >= n {
            return Err(Error::InvalidTable("entry out of range".into()));
        }
        for x in 0..n {
            if table[identity][x] != x || table[x][identity] != x {
                return Err(Error::InvalidTable(format!(
                    "`{}` is not a two-sided identity",
                    names[identity]
                )));
            }
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if table[table[x][y]][z] != table[x][table[y][z]] {
                        return Err(Error::InvalidTable(format!(
                            "not associative at ({}, {}, {})",
                            names[x], names[y], names[z]
                        )));
                    }
                }
            }
        }
        let mut inverses = Vec::with_capacity(n);
        for x in 0..n {
            match (0..n).find(|&y| table[x][y] == identity && table[y][x] == identity) {
                Some(y) => inverses.push(y),
                None => {
                    return Err(Error::InvalidTable(format!("`{}` has no inverse", names[x])))
                }
            }
        }
        Ok(FiniteGroup { names, table, identity, inverses })
    }

    /// The cyclic group of order `n` with elements named `e, g, g2, ...`.
    pub fn cyclic(n: usize) -> Self {
        let names = (0..n)
            .map(|i| match i {
                0 => "e".to_string(),
                1 => "g".to_string(),
                _ => format!("g{i}"),
            })
            .collect();
        let table = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        FiniteGroup::new(names, table, 0).expect("cyclic table is a group")
    }

    /// The Klein four-group `{e, a, b, c}`.
    pub fn klein_four() -> Self {
        let names = ["e", "a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let table = (0..4usize).map(|i| (0..4usize).map(|j| i ^ j).collect()).collect();
        FiniteGroup::new(names, table, 0).expect("klein table is a group")
    }

    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn lookup(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// A group presented by block labels with length-reducing rules
/// `[U][U^-1] -> 1`, `[X] -> 1` and `[U][V] -> [W]`.
///
/// Words are stored positively because `[U]^-1 = [U^-1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelPresentation {
    names: Vec<String>,
    inverse: Vec<u32>,
    identity: u32,
    products: HashMap<(u32, u32), u32>,
}

impl LabelPresentation {
    pub fn new(
        names: Vec<String>,
        inverse: Vec<u32>,
        identity: u32,
        products: HashMap<(u32, u32), u32>,
    ) -> Result<Self> {
        let n = names.len() as u32;
        if inverse.len() != names.len() || identity >= n {
            return Err(Error::InvalidTable("label presentation shape mismatch".into()));
        }
        if inverse.iter().any(|&i| i >= n) || products.iter().any(|(&(a, b), &c)| a >= n || b >= n || c >= n) {
            return Err(Error::InvalidTable("label out of range".into()));
        }
        Ok(LabelPresentation { names, inverse, identity, products })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn identity_label(&self) -> u32 {
        self.identity
    }

    pub fn inverse_label(&self, label: u32) -> u32 {
        self.inverse[label as usize]
    }

    pub fn product_rule(&self, a: u32, b: u32) -> Option<u32> {
        self.products.get(&(a, b)).copied()
    }

    pub fn products(&self) -> &HashMap<(u32, u32), u32> {
        &self.products
    }

    /// Rewrites a label sequence to an irreducible word.
    ///
    /// The stack is irreducible after every push, so the result is a normal
    /// form; it is the unique one whenever the rules are confluent.
    pub fn normalize<I: IntoIterator<Item = u32>>(&self, labels: I) -> Vec<u32> {
        let mut stack: Vec<u32> = Vec::new();
        for label in labels {
            let mut incoming = label;
            loop {
                if incoming == self.identity {
                    break;
                }
                let Some(&top) = stack.last() else {
                    stack.push(incoming);
                    break;
                };
                if self.inverse[top as usize] == incoming {
                    stack.pop();
                    break;
                }
                match self.products.get(&(top, incoming)) {
                    Some(&w) => {
                        stack.pop();
                        incoming = w;
                    }
                    None => {
                        stack.push(incoming);
                        break;
                    }
                }
            }
        }
        stack
    }

    /// Inverse of a normal-form word.
    pub fn invert(&self, word: &[u32]) -> Vec<u32> {
        self.normalize(word.iter().rev().map(|&l| self.inverse[l as usize]))
    }
}

/// The group a system acts by.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupDescriptor {
    Free(FreeAlphabet),
    Integers,
    Finite(FiniteGroup),
    Presented(Arc<LabelPresentation>),
}

impl GroupDescriptor {
    pub fn free<S: Into<String>, I: IntoIterator<Item = S>>(symbols: I) -> Result<Self> {
        Ok(GroupDescriptor::Free(FreeAlphabet::new(symbols)?))
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            GroupDescriptor::Free(_) => "free",
            GroupDescriptor::Integers => "integers",
            GroupDescriptor::Finite(_) => "finite",
            GroupDescriptor::Presented(_) => "presented",
        }
    }

    pub fn identity(&self) -> GroupElement {
        match self {
            GroupDescriptor::Free(_) => GroupElement::Word(FreeWord::identity()),
            GroupDescriptor::Integers => GroupElement::Int(0),
            GroupDescriptor::Finite(t) => GroupElement::Finite(t.identity()),
            GroupDescriptor::Presented(_) => GroupElement::Label(Vec::new()),
        }
    }

    pub fn is_identity(&self, g: &GroupElement) -> bool {
        *g == self.identity()
    }

    /// Whether the element is a well-formed normal-form member of this group.
    pub fn contains(&self, g: &GroupElement) -> bool {
        match (self, g) {
            (GroupDescriptor::Free(a), GroupElement::Word(w)) => {
                w.letters().iter().all(|l| l.symbol < a.rank())
                    && w.letters().windows(2).all(|p| p[0] != p[1].inv())
            }
            (GroupDescriptor::Integers, GroupElement::Int(_)) => true,
            (GroupDescriptor::Finite(t), GroupElement::Finite(i)) => *i < t.order(),
            (GroupDescriptor::Presented(p), GroupElement::Label(w)) => {
                w.iter().all(|&l| (l as usize) < p.names.len()) && p.normalize(w.iter().copied()) == *w
            }
            _ => false,
        }
    }

    fn check(&self, g: &GroupElement) -> Result<()> {
        if self.contains(g) {
            Ok(())
        } else {
            Err(Error::DescriptorMismatch {
                element: format!("{g:?}"),
                group: format!("{} group", self.kind_name()),
            })
        }
    }

    /// The reduced word equal to the product of the given letters.
    pub fn reduce(&self, letters: &[Letter]) -> Result<FreeWord> {
        let GroupDescriptor::Free(alphabet) = self else {
            return Err(Error::NotFree { op: "reduce" });
        };
        if let Some(l) = letters.iter().find(|l| l.symbol >= alphabet.rank()) {
            return Err(Error::UnknownSymbol(format!("#{}", l.symbol)));
        }
        Ok(FreeWord::from_letters(letters.iter().copied()))
    }

    pub fn multiply(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        self.check(h)?;
        Ok(match (self, g, h) {
            (GroupDescriptor::Free(_), GroupElement::Word(a), GroupElement::Word(b)) => {
                GroupElement::Word(a.mul(b))
            }
            (GroupDescriptor::Integers, GroupElement::Int(a), GroupElement::Int(b)) => {
                GroupElement::Int(a + b)
            }
            (GroupDescriptor::Finite(t), GroupElement::Finite(a), GroupElement::Finite(b)) => {
                GroupElement::Finite(t.mul(*a, *b))
            }
            (GroupDescriptor::Presented(p), GroupElement::Label(a), GroupElement::Label(b)) => {
                GroupElement::Label(p.normalize(a.iter().chain(b.iter()).copied()))
            }
            _ => unreachable!("membership checked above"),
        })
    }

    pub fn inverse(&self, g: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        Ok(match (self, g) {
            (GroupDescriptor::Free(_), GroupElement::Word(w)) => GroupElement::Word(w.inverse()),
            (GroupDescriptor::Integers, GroupElement::Int(n)) => GroupElement::Int(-n),
            (GroupDescriptor::Finite(t), GroupElement::Finite(i)) => GroupElement::Finite(t.inv(*i)),
            (GroupDescriptor::Presented(p), GroupElement::Label(w)) => GroupElement::Label(p.invert(w)),
            _ => unreachable!("membership checked above"),
        })
    }

    fn word<'a>(&self, g: &'a GroupElement, op: &'static str) -> Result<&'a FreeWord> {
        match (self, g) {
            (GroupDescriptor::Free(_), GroupElement::Word(w)) => {
                self.check(g)?;
                Ok(w)
            }
            _ => Err(Error::NotFree { op }),
        }
    }

    pub fn length(&self, g: &GroupElement) -> Result<usize> {
        match (self, g) {
            (GroupDescriptor::Integers, GroupElement::Int(n)) => Ok(n.unsigned_abs() as usize),
            _ => Ok(self.word(g, "length")?.len()),
        }
    }

    pub fn length_cocycle(&self, g: &GroupElement) -> Result<i64> {
        match (self, g) {
            (GroupDescriptor::Integers, GroupElement::Int(n)) => Ok(*n),
            _ => Ok(self.word(g, "length_cocycle")?.length_cocycle()),
        }
    }

    pub fn factor_positive(&self, g: &GroupElement) -> Result<Option<(FreeWord, FreeWord)>> {
        match (self, g) {
            (GroupDescriptor::Integers, GroupElement::Int(n)) => Ok(int_to_word(*n).factor_positive()),
            _ => Ok(self.word(g, "factor_positive")?.factor_positive()),
        }
    }

    /// Power `g^n` by repeated multiplication.
    pub fn pow(&self, g: &GroupElement, n: i64) -> Result<GroupElement> {
        let base = if n < 0 { self.inverse(g)? } else { g.clone() };
        let mut acc = self.identity();
        for _ in 0..n.unsigned_abs() {
            acc = self.multiply(&acc, &base)?;
        }
        Ok(acc)
    }

    /// Order of the group when finite.
    pub fn order(&self) -> Option<usize> {
        match self {
            GroupDescriptor::Finite(t) => Some(t.order()),
            _ => None,
        }
    }

    /// All elements of a finite group, in index order.
    pub fn elements(&self) -> Option<Vec<GroupElement>> {
        match self {
            GroupDescriptor::Finite(t) => Some((0..t.order()).map(GroupElement::Finite).collect()),
            _ => None,
        }
    }

    /// Elements of length at most `bound` for free groups and integers.
    pub fn ball(&self, bound: usize) -> Option<Vec<GroupElement>> {
        match self {
            GroupDescriptor::Free(a) => Some(
                FreeWord::all_up_to(a.rank(), bound)
                    .into_iter()
                    .map(GroupElement::Word)
                    .collect(),
            ),
            GroupDescriptor::Integers => {
                let b = bound as i64;
                let mut v: Vec<GroupElement> = (-b..=b).map(GroupElement::Int).collect();
                v.sort_by_key(|g| match g {
                    GroupElement::Int(n) => (n.unsigned_abs(), *n < 0),
                    _ => unreachable!(),
                });
                Some(v)
            }
            _ => None,
        }
    }

    /// Word length for free groups and absolute value for integers.
    pub fn norm(&self, g: &GroupElement) -> Option<usize> {
        match g {
            GroupElement::Word(w) => Some(w.len()),
            GroupElement::Int(n) => Some(n.unsigned_abs() as usize),
            _ => None,
        }
    }

    /// Parses an element in the instance-file syntax.
    ///
    /// Free words are `1` or generators joined by `.`, each optionally
    /// suffixed by `^k` for a nonzero integer `k`; integers are decimal;
    /// finite and presented elements are referenced by name.
    pub fn parse_element(&self, text: &str) -> Result<GroupElement> {
        let text = text.trim();
        let err = || Error::ElementSyntax(format!("`{text}` in {} group", self.kind_name()));
        match self {
            GroupDescriptor::Free(alphabet) => {
                if text == "1" {
                    return Ok(GroupElement::Word(FreeWord::identity()));
                }
                let mut letters = Vec::new();
                for part in text.split('.') {
                    let (sym, exp) = match part.split_once('^') {
                        Some((s, e)) => (s, e.parse::<i64>().map_err(|_| err())?),
                        None => (part, 1),
                    };
                    if exp == 0 {
                        return Err(err());
                    }
                    let s = alphabet.lookup(sym).ok_or_else(|| Error::UnknownSymbol(sym.to_string()))?;
                    let l = if exp < 0 { Letter::neg(s) } else { Letter::pos(s) };
                    if letters.len() as u64 + exp.unsigned_abs() > MAX_WORD_LENGTH as u64 {
                        return Err(Error::ElementSyntax(format!("word longer than {MAX_WORD_LENGTH} letters")));
                    }
                    letters.extend(std::iter::repeat(l).take(exp.unsigned_abs() as usize));
                }
                Ok(GroupElement::Word(FreeWord::from_letters(letters)))
            }
            GroupDescriptor::Integers => text.parse::<i64>().map(GroupElement::Int).map_err(|_| err()),
            GroupDescriptor::Finite(t) => t
                .lookup(text)
                .map(GroupElement::Finite)
                .ok_or_else(|| Error::UnknownSymbol(text.to_string())),
            GroupDescriptor::Presented(p) => {
                if text == "1" {
                    return Ok(GroupElement::Label(Vec::new()));
                }
                let mut labels = Vec::new();
                for part in text.split('.') {
                    let l = p
                        .names
                        .iter()
                        .position(|n| n == part)
                        .ok_or_else(|| Error::UnknownSymbol(part.to_string()))?;
                    labels.push(l as u32);
                }
                Ok(GroupElement::Label(p.normalize(labels)))
            }
        }
    }

    /// Renders an element so that [`parse_element`](Self::parse_element) reads it back.
    pub fn format_element(&self, g: &GroupElement) -> String {
        match (self, g) {
            (GroupDescriptor::Free(a), GroupElement::Word(w)) => {
                if w.is_identity() {
                    return "1".into();
                }
                w.letters()
                    .iter()
                    .map(|l| {
                        let name = a.symbols.get(l.symbol as usize).map(String::as_str).unwrap_or("?");
                        if l.inverse {
                            format!("{name}^-1")
                        } else {
                            name.to_string()
                        }
                    })
                    .collect::<Vec<_>>()
                    .join(".")
            }
            (_, GroupElement::Int(n)) => n.to_string(),
            (GroupDescriptor::Finite(t), GroupElement::Finite(i)) => {
                t.names.get(*i).cloned().unwrap_or_else(|| format!("#{i}"))
            }
            (GroupDescriptor::Presented(p), GroupElement::Label(w)) => {
                if w.is_empty() {
                    return "1".into();
                }
                w.iter()
                    .map(|&l| p.names.get(l as usize).cloned().unwrap_or_else(|| format!("#{l}")))
                    .collect::<Vec<_>>()
                    .join(".")
            }
            (_, other) => format!("{other:?}"),
        }
    }
}

/// Sends `n` to the `n`-th power of the single generator of a rank-one free group.
pub fn int_to_word(n: i64) -> FreeWord {
    FreeWord::generator(0).pow(n)
}

/// Inverse of [`int_to_word`]; `None` outside the rank-one subgroup on generator 0.
pub fn word_to_int(w: &FreeWord) -> Option<i64> {
    if w.letters().iter().all(|l| l.symbol == 0) {
        Some(w.length_cocycle())
    } else {
        None
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "1");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ".")?;
            }
            write!(f, "s{}", l.symbol)?;
            if l.inverse {
                write!(f, "^-1")?;
            }
        }
        Ok(())
    }
}
