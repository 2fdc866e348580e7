//! Finite state spaces, predicates as bitsets and relations as bit matrices.
//!
//! A [`StateSpace`] is the product of a list of finite variable domains. States
//! are numbered by mixed-radix encoding with the first declared variable as
//! the most significant digit. [`Predicate`]s are sets of states and
//! [`Relation`]s are sets of state pairs; both are dense and immutable.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

/// Largest state space accepted unless a caller asks for another cap.
pub const DEFAULT_STATE_CAP: usize = 4096;

const WORD: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelError {
    #[error("incompatible state spaces")]
    SpaceMismatch,
    #[error("state space has {size} states, above the cap of {cap}")]
    CapExceeded { size: u128, cap: usize },
    #[error("variable `{0}` has an empty domain")]
    EmptyDomain(String),
    #[error("variable `{0}` is declared twice")]
    DuplicateVariable(String),
    #[error("value `{value}` appears twice in the domain of `{var}`")]
    DuplicateValue { var: String, value: Value },
    #[error("state index {index} out of range for a space of {size} states")]
    StateOutOfRange { index: usize, size: usize },
}

/// A value a program variable can hold.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Sym(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Sym(s) => f.write_str(s),
        }
    }
}

impl From<i64> for Value {
    fn from(n: i64) -> Self {
        Value::Int(n)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Sym(s.to_owned())
    }
}

/// A declared program variable and its finite domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub domain: Vec<Value>,
}

impl Variable {
    pub fn new(name: impl Into<String>, domain: Vec<Value>) -> Self {
        Self {
            name: name.into(),
            domain,
        }
    }

    /// Integer variable ranging over `lo..=hi`.
    pub fn range(name: impl Into<String>, lo: i64, hi: i64) -> Self {
        Self::new(name, (lo..=hi).map(Value::Int).collect())
    }

    pub fn position(&self, value: &Value) -> Option<usize> {
        self.domain.iter().position(|v| v == value)
    }
}

#[derive(Debug, Clone)]
pub struct StateSpace {
    vars: Vec<Variable>,
    strides: Vec<usize>,
    size: usize,
    by_name: HashMap<String, usize>,
}

impl PartialEq for StateSpace {
    fn eq(&self, other: &Self) -> bool {
        self.vars == other.vars
    }
}

impl Eq for StateSpace {}

impl StateSpace {
    pub fn new(vars: Vec<Variable>) -> Result<Arc<Self>, RelError> {
        Self::with_cap(vars, DEFAULT_STATE_CAP)
    }

    pub fn with_cap(vars: Vec<Variable>, cap: usize) -> Result<Arc<Self>, RelError> {
        let mut by_name = HashMap::new();
        let mut size: u128 = 1;
        for (i, var) in vars.iter().enumerate() {
            if var.domain.is_empty() {
                return Err(RelError::EmptyDomain(var.name.clone()));
            }
            if by_name.insert(var.name.clone(), i).is_some() {
                return Err(RelError::DuplicateVariable(var.name.clone()));
            }
            for (j, v) in var.domain.iter().enumerate() {
                if var.domain[..j].contains(v) {
                    return Err(RelError::DuplicateValue {
                        var: var.name.clone(),
                        value: v.clone(),
                    });
                }
            }
            size = size.saturating_mul(var.domain.len() as u128);
        }
        if size > cap as u128 {
            return Err(RelError::CapExceeded { size, cap });
        }
        let size = size as usize;
        let mut strides = vec![1; vars.len()];
        for i in (0..vars.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * vars[i + 1].domain.len();
        }
        Ok(Arc::new(Self {
            vars,
            strides,
            size,
            by_name,
        }))
    }

    /// A space of `n` anonymous states, one variable `s` ranging over `0..n`.
    pub fn anonymous(n: usize) -> Result<Arc<Self>, RelError> {
        if n == 0 {
            return Err(RelError::EmptyDomain("s".into()));
        }
        Self::with_cap(vec![Variable::range("s", 0, n as i64 - 1)], n)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    /// Position of variable `var` in its domain for state `state`.
    pub fn digit(&self, state: usize, var: usize) -> usize {
        (state / self.strides[var]) % self.vars[var].domain.len()
    }

    pub fn value(&self, state: usize, var: usize) -> &Value {
        &self.vars[var].domain[self.digit(state, var)]
    }

    /// The state that agrees with `state` except that `var` holds the
    /// `digit`-th value of its domain.
    pub fn with_digit(&self, state: usize, var: usize, digit: usize) -> usize {
        let old = self.digit(state, var);
        state - old * self.strides[var] + digit * self.strides[var]
    }

    /// Encodes one domain position per variable into a state index.
    pub fn encode(&self, digits: &[usize]) -> Option<usize> {
        if digits.len() != self.vars.len() {
            return None;
        }
        let mut index = 0;
        for (i, &d) in digits.iter().enumerate() {
            if d >= self.vars[i].domain.len() {
                return None;
            }
            index += d * self.strides[i];
        }
        Some(index)
    }

    pub fn valuation(&self, state: usize) -> Vec<(&str, &Value)> {
        (0..self.vars.len())
            .map(|i| (self.vars[i].name.as_str(), self.value(state, i)))
            .collect()
    }

    /// Human-readable rendering such as `pw=wrong, outcome=pending`.
    pub fn describe(&self, state: usize) -> String {
        self.valuation(state)
            .iter()
            .map(|(n, v)| format!("{n}={v}"))
            .collect::<Vec<_>>()
            .join(", ")
    }

    /// Every symbolic value that occurs in some domain.
    pub fn has_symbol(&self, sym: &str) -> bool {
        self.vars.iter().any(|v| {
            v.domain
                .iter()
                .any(|d| matches!(d, Value::Sym(s) if s == sym))
        })
    }
}

fn words(n: usize) -> usize {
    n.div_ceil(WORD).max(1)
}

fn same_space(a: &Arc<StateSpace>, b: &Arc<StateSpace>) -> Result<(), RelError> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(RelError::SpaceMismatch)
    }
}

fn iter_bits(words: &[u64], limit: usize) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(move |(w, &word)| {
        let mut rest = word;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let bit = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(w * WORD + bit)
        })
        .take_while(move |&i| i < limit)
    })
}

fn mask_tail(words: &mut [u64], n: usize) {
    let rem = n % WORD;
    if rem != 0 {
        if let Some(last) = words.last_mut() {
            *last &= (1u64 << rem) - 1;
        }
    }
}

/// A set of states.
#[derive(Clone, PartialEq, Eq)]
pub struct Predicate {
    space: Arc<StateSpace>,
    bits: Vec<u64>,
}

impl fmt::Debug for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Predicate {
    pub fn empty(space: &Arc<StateSpace>) -> Self {
        Self {
            space: space.clone(),
            bits: vec![0; words(space.size())],
        }
    }

    pub fn full(space: &Arc<StateSpace>) -> Self {
        let mut p = Self {
            space: space.clone(),
            bits: vec![u64::MAX; words(space.size())],
        };
        mask_tail(&mut p.bits, space.size());
        p
    }

    pub fn from_states(
        space: &Arc<StateSpace>,
        states: impl IntoIterator<Item = usize>,
    ) -> Result<Self, RelError> {
        let mut p = Self::empty(space);
        for s in states {
            if s >= space.size() {
                return Err(RelError::StateOutOfRange {
                    index: s,
                    size: space.size(),
                });
            }
            p.bits[s / WORD] |= 1 << (s % WORD);
        }
        Ok(p)
    }

    pub fn from_fn(space: &Arc<StateSpace>, mut f: impl FnMut(usize) -> bool) -> Self {
        let mut p = Self::empty(space);
        for s in 0..space.size() {
            if f(s) {
                p.bits[s / WORD] |= 1 << (s % WORD);
            }
        }
        p
    }

    /// Predicate whose membership is the low `space.size()` bits of `mask`.
    /// Only meaningful for spaces of at most 64 states.
    pub fn from_mask(space: &Arc<StateSpace>, mask: u64) -> Self {
        let mut p = Self::empty(space);
        p.bits[0] = mask;
        mask_tail(&mut p.bits, space.size());
        p
    }

    pub fn space(&self) -> &Arc<StateSpace> {
        &self.space
    }

    pub fn contains(&self, state: usize) -> bool {
        state < self.space.size() && self.bits[state / WORD] >> (state % WORD) & 1 == 1
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        iter_bits(&self.bits, self.space.size())
    }

    pub fn count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn complement(&self) -> Self {
        let mut bits: Vec<u64> = self.bits.iter().map(|w| !w).collect();
        mask_tail(&mut bits, self.space.size());
        Self {
            space: self.space.clone(),
            bits,
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Result<Self, RelError> {
        same_space(&self.space, &other.space)?;
        Ok(Self {
            space: self.space.clone(),
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn and(&self, other: &Self) -> Result<Self, RelError> {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn or(&self, other: &Self) -> Result<Self, RelError> {
        self.zip_with(other, |a, b| a | b)
    }

    /// `self ⊆ other`, i.e. the implication `self ⟹ other`.
    pub fn implies(&self, other: &Self) -> Result<bool, RelError> {
        same_space(&self.space, &other.space)?;
        Ok(self
            .bits
            .iter()
            .zip(&other.bits)
            .all(|(&a, &b)| a & !b == 0))
    }

    pub fn intersects(&self, other: &Self) -> Result<bool, RelError> {
        same_space(&self.space, &other.space)?;
        Ok(self.bits.iter().zip(&other.bits).any(|(&a, &b)| a & b != 0))
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.bits
    }
}

/// A binary relation on the states of a space, stored row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct Relation {
    space: Arc<StateSpace>,
    stride: usize,
    rows: Vec<u64>,
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.pairs()).finish()
    }
}

impl Relation {
    pub fn empty(space: &Arc<StateSpace>) -> Self {
        let stride = words(space.size());
        Self {
            space: space.clone(),
            stride,
            rows: vec![0; stride * space.size()],
        }
    }

    pub fn identity(space: &Arc<StateSpace>) -> Self {
        let mut r = Self::empty(space);
        for s in 0..space.size() {
            r.set(s, s);
        }
        r
    }

    pub fn top(space: &Arc<StateSpace>) -> Self {
        let full = Predicate::full(space);
        let mut r = Self::empty(space);
        for s in 0..space.size() {
            r.row_mut(s).copy_from_slice(full.words());
        }
        r
    }

    /// The filter relation `{(s, s) | s ∈ b}`.
    pub fn test(b: &Predicate) -> Self {
        let mut r = Self::empty(b.space());
        for s in b.iter() {
            r.set(s, s);
        }
        r
    }

    pub fn from_pairs(
        space: &Arc<StateSpace>,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, RelError> {
        let mut r = Self::empty(space);
        let size = space.size();
        for (s, t) in pairs {
            for index in [s, t] {
                if index >= size {
                    return Err(RelError::StateOutOfRange { index, size });
                }
            }
            r.set(s, t);
        }
        Ok(r)
    }

    /// Relation whose entry `(i, j)` is bit `i * n + j` of `mask`, with
    /// `n = space.size()`. Only meaningful when `n * n <= 64`.
    pub fn from_mask(space: &Arc<StateSpace>, mask: u64) -> Self {
        let n = space.size();
        let mut r = Self::empty(space);
        for i in 0..n {
            for j in 0..n {
                if mask >> (i * n + j) & 1 == 1 {
                    r.set(i, j);
                }
            }
        }
        r
    }

    pub fn space(&self) -> &Arc<StateSpace> {
        &self.space
    }

    fn row(&self, s: usize) -> &[u64] {
        &self.rows[s * self.stride..(s + 1) * self.stride]
    }

    fn row_mut(&mut self, s: usize) -> &mut [u64] {
        &mut self.rows[s * self.stride..(s + 1) * self.stride]
    }

    fn set(&mut self, s: usize, t: usize) {
        self.rows[s * self.stride + t / WORD] |= 1 << (t % WORD);
    }

    pub fn get(&self, s: usize, t: usize) -> bool {
        let n = self.space.size();
        s < n && t < n && self.rows[s * self.stride + t / WORD] >> (t % WORD) & 1 == 1
    }

    /// Successors of `s` as a predicate.
    pub fn successors(&self, s: usize) -> Predicate {
        Predicate {
            space: self.space.clone(),
            bits: self.row(s).to_vec(),
        }
    }

    /// All related pairs in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.space.size();
        (0..n).flat_map(move |s| iter_bits(self.row(s), n).map(move |t| (s, t)))
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(|&w| w == 0)
    }

    pub fn union(&self, other: &Self) -> Result<Self, RelError> {
        same_space(&self.space, &other.space)?;
        Ok(Self {
            space: self.space.clone(),
            stride: self.stride,
            rows: self
                .rows
                .iter()
                .zip(&other.rows)
                .map(|(&a, &b)| a | b)
                .collect(),
        })
    }

    /// Relational composition: first `self`, then `other`.
    pub fn compose(&self, other: &Self) -> Result<Self, RelError> {
        same_space(&self.space, &other.space)?;
        let n = self.space.size();
        let mut out = Self::empty(&self.space);
        for s in 0..n {
            let mut acc = vec![0u64; self.stride];
            for mid in iter_bits(self.row(s), n) {
                for (a, &b) in acc.iter_mut().zip(other.row(mid)) {
                    *a |= b;
                }
            }
            out.row_mut(s).copy_from_slice(&acc);
        }
        Ok(out)
    }

    /// Reflexive-transitive closure, by squaring `1 ∪ self` until it is stable.
    pub fn star(&self) -> Self {
        let mut closure = Self::identity(&self.space)
            .union(self)
            .expect("identity shares the space");
        loop {
            let next = closure.compose(&closure).expect("same space");
            if next == closure {
                return closure;
            }
            closure = next;
        }
    }

    pub fn converse(&self) -> Self {
        let mut out = Self::empty(&self.space);
        for (s, t) in self.pairs() {
            out.set(t, s);
        }
        out
    }

    /// States with at least one successor.
    pub fn domain(&self) -> Predicate {
        Predicate::from_fn(&self.space, |s| self.row(s).iter().any(|&w| w != 0))
    }

    /// States with at least one predecessor.
    pub fn codomain(&self) -> Predicate {
        let mut p = Predicate::empty(&self.space);
        for s in 0..self.space.size() {
            for (a, &b) in p.bits.iter_mut().zip(self.row(s)) {
                *a |= b;
            }
        }
        p
    }

    /// Bit-exact equality; fails when the spaces differ.
    pub fn equals(&self, other: &Self) -> Result<bool, RelError> {
        same_space(&self.space, &other.space)?;
        Ok(self.rows == other.rows)
    }

    /// Entrywise inclusion `self ⊆ other`.
    pub fn is_subset(&self, other: &Self) -> Result<bool, RelError> {
        same_space(&self.space, &other.space)?;
        Ok(self
            .rows
            .iter()
            .zip(&other.rows)
            .all(|(&a, &b)| a & !b == 0))
    }

    /// Number of successors of `s`.
    pub fn out_degree(&self, s: usize) -> usize {
        self.row(s).iter().map(|w| w.count_ones() as usize).sum()
    }
}
