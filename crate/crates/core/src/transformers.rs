//! Angelic and demonic weakest (liberal) preconditions and strongest
//! (liberal) postconditions of a relation.
//!
//! The unprefixed names follow the usual convention: non-liberal
//! transformers are angelic and liberal ones are demonic, so `wp = awp`,
//! `wlp = dwlp`, `sp = asp` and `slp = dslp`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::relalg::{Predicate, RelError, Relation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformerKind {
    Awp,
    Dwp,
    Awlp,
    Dwlp,
    Asp,
    Dsp,
    Aslp,
    Dslp,
}

impl TransformerKind {
    pub const ALL: [TransformerKind; 8] = [
        TransformerKind::Awp,
        TransformerKind::Dwp,
        TransformerKind::Awlp,
        TransformerKind::Dwlp,
        TransformerKind::Asp,
        TransformerKind::Dsp,
        TransformerKind::Aslp,
        TransformerKind::Dslp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TransformerKind::Awp => "awp",
            TransformerKind::Dwp => "dwp",
            TransformerKind::Awlp => "awlp",
            TransformerKind::Dwlp => "dwlp",
            TransformerKind::Asp => "asp",
            TransformerKind::Dsp => "dsp",
            TransformerKind::Aslp => "aslp",
            TransformerKind::Dslp => "dslp",
        }
    }

    pub fn is_angelic(self) -> bool {
        matches!(
            self,
            TransformerKind::Awp
                | TransformerKind::Awlp
                | TransformerKind::Asp
                | TransformerKind::Aslp
        )
    }

    pub fn is_liberal(self) -> bool {
        matches!(
            self,
            TransformerKind::Awlp
                | TransformerKind::Dwlp
                | TransformerKind::Aslp
                | TransformerKind::Dslp
        )
    }

    /// Backward transformers map a postcondition to a precondition.
    pub fn is_backward(self) -> bool {
        matches!(
            self,
            TransformerKind::Awp
                | TransformerKind::Dwp
                | TransformerKind::Awlp
                | TransformerKind::Dwlp
        )
    }

    /// The De Morgan dual: `self(r, q) = ¬dual(r, ¬q)`.
    pub fn dual(self) -> Self {
        match self {
            TransformerKind::Awp => TransformerKind::Dwlp,
            TransformerKind::Dwlp => TransformerKind::Awp,
            TransformerKind::Dwp => TransformerKind::Awlp,
            TransformerKind::Awlp => TransformerKind::Dwp,
            TransformerKind::Asp => TransformerKind::Dslp,
            TransformerKind::Dslp => TransformerKind::Asp,
            TransformerKind::Dsp => TransformerKind::Aslp,
            TransformerKind::Aslp => TransformerKind::Dsp,
        }
    }

    pub fn apply(self, r: &Relation, q: &Predicate) -> Result<Predicate, RelError> {
        match self {
            TransformerKind::Awp => awp(r, q),
            TransformerKind::Dwp => dwp(r, q),
            TransformerKind::Awlp => awlp(r, q),
            TransformerKind::Dwlp => dwlp(r, q),
            TransformerKind::Asp => asp(r, q),
            TransformerKind::Dsp => dsp(r, q),
            TransformerKind::Aslp => aslp(r, q),
            TransformerKind::Dslp => dslp(r, q),
        }
    }
}

impl fmt::Display for TransformerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown transformer `{0}`")]
pub struct UnknownTransformer(pub String);

impl FromStr for TransformerKind {
    type Err = UnknownTransformer;

    /// Accepts the eight explicit names and the conventional aliases
    /// `wp`, `wlp`, `sp` and `slp`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "wp" => TransformerKind::Awp,
            "wlp" => TransformerKind::Dwlp,
            "sp" => TransformerKind::Asp,
            "slp" => TransformerKind::Dslp,
            _ => *TransformerKind::ALL
                .iter()
                .find(|k| k.name() == s)
                .ok_or_else(|| UnknownTransformer(s.to_owned()))?,
        })
    }
}

fn check(r: &Relation, q: &Predicate) -> Result<(), RelError> {
    if r.space() == q.space() {
        Ok(())
    } else {
        Err(RelError::SpaceMismatch)
    }
}

/// States with some successor in `c`.
pub fn awp(r: &Relation, c: &Predicate) -> Result<Predicate, RelError> {
    check(r, c)?;
    let n = r.space().size();
    let rows: Vec<bool> = (0..n)
        .map(|s| r.successors(s).intersects(c))
        .collect::<Result<_, _>>()?;
    Ok(Predicate::from_fn(r.space(), |s| rows[s]))
}

/// States all of whose successors lie in `c`; states without successors
/// qualify vacuously.
pub fn dwlp(r: &Relation, c: &Predicate) -> Result<Predicate, RelError> {
    check(r, c)?;
    let n = r.space().size();
    let rows: Vec<bool> = (0..n)
        .map(|s| r.successors(s).implies(c))
        .collect::<Result<_, _>>()?;
    Ok(Predicate::from_fn(r.space(), |s| rows[s]))
}

/// States reachable from `b` in one step of `r`.
pub fn asp(r: &Relation, b: &Predicate) -> Result<Predicate, RelError> {
    check(r, b)?;
    b.iter().try_fold(Predicate::empty(r.space()), |acc, s| {
        acc.or(&r.successors(s))
    })
}

/// States all of whose predecessors lie in `b`; unreachable states qualify
/// vacuously.
pub fn dslp(r: &Relation, b: &Predicate) -> Result<Predicate, RelError> {
    check(r, b)?;
    let mut out = Predicate::full(r.space());
    for s in b.complement().iter() {
        out = out.and(&r.successors(s).complement())?;
    }
    Ok(out)
}

pub fn dwp(r: &Relation, c: &Predicate) -> Result<Predicate, RelError> {
    dwlp(r, c)?.and(&r.domain())
}

pub fn awlp(r: &Relation, c: &Predicate) -> Result<Predicate, RelError> {
    awp(r, c)?.or(&r.domain().complement())
}

pub fn dsp(r: &Relation, b: &Predicate) -> Result<Predicate, RelError> {
    dslp(r, b)?.and(&r.codomain())
}

pub fn aslp(r: &Relation, b: &Predicate) -> Result<Predicate, RelError> {
    asp(r, b)?.or(&r.codomain().complement())
}
