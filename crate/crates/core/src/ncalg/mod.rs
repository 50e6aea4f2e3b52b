//! Free graded associative algebra over `Q(p, x)` on indexed generators.

mod matrix;
mod polynomial;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use smallvec::SmallVec;

use crate::error::{QdcError, Result};

pub use matrix::{qdet, qdet_columns, PolyMatrix};
pub use polynomial::Polynomial;

/// Generator families. The declaration order is the precedence used by the
/// monomial order: functions, Lie derivatives, forms, inner derivations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    T = 0,
    L = 1,
    Om = 2,
    OmL = 3,
    OmT = 4,
    Im = 5,
    ImL = 6,
}

impl Kind {
    pub const ALL: [Kind; 7] = [Kind::T, Kind::L, Kind::Om, Kind::OmL, Kind::OmT, Kind::Im, Kind::ImL];

    pub fn name(self) -> &'static str {
        match self {
            Kind::T => "T",
            Kind::L => "L",
            Kind::Om => "Om",
            Kind::OmL => "OmL",
            Kind::OmT => "OmT",
            Kind::Im => "Im",
            Kind::ImL => "ImL",
        }
    }

    pub fn is_form(self) -> bool {
        matches!(self, Kind::Om | Kind::OmL | Kind::OmT)
    }

    pub fn is_inner(self) -> bool {
        matches!(self, Kind::Im | Kind::ImL)
    }

    pub fn parity(self) -> u8 {
        u8::from(self.is_form() || self.is_inner())
    }

    fn from_index(i: u16) -> Kind {
        Kind::ALL[i as usize]
    }
}

impl FromStr for Kind {
    type Err = QdcError;
    fn from_str(s: &str) -> Result<Kind> {
        Kind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| QdcError::Unknown(format!("generator kind {s}")))
    }
}

/// An indexed generator `K[row, col]`. Indices are 0-based internally and
/// printed 1-based.
///
/// Generators are ordered by kind and then *triangularly* within a kind:
/// strictly upper entries (row, col ascending), then the diagonal, then
/// strictly lower entries (row, col descending). For N = 3:
/// `12 < 13 < 23 < 11 < 22 < 33 < 32 < 31 < 21`.
///
/// With plain `(row, col)` order the reflection-equation and quadratic
/// form relations are not confluent at degree 3, although their Hilbert
/// series have PBW size; the triangular order resolves every overlap of the
/// shipped presentations.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gen(u32);

impl Gen {
    pub const MAX_INDEX: usize = 63;

    pub fn new(kind: Kind, row: usize, col: usize) -> Gen {
        assert!(row <= Self::MAX_INDEX && col <= Self::MAX_INDEX, "generator index too large");
        let (class, a, b) = match row.cmp(&col) {
            std::cmp::Ordering::Less => (0, row, col),
            std::cmp::Ordering::Equal => (1, row, col),
            std::cmp::Ordering::Greater => (2, 63 - row, 63 - col),
        };
        Gen(((kind as u32) << 14) | (class << 12) | ((a as u32) << 6) | b as u32)
    }

    pub fn kind(self) -> Kind {
        Kind::from_index((self.0 >> 14) as u16)
    }

    fn lower(self) -> bool {
        (self.0 >> 12) & 3 == 2
    }

    pub fn row(self) -> usize {
        let a = ((self.0 >> 6) & 63) as usize;
        if self.lower() {
            63 - a
        } else {
            a
        }
    }

    pub fn col(self) -> usize {
        let b = (self.0 & 63) as usize;
        if self.lower() {
            63 - b
        } else {
            b
        }
    }

    pub fn parity(self) -> u8 {
        self.kind().parity()
    }

    pub fn code(self) -> u32 {
        self.0
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{},{}]", self.kind().name(), self.row() + 1, self.col() + 1)
    }
}

impl fmt::Debug for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A word in the generators. Ordered degree-lexicographically: shorter words
/// are smaller, equal lengths compare letter by letter.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(pub SmallVec<[Gen; 8]>);

impl Word {
    pub fn empty() -> Word {
        Word(SmallVec::new())
    }

    pub fn from_gens(gens: &[Gen]) -> Word {
        Word(SmallVec::from_slice(gens))
    }

    pub fn single(g: Gen) -> Word {
        let mut v = SmallVec::new();
        v.push(g);
        Word(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Gen] {
        &self.0
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = SmallVec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn parity(&self) -> u8 {
        self.0.iter().map(|g| g.parity()).sum::<u8>() % 2
    }

    /// `#forms - #inner derivations`
    pub fn form_degree(&self) -> i32 {
        self.0
            .iter()
            .map(|g| {
                let k = g.kind();
                if k.is_form() {
                    1
                } else if k.is_inner() {
                    -1
                } else {
                    0
                }
            })
            .sum()
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.as_slice().cmp(other.0.as_slice()))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("1");
        }
        for (i, g) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
