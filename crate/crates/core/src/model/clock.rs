//! Clocks, integer clock valuations and clock constraints.

use std::fmt;

/// Index of a clock inside an automaton's clock table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClockId(pub u16);

impl ClockId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Maximum number of clocks a single automaton may declare.
pub const MAX_CLOCKS: usize = 64;

/// A set of clocks, stored as a bitmask over [`ClockId`]s.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClockSet(pub u64);

impl ClockSet {
    pub const EMPTY: ClockSet = ClockSet(0);

    pub fn single(clock: ClockId) -> Self {
        ClockSet(1u64 << clock.0)
    }

    pub fn insert(&mut self, clock: ClockId) {
        self.0 |= 1u64 << clock.0;
    }

    pub fn contains(self, clock: ClockId) -> bool {
        self.0 & (1u64 << clock.0) != 0
    }

    pub fn union(self, other: ClockSet) -> ClockSet {
        ClockSet(self.0 | other.0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Renumbers every member by `offset`, used when clock tables are concatenated.
    pub fn shifted(self, offset: u16) -> ClockSet {
        ClockSet(self.0 << offset)
    }

    pub fn iter(self) -> impl Iterator<Item = ClockId> {
        (0..64u16).filter(move |i| self.0 & (1u64 << i) != 0).map(ClockId)
    }
}

/// Comparison operator of an atomic clock constraint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CmpOp {
    Le,
    Lt,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn holds<T: PartialOrd>(self, lhs: T, rhs: T) -> bool {
        match self {
            CmpOp::Le => lhs <= rhs,
            CmpOp::Lt => lhs < rhs,
            CmpOp::Gt => lhs > rhs,
            CmpOp::Ge => lhs >= rhs,
        }
    }

    pub fn negate(self) -> CmpOp {
        match self {
            CmpOp::Le => CmpOp::Gt,
            CmpOp::Lt => CmpOp::Ge,
            CmpOp::Gt => CmpOp::Le,
            CmpOp::Ge => CmpOp::Lt,
        }
    }

    /// The operator obtained by swapping both sides: `a op b` iff `b op.mirror() a`.
    pub fn mirror(self) -> CmpOp {
        match self {
            CmpOp::Le => CmpOp::Ge,
            CmpOp::Lt => CmpOp::Gt,
            CmpOp::Gt => CmpOp::Lt,
            CmpOp::Ge => CmpOp::Le,
        }
    }

    pub fn is_strict(self) -> bool {
        matches!(self, CmpOp::Lt | CmpOp::Gt)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Le => "<=",
            CmpOp::Lt => "<",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

impl fmt::Display for CmpOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Atomic constraint `x op c` or `x - y op c` with a non-negative integer bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClockAtom {
    Single {
        clock: ClockId,
        op: CmpOp,
        bound: u32,
    },
    Diagonal {
        clock: ClockId,
        other: ClockId,
        op: CmpOp,
        bound: u32,
    },
}

impl ClockAtom {
    pub fn satisfied_by(&self, valuation: &[u32]) -> bool {
        match *self {
            ClockAtom::Single { clock, op, bound } => {
                op.holds(valuation[clock.index()] as i64, bound as i64)
            }
            ClockAtom::Diagonal {
                clock,
                other,
                op,
                bound,
            } => op.holds(
                valuation[clock.index()] as i64 - valuation[other.index()] as i64,
                bound as i64,
            ),
        }
    }

    pub fn bound(&self) -> u32 {
        match *self {
            ClockAtom::Single { bound, .. } | ClockAtom::Diagonal { bound, .. } => bound,
        }
    }

    pub fn op(&self) -> CmpOp {
        match *self {
            ClockAtom::Single { op, .. } | ClockAtom::Diagonal { op, .. } => op,
        }
    }

    pub fn mentions(&self, x: ClockId) -> bool {
        match *self {
            ClockAtom::Single { clock, .. } => clock == x,
            ClockAtom::Diagonal { clock, other, .. } => clock == x || other == x,
        }
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(self, ClockAtom::Diagonal { .. })
    }

    pub fn negate(&self) -> ClockAtom {
        match *self {
            ClockAtom::Single { clock, op, bound } => ClockAtom::Single {
                clock,
                op: op.negate(),
                bound,
            },
            ClockAtom::Diagonal {
                clock,
                other,
                op,
                bound,
            } => ClockAtom::Diagonal {
                clock,
                other,
                op: op.negate(),
                bound,
            },
        }
    }

    pub fn shifted(&self, offset: u16) -> ClockAtom {
        match *self {
            ClockAtom::Single { clock, op, bound } => ClockAtom::Single {
                clock: ClockId(clock.0 + offset),
                op,
                bound,
            },
            ClockAtom::Diagonal {
                clock,
                other,
                op,
                bound,
            } => ClockAtom::Diagonal {
                clock: ClockId(clock.0 + offset),
                other: ClockId(other.0 + offset),
                op,
                bound,
            },
        }
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        AtomDisplay { atom: self, names }
    }
}

struct AtomDisplay<'a> {
    atom: &'a ClockAtom,
    names: &'a [String],
}

impl fmt::Display for AtomDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = |c: ClockId| {
            self.names
                .get(c.index())
                .cloned()
                .unwrap_or_else(|| format!("#{}", c.0))
        };
        match *self.atom {
            ClockAtom::Single { clock, op, bound } => write!(f, "{}{}{}", name(clock), op, bound),
            ClockAtom::Diagonal {
                clock,
                other,
                op,
                bound,
            } => write!(f, "{}-{}{}{}", name(clock), name(other), op, bound),
        }
    }
}

/// Conjunction of atomic clock constraints; the empty conjunction is `true`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClockConstraint {
    atoms: Vec<ClockAtom>,
}

impl ClockConstraint {
    pub fn tt() -> Self {
        Self::default()
    }

    pub fn from_atoms(atoms: impl IntoIterator<Item = ClockAtom>) -> Self {
        let mut atoms: Vec<ClockAtom> = atoms.into_iter().collect();
        atoms.sort();
        atoms.dedup();
        ClockConstraint { atoms }
    }

    pub fn atoms(&self) -> &[ClockAtom] {
        &self.atoms
    }

    pub fn is_true(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn and(&self, other: &ClockConstraint) -> ClockConstraint {
        ClockConstraint::from_atoms(self.atoms.iter().chain(other.atoms.iter()).copied())
    }

    pub fn satisfied_by(&self, valuation: &[u32]) -> bool {
        self.atoms.iter().all(|a| a.satisfied_by(valuation))
    }

    /// Largest bound compared against `clock`, if any atom mentions it.
    pub fn max_constant(&self, clock: ClockId) -> Option<u32> {
        self.atoms
            .iter()
            .filter(|a| a.mentions(clock))
            .map(|a| a.bound())
            .max()
    }

    pub fn has_strict(&self) -> bool {
        self.atoms.iter().any(|a| a.op().is_strict())
    }

    pub fn has_diagonal(&self) -> bool {
        self.atoms.iter().any(|a| a.is_diagonal())
    }

    pub fn shifted(&self, offset: u16) -> ClockConstraint {
        ClockConstraint {
            atoms: self.atoms.iter().map(|a| a.shifted(offset)).collect(),
        }
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        ConstraintDisplay {
            constraint: self,
            names,
        }
    }
}

struct ConstraintDisplay<'a> {
    constraint: &'a ClockConstraint,
    names: &'a [String],
}

impl fmt::Display for ConstraintDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.constraint.atoms.is_empty() {
            return f.write_str("true");
        }
        for (i, atom) in self.constraint.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            write!(f, "{}", atom.display(self.names))?;
        }
        Ok(())
    }
}

/// Integer-valued assignment of clock values.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ClockValuation {
    values: Vec<u32>,
}

impl ClockValuation {
    pub fn zero(clocks: usize) -> Self {
        ClockValuation {
            values: vec![0; clocks],
        }
    }

    pub fn from_values(values: Vec<u32>) -> Self {
        ClockValuation { values }
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn get(&self, clock: ClockId) -> u32 {
        self.values[clock.index()]
    }

    /// `v[X:=0]`
    pub fn reset(&self, clocks: ClockSet) -> ClockValuation {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| if clocks.contains(ClockId(i as u16)) { 0 } else { v })
            .collect();
        ClockValuation { values }
    }

    /// `v + d`
    pub fn delay(&self, d: u32) -> ClockValuation {
        ClockValuation {
            values: self.values.iter().map(|v| v + d).collect(),
        }
    }

    pub fn satisfies(&self, constraint: &ClockConstraint) -> bool {
        constraint.satisfied_by(&self.values)
    }
}
