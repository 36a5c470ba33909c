//! Partial graded index monoids and series indexed by them.
//!
//! [`NaturalMonoid`] recovers the plain `q^n` grading. [`CobordismMonoid`]
//! indexes coefficients by pairs `(M, p)` with `M` a connected compact
//! 1-manifold with boundary split into an initial and a final part, glued by
//! cobordism composition.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Debug};

use crate::algebra::{AlgebraDescriptor, AlgebraElement};
use crate::error::{Error, Result};
use crate::series::GradedSeries;

/// An `ℕ`-graded index family with a partial associative composition and
/// finitely many indexes per grade.
pub trait IndexMonoid: PartialEq + Debug {
    type Index: Clone + Ord + Debug;

    fn grade(&self, i: &Self::Index) -> usize;

    /// `i * j`, or `None` where the composition is undefined.
    fn compose(&self, i: &Self::Index, j: &Self::Index) -> Option<Self::Index>;

    fn neutral(&self) -> Option<Self::Index>;

    /// Every index of grade `n`.
    fn enumerate_grade(&self, n: usize) -> Vec<Self::Index>;
}

/// `ℕ` under addition; the index is the grade itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct NaturalMonoid;

impl IndexMonoid for NaturalMonoid {
    type Index = usize;

    fn grade(&self, i: &usize) -> usize {
        *i
    }

    fn compose(&self, i: &usize, j: &usize) -> Option<usize> {
        Some(i + j)
    }

    fn neutral(&self) -> Option<usize> {
        Some(0)
    }

    fn enumerate_grade(&self, n: usize) -> Vec<usize> {
        vec![n]
    }
}

/// Connected compact oriented 1-manifold, up to diffeomorphism, with its
/// boundary sorted into an initial point (at 0) and a final point (at 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cobordism1 {
    pub circle: bool,
    pub has_initial: bool,
    pub has_final: bool,
}

impl Cobordism1 {
    pub const CIRCLE: Self = Cobordism1 {
        circle: true,
        has_initial: false,
        has_final: false,
    };
    /// `[0;1]`
    pub const CLOSED: Self = Cobordism1::interval(true, true);
    /// `[0;1[`
    pub const INITIAL_ONLY: Self = Cobordism1::interval(true, false);
    /// `]0;1]`
    pub const FINAL_ONLY: Self = Cobordism1::interval(false, true);
    /// `]0;1[`
    pub const OPEN: Self = Cobordism1::interval(false, false);

    const fn interval(has_initial: bool, has_final: bool) -> Self {
        Cobordism1 {
            circle: false,
            has_initial,
            has_final,
        }
    }

    /// The five elements of `Gr_1`.
    pub fn all() -> [Self; 5] {
        [
            Self::CIRCLE,
            Self::INITIAL_ONLY,
            Self::OPEN,
            Self::FINAL_ONLY,
            Self::CLOSED,
        ]
    }

    /// Cobordism composition `self * other`: glue the initial point of
    /// `self` to the final point of `other`. The result keeps the initial
    /// boundary of `other` and the final boundary of `self`. A circle has
    /// empty boundary and composes with nothing.
    pub fn compose(self, other: Self) -> Option<Self> {
        if self.circle || other.circle || !self.has_initial || !other.has_final {
            return None;
        }
        Some(Cobordism1::interval(other.has_initial, self.has_final))
    }
}

impl fmt::Display for Cobordism1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.circle {
            return f.write_str("S1");
        }
        let left = if self.has_initial { "[" } else { "]" };
        let right = if self.has_final { "]" } else { "[" };
        write!(f, "{left}0;1{right}")
    }
}

/// Index of the cobordism grading: the neutral `(∅, 0)` or `(M, p)` with
/// `p ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CobordismIndex {
    Empty,
    Graded(Cobordism1, usize),
}

impl fmt::Display for CobordismIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CobordismIndex::Empty => f.write_str("(empty,0)"),
            CobordismIndex::Graded(m, p) => write!(f, "({m},{p})"),
        }
    }
}

/// `(Gr_1 × ℕ*) ∐ {(∅, 0)}` with `(M,p) * (M',p') = (M*M', p+p')`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CobordismMonoid;

impl IndexMonoid for CobordismMonoid {
    type Index = CobordismIndex;

    fn grade(&self, i: &CobordismIndex) -> usize {
        match i {
            CobordismIndex::Empty => 0,
            CobordismIndex::Graded(_, p) => *p,
        }
    }

    fn compose(&self, i: &CobordismIndex, j: &CobordismIndex) -> Option<CobordismIndex> {
        match (i, j) {
            (CobordismIndex::Empty, x) | (x, CobordismIndex::Empty) => Some(*x),
            (CobordismIndex::Graded(m, p), CobordismIndex::Graded(n, r)) => {
                m.compose(*n).map(|k| CobordismIndex::Graded(k, p + r))
            }
        }
    }

    fn neutral(&self) -> Option<CobordismIndex> {
        Some(CobordismIndex::Empty)
    }

    fn enumerate_grade(&self, n: usize) -> Vec<CobordismIndex> {
        if n == 0 {
            return vec![CobordismIndex::Empty];
        }
        Cobordism1::all()
            .into_iter()
            .map(|m| CobordismIndex::Graded(m, n))
            .collect()
    }
}

/// Sub-family `Γ` of a monoid generated by finitely many indexes, stored up
/// to a grade cap. Contains the neutral index only if it is a generator.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedFamily<M: IndexMonoid> {
    monoid: M,
    max_grade: usize,
    members: BTreeSet<M::Index>,
}

impl<M: IndexMonoid> GeneratedFamily<M> {
    pub fn generate(monoid: M, generators: &[M::Index], max_grade: usize) -> Self {
        let mut members: BTreeSet<M::Index> = generators
            .iter()
            .filter(|g| monoid.grade(g) <= max_grade)
            .cloned()
            .collect();
        loop {
            let mut fresh = Vec::new();
            for a in &members {
                for b in &members {
                    if let Some(c) = monoid.compose(a, b) {
                        if monoid.grade(&c) <= max_grade && !members.contains(&c) {
                            fresh.push(c);
                        }
                    }
                }
            }
            if fresh.is_empty() {
                break;
            }
            members.extend(fresh);
        }
        GeneratedFamily {
            monoid,
            max_grade,
            members,
        }
    }

    pub fn members(&self) -> &BTreeSet<M::Index> {
        &self.members
    }

    pub fn max_grade(&self) -> usize {
        self.max_grade
    }
}

impl<M: IndexMonoid> IndexMonoid for GeneratedFamily<M> {
    type Index = M::Index;

    fn grade(&self, i: &M::Index) -> usize {
        self.monoid.grade(i)
    }

    fn compose(&self, i: &M::Index, j: &M::Index) -> Option<M::Index> {
        self.monoid.compose(i, j)
    }

    fn neutral(&self) -> Option<M::Index> {
        self.monoid.neutral().filter(|e| self.members.contains(e))
    }

    fn enumerate_grade(&self, n: usize) -> Vec<M::Index> {
        self.members
            .iter()
            .filter(|i| self.monoid.grade(i) == n)
            .cloned()
            .collect()
    }
}

/// Whether `set` is closed under the composition, ignoring products whose
/// grade exceeds `max_grade`.
pub fn is_stable<M: IndexMonoid>(monoid: &M, set: &BTreeSet<M::Index>, max_grade: usize) -> bool {
    set.iter().all(|a| {
        set.iter().all(|b| match monoid.compose(a, b) {
            Some(c) => monoid.grade(&c) > max_grade || set.contains(&c),
            None => true,
        })
    })
}

/// Series `Σ_i q^{grade(i)} a_i` over the indexes of a monoid, truncated at
/// grade `N`. Absent indexes are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexedSeries<M: IndexMonoid> {
    monoid: M,
    max_grade: usize,
    descriptor: AlgebraDescriptor,
    terms: BTreeMap<M::Index, AlgebraElement>,
}

impl<M: IndexMonoid + Clone> IndexedSeries<M> {
    pub fn zero(monoid: M, descriptor: &AlgebraDescriptor, max_grade: usize) -> Self {
        IndexedSeries {
            monoid,
            max_grade,
            descriptor: descriptor.clone(),
            terms: BTreeMap::new(),
        }
    }

    /// The algebra unit at the neutral index.
    pub fn unit(monoid: M, descriptor: &AlgebraDescriptor, max_grade: usize) -> Result<Self> {
        let e = monoid
            .neutral()
            .ok_or_else(|| Error::Domain("monoid has no neutral index".into()))?;
        let mut s = Self::zero(monoid, descriptor, max_grade);
        s.insert(e, AlgebraElement::one(descriptor))?;
        Ok(s)
    }

    pub fn single(
        monoid: M,
        index: M::Index,
        a: AlgebraElement,
        max_grade: usize,
    ) -> Result<Self> {
        let mut s = Self::zero(monoid, &a.descriptor(), max_grade);
        s.insert(index, a)?;
        Ok(s)
    }

    /// Adds `a` to the coefficient at `index`.
    pub fn insert(&mut self, index: M::Index, a: AlgebraElement) -> Result<()> {
        let d = a.descriptor();
        if d != self.descriptor {
            return Err(Error::shape(&self.descriptor, &d));
        }
        let g = self.monoid.grade(&index);
        if g > self.max_grade {
            return Err(Error::InvalidParameter(format!(
                "index {index:?} has grade {g} above truncation {}",
                self.max_grade
            )));
        }
        match self.terms.get_mut(&index) {
            Some(c) => c.axpy(1.0, &a)?,
            None => {
                self.terms.insert(index, a);
            }
        }
        Ok(())
    }

    pub fn coeff(&self, index: &M::Index) -> Option<&AlgebraElement> {
        self.terms.get(index)
    }

    pub fn terms(&self) -> &BTreeMap<M::Index, AlgebraElement> {
        &self.terms
    }

    pub fn max_grade(&self) -> usize {
        self.max_grade
    }

    pub fn monoid(&self) -> &M {
        &self.monoid
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(AlgebraElement::is_zero)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.monoid != other.monoid {
            return Err(Error::InvalidParameter(format!(
                "monoid mismatch: {:?} vs {:?}",
                self.monoid, other.monoid
            )));
        }
        if self.max_grade != other.max_grade {
            return Err(Error::OrderMismatch {
                left: self.max_grade,
                right: other.max_grade,
            });
        }
        if self.descriptor != other.descriptor {
            return Err(Error::shape(&self.descriptor, &other.descriptor));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (i, a) in &other.terms {
            out.insert(i.clone(), a.clone())?;
        }
        Ok(out)
    }

    /// `(ST)_k = Σ_{i*j=k} S_i T_j`; pairs with undefined `i*j` contribute
    /// nothing.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = Self::zero(self.monoid.clone(), &self.descriptor, self.max_grade);
        for (i, a) in &self.terms {
            for (j, b) in &other.terms {
                if self.monoid.grade(i) + self.monoid.grade(j) > self.max_grade {
                    continue;
                }
                if let Some(k) = self.monoid.compose(i, j) {
                    out.insert(k, a.mul(b)?)?;
                }
            }
        }
        Ok(out)
    }

    /// Largest coefficient distance to another series over the union of
    /// supports.
    pub fn max_distance(&self, other: &Self) -> Result<f64> {
        self.check(other)?;
        let zero = AlgebraElement::zero(&self.descriptor);
        let keys: BTreeSet<&M::Index> = self.terms.keys().chain(other.terms.keys()).collect();
        let mut worst: f64 = 0.0;
        for k in keys {
            let a = self.terms.get(k).unwrap_or(&zero);
            let b = other.terms.get(k).unwrap_or(&zero);
            worst = worst.max(a.sub(b)?.norm());
        }
        Ok(worst)
    }
}

impl IndexedSeries<NaturalMonoid> {
    pub fn from_graded(s: &GradedSeries) -> Self {
        let mut out = Self::zero(NaturalMonoid, s.descriptor(), s.order());
        for (n, c) in s.coeffs().iter().enumerate() {
            out.insert(n, c.clone()).expect("grade within truncation");
        }
        out
    }

    pub fn to_graded(&self) -> GradedSeries {
        let mut out = GradedSeries::zero(&self.descriptor, self.max_grade);
        for (n, c) in &self.terms {
            out.set_coeff(*n, c.clone()).expect("descriptor checked on insert");
        }
        out
    }
}

/// All defined compositions among the elements of `Gr_1`, as
/// `(left, right, product)` in a fixed order.
pub fn gr1_composition_table() -> Vec<(Cobordism1, Cobordism1, Option<Cobordism1>)> {
    let all = Cobordism1::all();
    all.iter()
        .flat_map(|&a| all.iter().map(move |&b| (a, b, a.compose(b))))
        .collect()
}
