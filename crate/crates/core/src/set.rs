//! Deduplicated finite sets of group elements.

use std::fmt;

use indexmap::IndexSet;

use crate::error::AlgebraError;
use crate::field::FieldCtx;
use crate::matrix::GroupElement;

/// Default bound on enumerated set sizes; overridable per call.
pub const DEFAULT_CAP: usize = 1 << 22;

/// A finite set of `r x r` group elements over one field, in insertion order.
///
/// Equality is set equality and ignores order.
#[derive(Clone)]
pub struct ElementSet {
    ctx: FieldCtx,
    r: usize,
    elems: IndexSet<GroupElement>,
}

impl PartialEq for ElementSet {
    fn eq(&self, other: &Self) -> bool {
        self.r == other.r && self.len() == other.len() && self.is_subset(other)
    }
}
impl Eq for ElementSet {}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.elems.iter()).finish()
    }
}

impl ElementSet {
    pub fn new(ctx: &FieldCtx, r: usize) -> Self {
        ElementSet { ctx: ctx.clone(), r, elems: IndexSet::new() }
    }

    pub fn identity(ctx: &FieldCtx, r: usize) -> Self {
        let mut s = Self::new(ctx, r);
        s.insert(GroupElement::identity(ctx, r));
        s
    }

    /// Collects elements, rejecting any that disagree on field or dimension.
    pub fn from_elements(
        ctx: &FieldCtx,
        r: usize,
        items: impl IntoIterator<Item = GroupElement>,
    ) -> Result<Self, AlgebraError> {
        let mut s = Self::new(ctx, r);
        for g in items {
            if g.ctx() != ctx {
                return Err(AlgebraError::ContextMismatch);
            }
            if g.dim() != r {
                return Err(AlgebraError::DimensionMismatch(format!("{} vs {r}", g.dim())));
            }
            s.insert(g);
        }
        Ok(s)
    }

    /// Builds a set from a nonempty list, taking field and dimension from the first element.
    pub fn from_vec(items: Vec<GroupElement>) -> Result<Self, AlgebraError> {
        let first = items.first().ok_or_else(|| AlgebraError::Empty("element list".into()))?;
        let (ctx, r) = (first.ctx().clone(), first.dim());
        Self::from_elements(&ctx, r, items)
    }

    /// Same field and dimension, no elements.
    pub fn empty_like(&self) -> Self {
        Self::new(&self.ctx, self.r)
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }
    pub fn dim(&self) -> usize {
        self.r
    }
    pub fn len(&self) -> usize {
        self.elems.len()
    }
    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    /// Inserts; returns whether the element was new.
    pub fn insert(&mut self, g: GroupElement) -> bool {
        self.elems.insert(g)
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.elems.contains(g)
    }

    pub fn index_of(&self, g: &GroupElement) -> Option<usize> {
        self.elems.get_index_of(g)
    }

    pub fn get(&self, i: usize) -> Option<&GroupElement> {
        self.elems.get_index(i)
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &GroupElement> + '_ {
        self.elems.iter()
    }

    pub fn identity_element(&self) -> GroupElement {
        GroupElement::identity(&self.ctx, self.r)
    }

    pub fn contains_identity(&self) -> bool {
        self.contains(&self.identity_element())
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.iter().all(|g| other.contains(g))
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut out = self.empty_like();
        for g in self.iter().filter(|g| other.contains(g)) {
            out.insert(g.clone());
        }
        out
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for g in other.iter() {
            out.insert(g.clone());
        }
        out
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.filter(|g| !other.contains(g))
    }

    pub fn filter(&self, mut keep: impl FnMut(&GroupElement) -> bool) -> Self {
        let mut out = self.empty_like();
        for g in self.iter().filter(|g| keep(g)) {
            out.insert(g.clone());
        }
        out
    }

    pub fn map(&self, f: impl Fn(&GroupElement) -> GroupElement) -> Self {
        let mut out = self.empty_like();
        for g in self.iter() {
            out.insert(f(g));
        }
        out
    }

    /// `{g^-1 : g in self}`.
    pub fn inverses(&self) -> Self {
        self.map(|g| g.inv())
    }

    /// `A ∪ A^-1 ∪ {1}`.
    pub fn symmetrized(&self) -> Self {
        let mut out = self.identity_like();
        for g in self.iter() {
            out.insert(g.clone());
            out.insert(g.inv());
        }
        out
    }

    fn identity_like(&self) -> Self {
        Self::identity(&self.ctx, self.r)
    }

    /// Plain product set `{ab : a in self, b in other}`.
    pub fn product(&self, other: &Self, cap: usize) -> Result<Self, AlgebraError> {
        let mut out = self.empty_like();
        for a in self.iter() {
            for b in other.iter() {
                out.insert(a.mul_unchecked(b));
                if out.len() > cap {
                    return Err(AlgebraError::Capacity { cap, partial: out.len() });
                }
            }
        }
        Ok(out)
    }

    /// Left translate `gA`.
    pub fn left_translate(&self, g: &GroupElement) -> Self {
        self.map(|a| g.mul_unchecked(a))
    }

    /// Conjugate `gAg^-1`.
    pub fn conjugate(&self, g: &GroupElement) -> Self {
        let gi = g.inv();
        self.map(|a| g.mul_unchecked(a).mul_unchecked(&gi))
    }

    /// Elements sorted by canonical encoding.
    pub fn sorted(&self) -> Vec<GroupElement> {
        let mut v: Vec<_> = self.elems.iter().cloned().collect();
        v.sort();
        v
    }

    /// Same set with elements re-inserted in canonical order.
    pub fn canonicalized(&self) -> Self {
        let mut out = self.empty_like();
        for g in self.sorted() {
            out.insert(g);
        }
        out
    }

    pub fn to_vec(&self) -> Vec<GroupElement> {
        self.elems.iter().cloned().collect()
    }
}

impl<'a> IntoIterator for &'a ElementSet {
    type Item = &'a GroupElement;
    type IntoIter = indexmap::set::Iter<'a, GroupElement>;
    fn into_iter(self) -> Self::IntoIter {
        self.elems.iter()
    }
}
