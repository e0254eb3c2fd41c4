//! Enumeration of types and flag bases.
//!
//! Bases grow one vertex at a time: every flag of the previous level is
//! extended by a new vertex in each of its `2^n` possible neighbourhoods and
//! the results are deduplicated by canonical form.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;

use crate::canon::{canonical_form_prefix, CanonicalForm};
use crate::error::AlgebraError;
use crate::graph::{Flag, Graph, TypeGraph};

/// Largest flag size the enumerator accepts.
pub const MAX_FLAG_SIZE: usize = 9;

/// All `size`-vertex σ-flags up to isomorphism, sorted by canonical form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlagBasis {
    ty: TypeGraph,
    size: usize,
    forms: Vec<CanonicalForm>,
    flags: Vec<Flag>,
    index: HashMap<CanonicalForm, usize>,
}

impl FlagBasis {
    fn from_forms(ty: TypeGraph, size: usize, forms: Vec<CanonicalForm>) -> Self {
        let flags: Vec<Flag> = forms
            .iter()
            .map(|f| Flag::from_parts_unchecked(f.graph(), (0..ty.order()).collect(), ty))
            .collect();
        let index = forms.iter().enumerate().map(|(i, f)| (*f, i)).collect();
        FlagBasis {
            ty,
            size,
            forms,
            flags,
            index,
        }
    }

    pub fn flag_type(&self) -> &TypeGraph {
        &self.ty
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn len(&self) -> usize {
        self.flags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flags.is_empty()
    }

    /// Basis flags; roots are always the leading vertices.
    pub fn flags(&self) -> &[Flag] {
        &self.flags
    }

    pub fn forms(&self) -> &[CanonicalForm] {
        &self.forms
    }

    pub fn get(&self, i: usize) -> &Flag {
        &self.flags[i]
    }

    pub fn index_of_form(&self, form: &CanonicalForm) -> Option<usize> {
        self.index.get(form).copied()
    }

    /// Position of the basis flag isomorphic to `flag`, if any.
    pub fn index_of(&self, flag: &Flag) -> Option<usize> {
        if flag.flag_type() != &self.ty || flag.order() != self.size {
            return None;
        }
        self.index_of_form(&crate::canon::canonical_form(flag))
    }

    /// Position of the flag given by `g` with roots on its first `s` vertices.
    pub(crate) fn index_of_prefix(&self, g: &Graph) -> Option<usize> {
        self.index_of_form(&canonical_form_prefix(g, self.ty.order()))
    }
}

/// One representative per isomorphism class of graphs on `s` vertices, in
/// canonical order. Representatives carry their canonical labelling.
pub fn enumerate_types(s: usize) -> Result<Vec<TypeGraph>, AlgebraError> {
    let basis = enumerate_flags(&TypeGraph::empty_type(), s)?;
    Ok(basis.flags().iter().map(|f| TypeGraph::new(*f.graph())).collect())
}

/// The basis of all `size`-vertex `ty`-flags.
pub fn enumerate_flags(ty: &TypeGraph, size: usize) -> Result<FlagBasis, AlgebraError> {
    let s = ty.order();
    if size < s {
        return Err(AlgebraError::SizeTooSmall { size, type_order: s });
    }
    if size > MAX_FLAG_SIZE {
        return Err(AlgebraError::SizeTooLarge {
            size,
            max: MAX_FLAG_SIZE,
        });
    }
    let mut level: Vec<CanonicalForm> = vec![canonical_form_prefix(ty.graph(), s)];
    for n in s..size {
        let next: BTreeSet<CanonicalForm> = level
            .par_iter()
            .flat_map_iter(|form| {
                let g = form.graph();
                (0u32..1 << n).map(move |mask| canonical_form_prefix(&g.extended(mask), s))
            })
            .collect::<Vec<_>>()
            .into_iter()
            .collect();
        level = next.into_iter().collect();
    }
    Ok(FlagBasis::from_forms(*ty, size, level))
}
