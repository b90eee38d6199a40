//! Reduced echelon form over sparse polynomials, pivoting on the minimal
//! exponent, with a provenance record for every row.

use std::collections::{BTreeMap, HashMap};

use crate::gf::{FieldElement, FieldSpec};
use crate::poly::{Exp, SparsePoly};

/// Where a provenance node draws from: an inserted input or another node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Origin {
    Input(usize),
    Node(usize),
}

#[derive(Clone, Debug)]
struct Row {
    poly: SparsePoly,
    node: usize,
}

/// A row as it was at one moment. Later back-reduction does not change
/// what a handle denotes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RowRef(usize);

/// Outcome of [`EchelonBasis::insert`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Insertion {
    /// The input reduced against the previous rows.
    pub residual: SparsePoly,
    /// Pivot of the new row, if one was added.
    pub pivot: Option<Exp>,
}

/// A set of rows with distinct minimal exponents (pivots), each normalized
/// to leading coefficient one and absent from every other row. Rows whose
/// pivot would exceed the cutoff, if there is one, are not stored.
#[derive(Clone, Debug)]
pub struct EchelonBasis {
    field: FieldSpec,
    cutoff: Option<Exp>,
    rows: Vec<Row>,
    pivots: BTreeMap<Exp, usize>,
    /// Non-pivot exponent to rows that may contain it. Entries go stale
    /// when a row is reduced; readers re-check the coefficient.
    occurs: HashMap<Exp, Vec<usize>>,
    nodes: Vec<Vec<(Origin, FieldElement)>>,
    inputs: usize,
}

impl EchelonBasis {
    pub fn new(field: &FieldSpec, cutoff: impl Into<Exp>) -> EchelonBasis {
        EchelonBasis {
            field: field.clone(),
            cutoff: Some(cutoff.into()),
            rows: Vec::new(),
            pivots: BTreeMap::new(),
            occurs: HashMap::new(),
            nodes: Vec::new(),
            inputs: 0,
        }
    }

    /// A basis that keeps every row.
    pub fn unbounded(field: &FieldSpec) -> EchelonBasis {
        EchelonBasis { cutoff: None, ..EchelonBasis::new(field, 0u32) }
    }

    pub fn cutoff(&self) -> Option<&Exp> {
        self.cutoff.as_ref()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Number of inputs seen so far; input `k` is the `k`-th call to insert.
    pub fn inputs(&self) -> usize {
        self.inputs
    }

    /// Rows in increasing pivot order.
    pub fn rows(&self) -> impl Iterator<Item = &SparsePoly> + '_ {
        self.pivots.values().map(|&i| &self.rows[i].poly)
    }

    pub fn pivots(&self) -> impl Iterator<Item = &Exp> + '_ {
        self.pivots.keys()
    }

    pub fn row_with_pivot(&self, e: &Exp) -> Option<&SparsePoly> {
        self.pivots.get(e).map(|&i| &self.rows[i].poly)
    }

    /// The current row with pivot `e` and a handle to its present value.
    pub fn pivot_row(&self, e: &Exp) -> Option<(&SparsePoly, RowRef)> {
        self.pivots.get(e).map(|&i| (&self.rows[i].poly, RowRef(self.rows[i].node)))
    }

    fn new_node(&mut self, parts: Vec<(Origin, FieldElement)>) -> usize {
        self.nodes.push(parts);
        self.nodes.len() - 1
    }

    /// Reduces `f` against all rows (every pivot exponent is cleared).
    /// Returns the reduced polynomial and the combination used, as
    /// `(row node, scalar)` pairs with `f - sum scalar * row = reduced`.
    fn reduce_full(&self, f: &SparsePoly) -> (SparsePoly, Vec<(usize, FieldElement)>) {
        let mut cur = f.clone();
        let mut used = Vec::new();
        // Rows are reduced, so subtracting one never reintroduces a pivot.
        let hits: Vec<Exp> =
            cur.terms().filter(|(e, _)| self.pivots.contains_key(*e)).map(|(e, _)| e.clone()).collect();
        for e in hits {
            let c = cur.coeff(&e);
            if c.is_zero() {
                continue;
            }
            let row = &self.rows[self.pivots[&e]];
            cur.add_scaled(&self.field, self.field.neg(c), &row.poly);
            used.push((row.node, c));
        }
        (cur, used)
    }

    /// Inserts `f` as input number [`Self::inputs`] and restores the
    /// reduced form.
    pub fn insert(&mut self, f: &SparsePoly) -> Insertion {
        let input = self.inputs;
        self.inputs += 1;
        let (reduced, used) = self.reduce_full(f);
        let Some((pivot, lead)) = reduced.min_term().map(|(e, c)| (e.clone(), c)) else {
            return Insertion { residual: reduced, pivot: None };
        };
        if self.cutoff.as_ref().is_some_and(|c| &pivot > c) {
            return Insertion { residual: reduced, pivot: None };
        }
        let f = &self.field;
        let s = f.inv(lead).expect("nonzero lead");
        let row_poly = reduced.scale(f, s);
        let mut parts = vec![(Origin::Input(input), s)];
        for (node, c) in used {
            parts.push((Origin::Node(node), f.neg(f.mul(c, s))));
        }
        let node = self.new_node(parts);

        // Clear the new pivot from existing rows.
        if let Some(holders) = self.occurs.remove(&pivot) {
            for idx in holders {
                let c = self.rows[idx].poly.coeff(&pivot);
                if c.is_zero() {
                    continue;
                }
                let old = self.rows[idx].node;
                let neg = self.field.neg(c);
                let field = self.field.clone();
                self.rows[idx].poly.add_scaled(&field, neg, &row_poly);
                let updated = self.new_node(vec![(Origin::Node(old), field.one()), (Origin::Node(node), neg)]);
                self.rows[idx].node = updated;
                for (e, _) in row_poly.terms().skip(1) {
                    self.occurs.entry(e.clone()).or_default().push(idx);
                }
            }
        }
        let idx = self.rows.len();
        for (e, _) in row_poly.terms().skip(1) {
            self.occurs.entry(e.clone()).or_default().push(idx);
        }
        self.rows.push(Row { poly: row_poly, node });
        self.pivots.insert(pivot.clone(), idx);
        Insertion { residual: reduced, pivot: Some(pivot) }
    }

    /// Expresses a combination of row handles in terms of the inputs.
    /// Returns `(input index, scalar)` with nonzero scalars, sorted by input.
    pub fn expand(&self, combo: &[(RowRef, FieldElement)]) -> Vec<(usize, FieldElement)> {
        let f = &self.field;
        let mut weight: BTreeMap<usize, FieldElement> = BTreeMap::new();
        for (RowRef(node), c) in combo {
            let w = weight.entry(*node).or_insert(f.zero());
            *w = f.add(*w, *c);
        }
        self.flatten(weight)
    }

    fn flatten(&self, mut weight: BTreeMap<usize, FieldElement>) -> Vec<(usize, FieldElement)> {
        let f = &self.field;
        let mut out: BTreeMap<usize, FieldElement> = BTreeMap::new();
        // Nodes only reference older nodes, so descending order is topological.
        while let Some((node, w)) = weight.pop_last() {
            if w.is_zero() {
                continue;
            }
            for &(origin, s) in &self.nodes[node] {
                let add = f.mul(w, s);
                let slot = match origin {
                    Origin::Input(i) => out.entry(i).or_insert(f.zero()),
                    Origin::Node(n) => weight.entry(n).or_insert(f.zero()),
                };
                *slot = f.add(*slot, add);
            }
        }
        out.into_iter().filter(|(_, c)| !c.is_zero()).collect()
    }

    /// Reduces `g` against the rows by minimal exponent only, stopping at
    /// the first minimal exponent without a pivot. Returns the residual and
    /// the rows used.
    pub fn reduce_leading(&self, g: &SparsePoly) -> (SparsePoly, Vec<(RowRef, FieldElement)>) {
        let mut r = g.clone();
        let mut used = Vec::new();
        while let Some((e, c)) = r.min_term().map(|(e, c)| (e.clone(), c)) {
            let Some((row, handle)) = self.pivot_row(&e) else { break };
            r.add_scaled(&self.field, self.field.neg(c), row);
            used.push((handle, c));
        }
        (r, used)
    }
}
