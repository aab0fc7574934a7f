//! Sparse tensors in V^(⊗k) over Q(i), the induced symmetric bilinear form,
//! slot contractions, orthogonal-map actions, and exact rank computations.
//!
//! The form is bilinear, not Hermitian: there is no conjugation, so isotropic
//! vectors such as e1 + i*e2 pair to zero with themselves. Several rank
//! identities in this crate depend on that.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::GaussRational;

/// Color tuples index the product basis: `idx[t]` is the 0-based color of
/// slot `t`.
pub type ColorTuple = Vec<u8>;

/// A sparse order-`k` tensor over the `n`-dimensional space V. Stored entries
/// are nonzero; order-0 tensors are scalars.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tensor {
    n: usize,
    order: usize,
    entries: BTreeMap<ColorTuple, GaussRational>,
}

impl Tensor {
    pub fn zero(n: usize, order: usize) -> Self {
        Tensor {
            n,
            order,
            entries: BTreeMap::new(),
        }
    }

    pub fn scalar(n: usize, value: GaussRational) -> Self {
        let mut t = Tensor::zero(n, 0);
        t.add_entry(Vec::new(), value);
        t
    }

    /// The basis tensor `e_idx` (0-based colors).
    pub fn basis(n: usize, idx: &[u8]) -> Result<Self> {
        let mut t = Tensor::zero(n, idx.len());
        t.check_tuple(idx)?;
        t.add_entry(idx.to_vec(), GaussRational::one());
        Ok(t)
    }

    /// The invariant pairing tensor `sum_c e_c ⊗ e_c`.
    pub fn pairing(n: usize) -> Self {
        let mut t = Tensor::zero(n, 2);
        for c in 0..n as u8 {
            t.add_entry(vec![c, c], GaussRational::one());
        }
        t
    }

    pub fn from_entries<I>(n: usize, order: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (ColorTuple, GaussRational)>,
    {
        let mut t = Tensor::zero(n, order);
        for (idx, v) in entries {
            if idx.len() != order {
                return Err(Error::pre(format!(
                    "entry index of length {} in an order-{order} tensor",
                    idx.len()
                )));
            }
            t.check_tuple(&idx)?;
            t.add_entry(idx, v);
        }
        Ok(t)
    }

    fn check_tuple(&self, idx: &[u8]) -> Result<()> {
        if idx.iter().any(|&c| c as usize >= self.n) {
            return Err(Error::pre(format!(
                "color out of range in {idx:?} (n = {})",
                self.n
            )));
        }
        Ok(())
    }

    /// Accumulates into one slot, removing the entry when it cancels to zero.
    pub fn add_entry(&mut self, idx: ColorTuple, value: GaussRational) {
        debug_assert_eq!(idx.len(), self.order);
        if value.is_zero() {
            return;
        }
        match self.entries.entry(idx) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(value);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &value;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn entries(&self) -> &BTreeMap<ColorTuple, GaussRational> {
        &self.entries
    }

    pub fn get(&self, idx: &[u8]) -> GaussRational {
        self.entries
            .get(idx)
            .cloned()
            .unwrap_or_else(GaussRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// The value of an order-0 tensor.
    pub fn scalar_value(&self) -> Result<GaussRational> {
        if self.order != 0 {
            return Err(Error::pre(format!(
                "order-{} tensor is not a scalar",
                self.order
            )));
        }
        Ok(self.get(&[]))
    }

    pub fn add(&self, other: &Tensor) -> Result<Tensor> {
        self.check_shape(other)?;
        let mut out = self.clone();
        for (idx, v) in &other.entries {
            out.add_entry(idx.clone(), v.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &GaussRational) -> Tensor {
        if c.is_zero() {
            return Tensor::zero(self.n, self.order);
        }
        let entries = self
            .entries
            .iter()
            .map(|(idx, v)| (idx.clone(), v * c))
            .collect();
        Tensor {
            n: self.n,
            order: self.order,
            entries,
        }
    }

    fn check_shape(&self, other: &Tensor) -> Result<()> {
        if self.n != other.n || self.order != other.order {
            return Err(Error::pre(format!(
                "shape mismatch: (n={}, k={}) vs (n={}, k={})",
                self.n, self.order, other.n, other.order
            )));
        }
        Ok(())
    }

    /// Pairs slots `i < j` (1-based) via the bilinear form: keeps terms with
    /// equal colors in the two slots and deletes the slots.
    pub fn contract(&self, i: usize, j: usize) -> Result<Tensor> {
        if !(1 <= i && i < j && j <= self.order) {
            return Err(Error::pre(format!(
                "contraction slots must satisfy 1 <= i < j <= {}, got ({i},{j})",
                self.order
            )));
        }
        let mut out = Tensor::zero(self.n, self.order - 2);
        for (idx, v) in &self.entries {
            if idx[i - 1] != idx[j - 1] {
                continue;
            }
            let reduced: ColorTuple = idx
                .iter()
                .enumerate()
                .filter(|&(t, _)| t != i - 1 && t != j - 1)
                .map(|(_, &c)| c)
                .collect();
            out.add_entry(reduced, v.clone());
        }
        Ok(out)
    }

    /// The induced symmetric bilinear form: `sum_phi T1(phi) * T2(phi)`,
    /// with no conjugation.
    pub fn bilinear_form(&self, other: &Tensor) -> Result<GaussRational> {
        self.check_shape(other)?;
        let (small, large) = if self.entries.len() <= other.entries.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut acc = GaussRational::zero();
        for (idx, v) in &small.entries {
            if let Some(w) = large.entries.get(idx) {
                acc += &(v * w);
            }
        }
        Ok(acc)
    }

    pub fn tensor_product(&self, other: &Tensor) -> Result<Tensor> {
        if self.n != other.n {
            return Err(Error::pre("tensor product requires equal dimension n"));
        }
        let mut out = Tensor::zero(self.n, self.order + other.order);
        for (a, va) in &self.entries {
            for (b, vb) in &other.entries {
                let mut idx = a.clone();
                idx.extend_from_slice(b);
                out.add_entry(idx, va * vb);
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Tensor {
    /// One line per entry, `c1 c2 ... ck : scalar` with 1-based colors,
    /// sorted lexicographically.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (idx, v) in &self.entries {
            let colors: Vec<String> = idx.iter().map(|c| (c + 1).to_string()).collect();
            if colors.is_empty() {
                writeln!(f, ": {v}")?;
            } else {
                writeln!(f, "{} : {v}", colors.join(" "))?;
            }
        }
        Ok(())
    }
}

/// An element of the orthogonal group O_n over Q(i): a matrix with
/// `g^T g = I` exactly (bilinear form, no conjugation).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrthogonalMap {
    n: usize,
    rows: Vec<Vec<GaussRational>>,
}

impl OrthogonalMap {
    pub fn new(rows: Vec<Vec<GaussRational>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::pre("orthogonal map must be a square matrix"));
        }
        let gt = linalg::transpose(&rows);
        if linalg::mat_mul(&gt, &rows) != linalg::identity(n) {
            return Err(Error::pre("matrix is not orthogonal: g^T g != I"));
        }
        Ok(OrthogonalMap { n, rows })
    }

    pub fn identity(n: usize) -> Self {
        OrthogonalMap {
            n,
            rows: linalg::identity(n),
        }
    }

    /// Signed permutation: `e_c -> sign[c] * e_{perm[c]}`.
    pub fn signed_permutation(perm: &[usize], negate: &[bool]) -> Result<Self> {
        let n = perm.len();
        if negate.len() != n {
            return Err(Error::pre("permutation and sign vectors differ in length"));
        }
        let mut rows = linalg::identity(n)
            .into_iter()
            .map(|_| vec![GaussRational::zero(); n])
            .collect::<Vec<_>>();
        let mut seen = vec![false; n];
        for (c, &p) in perm.iter().enumerate() {
            if p >= n || seen[p] {
                return Err(Error::pre("not a permutation"));
            }
            seen[p] = true;
            rows[p][c] = if negate[c] {
                -GaussRational::one()
            } else {
                GaussRational::one()
            };
        }
        Ok(OrthogonalMap { n, rows })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Vec<GaussRational>] {
        &self.rows
    }

    pub fn entry(&self, i: usize, j: usize) -> &GaussRational {
        &self.rows[i][j]
    }

    pub fn compose(&self, other: &OrthogonalMap) -> OrthogonalMap {
        OrthogonalMap {
            n: self.n,
            rows: linalg::mat_mul(&self.rows, &other.rows),
        }
    }

    /// The inverse is the transpose.
    pub fn inverse(&self) -> OrthogonalMap {
        OrthogonalMap {
            n: self.n,
            rows: linalg::transpose(&self.rows),
        }
    }

    pub fn trace(&self) -> GaussRational {
        let mut acc = GaussRational::zero();
        for i in 0..self.n {
            acc += &self.rows[i][i];
        }
        acc
    }

    pub fn apply_vector(&self, v: &[GaussRational]) -> Vec<GaussRational> {
        linalg::mat_vec(&self.rows, v)
    }

    /// Applies `g ⊗ ... ⊗ g` slot-wise.
    pub fn apply(&self, t: &Tensor) -> Result<Tensor> {
        if t.n() != self.n {
            return Err(Error::pre("dimension mismatch between map and tensor"));
        }
        let mut out = Tensor::zero(t.n(), t.order());
        for (idx, v) in t.entries() {
            // Expand the product over slots: g e_{idx[t]} = sum_i g[i][idx[t]] e_i.
            let mut partial: Vec<(ColorTuple, GaussRational)> = vec![(Vec::new(), v.clone())];
            for &c in idx {
                let mut next = Vec::new();
                for (prefix, coeff) in &partial {
                    for row in 0..self.n {
                        let g = &self.rows[row][c as usize];
                        if g.is_zero() {
                            continue;
                        }
                        let mut p = prefix.clone();
                        p.push(row as u8);
                        next.push((p, coeff * g));
                    }
                }
                partial = next;
            }
            for (tuple, coeff) in partial {
                out.add_entry(tuple, coeff);
            }
        }
        Ok(out)
    }
}

fn check_uniform(ts: &[Tensor]) -> Result<()> {
    if let Some(first) = ts.first() {
        for t in ts {
            first.check_shape(t)?;
        }
    }
    Ok(())
}

/// Dimension of the linear span, by exact elimination on the entry matrix.
pub fn span_rank(ts: &[Tensor]) -> Result<usize> {
    check_uniform(ts)?;
    let mut columns: Vec<ColorTuple> = Vec::new();
    {
        let mut seen = std::collections::BTreeSet::new();
        for t in ts {
            for idx in t.entries().keys() {
                if seen.insert(idx.clone()) {
                    columns.push(idx.clone());
                }
            }
        }
        columns.sort();
    }
    let rows: Vec<Vec<GaussRational>> = ts
        .iter()
        .map(|t| columns.iter().map(|c| t.get(c)).collect())
        .collect();
    Ok(linalg::rank(&rows))
}

/// Gram matrix of the list under the bilinear form.
pub fn gram_matrix(ts: &[Tensor]) -> Result<Vec<Vec<GaussRational>>> {
    check_uniform(ts)?;
    let m = ts.len();
    let mut gram = vec![vec![GaussRational::zero(); m]; m];
    for a in 0..m {
        for b in a..m {
            let v = ts[a].bilinear_form(&ts[b])?;
            gram[a][b] = v.clone();
            gram[b][a] = v;
        }
    }
    Ok(gram)
}

/// Rank of the Gram matrix; can be strictly below `span_rank` when the span
/// contains isotropic directions.
pub fn gram_rank(ts: &[Tensor]) -> Result<usize> {
    Ok(linalg::rank(&gram_matrix(ts)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> GaussRational {
        GaussRational::from_int(v)
    }

    #[test]
    fn contract_pairing_gives_dimension() {
        let t = Tensor::pairing(3);
        let c = t.contract(1, 2).unwrap();
        assert_eq!(c.scalar_value().unwrap(), q(3));
    }

    #[test]
    fn contract_off_diagonal_vanishes() {
        let t = Tensor::basis(2, &[0, 1]).unwrap();
        let c = t.contract(1, 2).unwrap();
        assert!(c.is_zero());
    }

    #[test]
    fn contract_keeps_free_slot() {
        let t = Tensor::basis(2, &[0, 1, 0]).unwrap();
        let c = t.contract(1, 3).unwrap();
        assert_eq!(c, Tensor::basis(2, &[1]).unwrap());
    }

    #[test]
    fn contract_bad_slots_error() {
        let t = Tensor::pairing(2);
        assert!(t.contract(2, 2).is_err());
        assert!(t.contract(0, 1).is_err());
        assert!(t.contract(1, 3).is_err());
    }

    #[test]
    fn bilinear_form_on_basis() {
        let a = Tensor::basis(2, &[0, 1]).unwrap();
        let b = Tensor::basis(2, &[0, 1]).unwrap();
        let c = Tensor::basis(2, &[1, 0]).unwrap();
        assert_eq!(a.bilinear_form(&b).unwrap(), q(1));
        assert_eq!(a.bilinear_form(&c).unwrap(), q(0));
    }

    #[test]
    fn isotropic_vector_pairs_to_zero_with_itself() {
        let mut v = Tensor::zero(2, 1);
        v.add_entry(vec![0], q(1));
        v.add_entry(vec![1], GaussRational::i());
        assert!(v.bilinear_form(&v).unwrap().is_zero());
        // And span rank still sees a full line.
        assert_eq!(span_rank(&[v.clone()]).unwrap(), 1);
        assert_eq!(gram_rank(&[v]).unwrap(), 0);
    }

    #[test]
    fn pairing_norm_is_dimension() {
        let t = Tensor::pairing(2);
        assert_eq!(t.bilinear_form(&t).unwrap(), q(2));
    }

    #[test]
    fn tensor_product_cases() {
        let e1 = Tensor::basis(2, &[0]).unwrap();
        let e2 = Tensor::basis(2, &[1]).unwrap();
        let p = e1.tensor_product(&e2).unwrap();
        assert_eq!(p, Tensor::basis(2, &[0, 1]).unwrap());

        let one = Tensor::scalar(2, q(1));
        assert_eq!(p.tensor_product(&one).unwrap(), p);

        let sum = e1.add(&e2).unwrap();
        let diff = e1.add(&e2.scale(&q(-1))).unwrap();
        let prod = sum.tensor_product(&diff).unwrap();
        assert_eq!(prod.get(&[0, 0]), q(1));
        assert_eq!(prod.get(&[0, 1]), q(-1));
        assert_eq!(prod.get(&[1, 0]), q(1));
        assert_eq!(prod.get(&[1, 1]), q(-1));
    }

    #[test]
    fn apply_identity_and_swap() {
        let t = Tensor::basis(2, &[0, 1]).unwrap();
        assert_eq!(OrthogonalMap::identity(2).apply(&t).unwrap(), t);
        let swap = OrthogonalMap::signed_permutation(&[1, 0], &[false, false]).unwrap();
        assert_eq!(swap.apply(&t).unwrap(), Tensor::basis(2, &[1, 0]).unwrap());
    }

    #[test]
    fn orthogonality_is_checked() {
        let bad = vec![vec![q(1), q(1)], vec![q(0), q(1)]];
        assert!(OrthogonalMap::new(bad).is_err());
        // A rational rotation is fine.
        let a = GaussRational::from_parts(3, 5, 0, 1).unwrap();
        let b = GaussRational::from_parts(4, 5, 0, 1).unwrap();
        let rot = OrthogonalMap::new(vec![vec![a.clone(), b.clone()], vec![-&b, a]]).unwrap();
        assert_eq!(rot.compose(&rot.inverse()), OrthogonalMap::identity(2));
    }

    #[test]
    fn span_rank_cases() {
        let e1 = Tensor::basis(2, &[0]).unwrap();
        let e2 = Tensor::basis(2, &[1]).unwrap();
        let sum = e1.add(&e2).unwrap();
        assert_eq!(span_rank(&[e1.clone(), e2.clone(), sum]).unwrap(), 2);
        assert_eq!(span_rank(&[]).unwrap(), 0);

        // i*(e1 + i*e2) = i*e1 - e2: one line.
        let mut v = Tensor::zero(2, 1);
        v.add_entry(vec![0], q(1));
        v.add_entry(vec![1], GaussRational::i());
        let w = v.scale(&GaussRational::i());
        assert_eq!(span_rank(&[v, w]).unwrap(), 1);
    }

    #[test]
    fn gram_rank_cases() {
        let e1 = Tensor::basis(2, &[0]).unwrap();
        let e2 = Tensor::basis(2, &[1]).unwrap();
        assert_eq!(gram_rank(&[e1, e2]).unwrap(), 2);

        // The three pair-partition tensors for k=4, n=2 have the classic
        // Gram matrix [[4,2,2],[2,4,2],[2,2,4]] of rank 3.
        let delta = Tensor::pairing(2);
        let t12_34 = delta.tensor_product(&delta).unwrap();
        let mut t13_24 = Tensor::zero(2, 4);
        let mut t14_23 = Tensor::zero(2, 4);
        for a in 0..2u8 {
            for b in 0..2u8 {
                t13_24.add_entry(vec![a, b, a, b], q(1));
                t14_23.add_entry(vec![a, b, b, a], q(1));
            }
        }
        let ts = [t12_34, t13_24, t14_23];
        let gram = gram_matrix(&ts).unwrap();
        let expect = [[4, 2, 2], [2, 4, 2], [2, 2, 4]];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(gram[i][j], q(expect[i][j]));
            }
        }
        assert_eq!(gram_rank(&ts).unwrap(), 3);
    }

    #[test]
    fn display_is_sorted_and_one_based() {
        let mut t = Tensor::zero(2, 2);
        t.add_entry(vec![1, 0], GaussRational::i());
        t.add_entry(vec![0, 0], q(2));
        assert_eq!(t.to_string(), "1 1 : 2\n2 1 : i\n");
        let s = Tensor::scalar(2, q(5));
        assert_eq!(s.to_string(), ": 5\n");
    }

    #[test]
    fn shape_mismatch_errors() {
        let a = Tensor::basis(2, &[0]).unwrap();
        let b = Tensor::basis(3, &[0]).unwrap();
        assert!(a.bilinear_form(&b).is_err());
        let c = Tensor::basis(2, &[0, 1]).unwrap();
        assert!(a.bilinear_form(&c).is_err());
    }
}
