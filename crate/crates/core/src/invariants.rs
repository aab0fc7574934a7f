//! Invariant dimensions of tensor powers: finite orthogonal subgroups via
//! character averaging (with an explicit averaging-projector basis as a
//! cross-check), the full orthogonal group via pair-partition diagram Gram
//! ranks, and stabilizer groups of spin models.

use std::fmt;

use num::bigint::BigInt;
use num::traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::linalg;
use crate::model::Colorings;
use crate::scalar::{GaussRational, Rational};
use crate::tensor::{OrthogonalMap, Tensor};

/// A finite subgroup of O_n, stored as an explicit element list. Closure
/// under products and inverses and the presence of the identity are verified
/// on construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteOrthogonalGroup {
    n: usize,
    elements: Vec<OrthogonalMap>,
}

impl FiniteOrthogonalGroup {
    pub fn new(elements: Vec<OrthogonalMap>) -> Result<Self> {
        let Some(first) = elements.first() else {
            return Err(Error::pre("a group needs at least the identity"));
        };
        let n = first.n();
        if elements.iter().any(|g| g.n() != n) {
            return Err(Error::pre("group elements have mixed dimensions"));
        }
        let mut sorted = elements.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != elements.len() {
            return Err(Error::pre("duplicate group elements"));
        }
        let identity = OrthogonalMap::identity(n);
        if !elements.contains(&identity) {
            return Err(Error::pre("the identity is missing"));
        }
        for g in &elements {
            if !elements.contains(&g.inverse()) {
                return Err(Error::pre("an inverse is missing; not a group"));
            }
            for h in &elements {
                if !elements.contains(&g.compose(h)) {
                    return Err(Error::pre("set is not closed under products"));
                }
            }
        }
        Ok(FiniteOrthogonalGroup { n, elements })
    }

    pub fn trivial(n: usize) -> Self {
        FiniteOrthogonalGroup {
            n,
            elements: vec![OrthogonalMap::identity(n)],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[OrthogonalMap] {
        &self.elements
    }

    /// `dim (V^{tensor k})^H` by character averaging:
    /// `(1/|H|) * sum_g trace(g)^k`, which must come out a nonnegative
    /// integer.
    pub fn invariant_dim(&self, k: usize) -> Result<usize> {
        let mut acc = GaussRational::zero();
        for g in &self.elements {
            acc += &g.trace().pow(k as i64).expect("nonnegative power");
        }
        let avg = acc.try_div(&GaussRational::from_int(self.order() as i64))?;
        gauss_to_usize(&avg).ok_or_else(|| {
            Error::internal(format!(
                "character average {avg} is not a nonnegative integer; input is not a group"
            ))
        })
    }

    /// Basis of the fixed subspace of V^{tensor k}: the image of the
    /// averaging projector `(1/|H|) sum_g g^{tensor k}`. Exponential in `k`;
    /// intended as a cross-check for small cases.
    pub fn fixed_subspace(&self, k: usize) -> Result<Vec<Tensor>> {
        let n = self.n;
        let scale = GaussRational::from_int(self.order() as i64).recip()?;
        let mut rows: Vec<Vec<GaussRational>> = Vec::new();
        let columns: Vec<Vec<u8>> = Colorings::new(k, n).collect();
        for phi in &columns {
            let mut image = Tensor::zero(n, k);
            for g in &self.elements {
                let t = g.apply(&Tensor::basis(n, phi)?)?;
                image = image.add(&t)?;
            }
            let image = image.scale(&scale);
            rows.push(columns.iter().map(|c| image.get(c)).collect());
        }
        let pivots = linalg::rref(&mut rows);
        let mut basis = Vec::new();
        for row in rows.into_iter().take(pivots.len()) {
            let mut t = Tensor::zero(n, k);
            for (c, v) in columns.iter().zip(row) {
                t.add_entry(c.clone(), v);
            }
            basis.push(t);
        }
        Ok(basis)
    }

    /// Group file: `group n=<n>` followed by `matrix` blocks of n rows of n
    /// scalars. The loader verifies orthogonality and the group axioms.
    pub fn parse(text: &str) -> Result<Self> {
        let mut n: Option<usize> = None;
        let mut matrices: Vec<Vec<Vec<GaussRational>>> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if n.is_none() {
                let dim = content
                    .strip_prefix("group")
                    .map(str::trim)
                    .and_then(|t| t.strip_prefix("n="))
                    .and_then(|v| v.parse::<usize>().ok())
                    .ok_or_else(|| Error::parse(line, "expected `group n=<n>`"))?;
                n = Some(dim);
                continue;
            }
            let dim = n.unwrap();
            if content == "matrix" {
                matrices.push(Vec::new());
                continue;
            }
            let Some(current) = matrices.last_mut() else {
                return Err(Error::parse(line, "expected `matrix`"));
            };
            let row: Vec<GaussRational> = content
                .split_whitespace()
                .map(|t| t.parse::<GaussRational>())
                .collect::<Result<_>>()
                .map_err(|e| Error::parse(line, e.to_string()))?;
            if row.len() != dim {
                return Err(Error::parse(
                    line,
                    format!("expected {dim} entries per row"),
                ));
            }
            if current.len() == dim {
                return Err(Error::parse(line, "matrix has too many rows"));
            }
            current.push(row);
        }
        let Some(dim) = n else {
            return Err(Error::parse(1, "missing `group` header"));
        };
        let mut elements = Vec::new();
        for m in matrices {
            if m.len() != dim {
                return Err(Error::pre(format!(
                    "matrix has {} rows, expected {dim}",
                    m.len()
                )));
            }
            elements.push(OrthogonalMap::new(m)?);
        }
        FiniteOrthogonalGroup::new(elements)
    }
}

impl fmt::Display for FiniteOrthogonalGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "group n={}", self.n)?;
        for g in &self.elements {
            writeln!(f, "matrix")?;
            for row in g.rows() {
                let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                writeln!(f, "{}", cells.join(" "))?;
            }
        }
        Ok(())
    }
}

fn gauss_to_usize(v: &GaussRational) -> Option<usize> {
    if !v.im.is_zero() || !v.re.is_integer() || v.re.is_negative() {
        return None;
    }
    v.re.numerator().to_usize()
}

/// A perfect matching of `[k]` (k even): the diagram basis of the orthogonal
/// invariants of V^{tensor k}. Slots are stored 0-based.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct BrauerDiagram {
    pairs: Vec<(usize, usize)>,
}

impl BrauerDiagram {
    /// All perfect matchings of `[k]`; empty for odd `k`.
    pub fn all(k: usize) -> Vec<BrauerDiagram> {
        if !k.is_multiple_of(2) {
            return Vec::new();
        }
        let mut out = Vec::new();
        let mut used = vec![false; k];
        let mut pairs = Vec::new();
        fn recurse(
            k: usize,
            used: &mut Vec<bool>,
            pairs: &mut Vec<(usize, usize)>,
            out: &mut Vec<BrauerDiagram>,
        ) {
            let Some(first) = (0..k).find(|&i| !used[i]) else {
                out.push(BrauerDiagram {
                    pairs: pairs.clone(),
                });
                return;
            };
            used[first] = true;
            for second in first + 1..k {
                if used[second] {
                    continue;
                }
                used[second] = true;
                pairs.push((first, second));
                recurse(k, used, pairs, out);
                pairs.pop();
                used[second] = false;
            }
            used[first] = false;
        }
        recurse(k, &mut used, &mut pairs, &mut out);
        out
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn order(&self) -> usize {
        self.pairs.len() * 2
    }

    /// The diagram tensor: entry 1 at every coloring constant on each pair.
    pub fn tensor(&self, n: usize) -> Tensor {
        let k = self.order();
        let mut t = Tensor::zero(n, k);
        for pair_colors in Colorings::new(self.pairs.len(), n) {
            let mut idx = vec![0u8; k];
            for (p, &(a, b)) in self.pairs.iter().enumerate() {
                idx[a] = pair_colors[p];
                idx[b] = pair_colors[p];
            }
            t.add_entry(idx, GaussRational::one());
        }
        t
    }

    /// Number of cycles of the union multigraph of two matchings on `[k]`;
    /// each vertex has degree two, so components are cycles.
    pub fn cycles_with(&self, other: &BrauerDiagram) -> usize {
        let k = self.order();
        debug_assert_eq!(k, other.order());
        let mut partner_a = vec![0usize; k];
        let mut partner_b = vec![0usize; k];
        for &(x, y) in &self.pairs {
            partner_a[x] = y;
            partner_a[y] = x;
        }
        for &(x, y) in &other.pairs {
            partner_b[x] = y;
            partner_b[y] = x;
        }
        let mut seen = vec![false; k];
        let mut cycles = 0;
        for start in 0..k {
            if seen[start] {
                continue;
            }
            cycles += 1;
            let mut at = start;
            let mut use_a = true;
            while !seen[at] {
                seen[at] = true;
                at = if use_a { partner_a[at] } else { partner_b[at] };
                use_a = !use_a;
            }
        }
        cycles
    }
}

/// Gram matrix of all diagram tensors, with entries `n^{cycles}` computed
/// combinatorially (validated against the bilinear form in tests).
pub fn brauer_gram(n: usize, k: usize) -> Vec<Vec<GaussRational>> {
    let diagrams = BrauerDiagram::all(k);
    let m = diagrams.len();
    let mut gram = vec![vec![GaussRational::zero(); m]; m];
    for a in 0..m {
        for b in a..m {
            let cycles = diagrams[a].cycles_with(&diagrams[b]);
            let v = GaussRational::from_rational(Rational::from_bigint(num::pow::pow(
                BigInt::from(n),
                cycles,
            )));
            gram[a][b] = v.clone();
            gram[b][a] = v;
        }
    }
    gram
}

/// `dim (V^{tensor k})^{O_n}`: zero for odd `k`, otherwise the rank of the
/// diagram Gram matrix.
pub fn brauer_invariant_dim(n: usize, k: usize) -> usize {
    if !k.is_multiple_of(2) {
        return 0;
    }
    linalg::rank(&brauer_gram(n, k))
}

/// The finite group of orthogonal maps permuting the spin points while
/// preserving weights: every permutation `s` with `a_{s(i)} = a_i` and the
/// same Gram matrix determines a unique linear map on the span; when the
/// points span V and the map is well defined it is automatically orthogonal.
pub fn spin_stabilizer(
    points: &[Vec<GaussRational>],
    weights: &[GaussRational],
) -> Result<FiniteOrthogonalGroup> {
    let m = points.len();
    if weights.len() != m {
        return Err(Error::pre("point and weight counts differ"));
    }
    if m == 0 {
        return Err(Error::pre(
            "no points: cannot span a positive-dimensional space",
        ));
    }
    let n = points[0].len();
    if points.iter().any(|u| u.len() != n) {
        return Err(Error::pre("points have mixed dimensions"));
    }
    let span = linalg::rank(points);
    if span != n {
        return Err(Error::pre(format!(
            "points span a subspace of dimension {span} < {n}"
        )));
    }
    // Gram matrix of the points under the bilinear form.
    let gram: Vec<Vec<GaussRational>> = points
        .iter()
        .map(|u| points.iter().map(|v| linalg::dot(u, v)).collect())
        .collect();

    // Independent subset forming a basis of V.
    let mut basis_idx: Vec<usize> = Vec::new();
    {
        let mut chosen: Vec<Vec<GaussRational>> = Vec::new();
        for (i, u) in points.iter().enumerate() {
            chosen.push(u.clone());
            if linalg::rank(&chosen) == chosen.len() {
                basis_idx.push(i);
            } else {
                chosen.pop();
            }
            if basis_idx.len() == n {
                break;
            }
        }
    }
    let base_cols: Vec<Vec<GaussRational>> = (0..n)
        .map(|r| basis_idx.iter().map(|&i| points[i][r].clone()).collect())
        .collect();
    let base_inv = linalg::invert(&base_cols)
        .ok_or_else(|| Error::internal("independent subset is not invertible"))?;

    // Backtracking over weight- and Gram-preserving permutations.
    let mut sigma = vec![usize::MAX; m];
    let mut used = vec![false; m];
    let mut found: Vec<Vec<usize>> = Vec::new();
    fn recurse(
        pos: usize,
        m: usize,
        sigma: &mut Vec<usize>,
        used: &mut Vec<bool>,
        weights: &[GaussRational],
        gram: &[Vec<GaussRational>],
        found: &mut Vec<Vec<usize>>,
    ) {
        if pos == m {
            found.push(sigma.clone());
            return;
        }
        for cand in 0..m {
            if used[cand] || weights[cand] != weights[pos] || gram[cand][cand] != gram[pos][pos] {
                continue;
            }
            if (0..pos).any(|prev| gram[sigma[prev]][cand] != gram[prev][pos]) {
                continue;
            }
            used[cand] = true;
            sigma[pos] = cand;
            recurse(pos + 1, m, sigma, used, weights, gram, found);
            used[cand] = false;
        }
        sigma[pos] = usize::MAX;
    }
    recurse(0, m, &mut sigma, &mut used, weights, &gram, &mut found);

    let mut elements = Vec::new();
    'outer: for sigma in found {
        // g maps the basis points to their images: g = [u_{s(b)}] * [u_b]^{-1}.
        let image_cols: Vec<Vec<GaussRational>> = (0..n)
            .map(|r| {
                basis_idx
                    .iter()
                    .map(|&i| points[sigma[i]][r].clone())
                    .collect()
            })
            .collect();
        let g = linalg::mat_mul(&image_cols, &base_inv);
        for (i, u) in points.iter().enumerate() {
            if linalg::mat_vec(&g, u) != points[sigma[i]] {
                continue 'outer; // permutation not realized by a linear map
            }
        }
        let g = OrthogonalMap::new(g).map_err(|e| {
            Error::internal(format!(
                "form-preserving map on a spanning set must be orthogonal: {e}"
            ))
        })?;
        elements.push(g);
    }
    FiniteOrthogonalGroup::new(elements)
}
