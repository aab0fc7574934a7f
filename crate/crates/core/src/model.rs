//! Vertex models: finitely supported functionals on monomials in the edge
//! colors, their partition functions on multigraphs, fragment weights, the
//! tensor image of a fragment, and the symbolic partition polynomial.
//!
//! A model either stores its support directly (and vanishes outside it), or
//! carries a spin form `h(p) = sum_i a_i p(u_i)` from which monomial values
//! of any degree are computed exactly; in the spin case the stored support is
//! the truncation to the declared degree bound.

use std::collections::BTreeMap;
use std::fmt;

use num::bigint::BigInt;
use num::traits::Zero;

use crate::error::{Error, Result};
use crate::graph::{Attachment, Fragment, Graph};
use crate::scalar::{GaussRational, Rational};
use crate::tensor::Tensor;

/// Exponent vector of a monomial in the `n` color variables.
pub type Exponent = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpinForm {
    pub points: Vec<Vec<GaussRational>>,
    pub weights: Vec<GaussRational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexModel {
    n: usize,
    support: BTreeMap<Exponent, GaussRational>,
    spin: Option<SpinForm>,
    /// Present when the support is a truncation of a larger functional.
    truncation: Option<usize>,
}

impl VertexModel {
    pub fn new(n: usize, support: BTreeMap<Exponent, GaussRational>) -> Result<Self> {
        if n == 0 {
            return Err(Error::pre("color count must be positive"));
        }
        for alpha in support.keys() {
            if alpha.len() != n {
                return Err(Error::pre(format!(
                    "exponent vector {alpha:?} does not have length {n}"
                )));
            }
        }
        let support = support.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        Ok(VertexModel {
            n,
            support,
            spin: None,
            truncation: None,
        })
    }

    pub fn zero(n: usize) -> Self {
        VertexModel {
            n,
            support: BTreeMap::new(),
            spin: None,
            truncation: None,
        }
    }

    /// Builds a spin model `h(p) = sum_i a_i p(u_i)` with support materialized
    /// up to `degree_bound`. Points must be pairwise distinct and weights
    /// nonzero.
    pub fn from_spin(
        points: Vec<Vec<GaussRational>>,
        weights: Vec<GaussRational>,
        n: usize,
        degree_bound: usize,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::pre("color count must be positive"));
        }
        if points.len() != weights.len() {
            return Err(Error::pre("point and weight counts differ"));
        }
        for u in &points {
            if u.len() != n {
                return Err(Error::pre(format!(
                    "point {u:?} does not have dimension {n}"
                )));
            }
        }
        for (i, a) in weights.iter().enumerate() {
            if a.is_zero() {
                return Err(Error::pre(format!("weight {} is zero", i + 1)));
            }
        }
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                if points[i] == points[j] {
                    return Err(Error::pre(format!(
                        "points {} and {} coincide",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        let spin = SpinForm { points, weights };
        let mut support = BTreeMap::new();
        for alpha in exponents_up_to(n, degree_bound) {
            let v = eval_spin(&spin, &alpha);
            if !v.is_zero() {
                support.insert(alpha, v);
            }
        }
        Ok(VertexModel {
            n,
            support,
            spin: Some(spin),
            truncation: Some(degree_bound),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn support(&self) -> &BTreeMap<Exponent, GaussRational> {
        &self.support
    }

    pub fn spin(&self) -> Option<&SpinForm> {
        self.spin.as_ref()
    }

    pub fn truncation(&self) -> Option<usize> {
        self.truncation
    }

    /// Largest total degree carried by the stored support.
    pub fn support_degree(&self) -> usize {
        self.support
            .keys()
            .map(|a| a.iter().map(|&e| e as usize).sum())
            .max()
            .unwrap_or(0)
    }

    /// Restriction to monomials of degree at most `e`. The result is marked
    /// as truncated and loses any spin form.
    pub fn truncate(&self, e: usize) -> VertexModel {
        let support = self
            .support
            .iter()
            .filter(|(a, _)| a.iter().map(|&x| x as usize).sum::<usize>() <= e)
            .map(|(a, v)| (a.clone(), v.clone()))
            .collect();
        VertexModel {
            n: self.n,
            support,
            spin: None,
            truncation: Some(e),
        }
    }

    /// Value of the model on the monomial with exponent vector `alpha`.
    pub fn eval(&self, alpha: &[u32]) -> GaussRational {
        assert_eq!(alpha.len(), self.n, "exponent vector has wrong length");
        if let Some(spin) = &self.spin {
            eval_spin(spin, alpha)
        } else {
            self.support
                .get(alpha)
                .cloned()
                .unwrap_or_else(GaussRational::zero)
        }
    }

    /// The partition function: `n^circles * sum over edge colorings of the
    /// product of vertex weights`, a loop contributing degree 2 at its vertex.
    pub fn partition_function(&self, g: &Graph) -> GaussRational {
        let n = self.n;
        let mut total = GaussRational::zero();
        for coloring in Colorings::new(g.edge_count(), n) {
            let mut exps = vec![vec![0u32; n]; g.num_vertices()];
            for (e, &(a, b)) in g.edges().iter().enumerate() {
                let c = coloring[e] as usize;
                exps[a][c] += 1;
                exps[b][c] += 1;
            }
            let mut prod = GaussRational::one();
            for alpha in &exps {
                prod *= &self.eval(alpha);
                if prod.is_zero() {
                    break;
                }
            }
            total += &prod;
        }
        let circle_factor = GaussRational::from_int(n as i64)
            .pow(g.circles() as i64)
            .expect("nonnegative power");
        &total * &circle_factor
    }

    /// Weight of a fragment at a fixed coloring `phi` of its half edges:
    /// the sum over colorings of the internal edges extending `phi` of the
    /// product of vertex weights. An edge joining two open ends forces its
    /// labels to share a color; circles contribute a factor `n` each.
    pub fn fragment_weight(&self, f: &Fragment, phi: &[u8]) -> GaussRational {
        let n = self.n;
        let k = f.arity();
        assert_eq!(phi.len(), k, "coloring has wrong arity");
        assert!(phi.iter().all(|&c| (c as usize) < n), "color out of range");
        for (i, j) in f.open_pairs() {
            if phi[i - 1] != phi[j - 1] {
                return GaussRational::zero();
            }
        }
        let g = f.graph();
        let mut base = vec![vec![0u32; n]; g.num_vertices()];
        for (idx, att) in f.attachments().iter().enumerate() {
            if let Attachment::Vertex(v) = *att {
                base[v][phi[idx] as usize] += 1;
            }
        }
        let mut total = GaussRational::zero();
        for coloring in Colorings::new(g.edge_count(), n) {
            let mut exps = base.clone();
            for (e, &(a, b)) in g.edges().iter().enumerate() {
                let c = coloring[e] as usize;
                exps[a][c] += 1;
                exps[b][c] += 1;
            }
            let mut prod = GaussRational::one();
            for alpha in &exps {
                prod *= &self.eval(alpha);
                if prod.is_zero() {
                    break;
                }
            }
            total += &prod;
        }
        let circle_factor = GaussRational::from_int(n as i64)
            .pow(g.circles() as i64)
            .expect("nonnegative power");
        &total * &circle_factor
    }

    /// The tensor image of a fragment: `sum_phi weight(F, phi) e_phi`. For a
    /// 0-fragment this is the scalar given by the partition function.
    pub fn tensor_image(&self, f: &Fragment) -> Tensor {
        let k = f.arity();
        let mut t = Tensor::zero(self.n, k);
        for phi in Colorings::new(k, self.n) {
            let w = self.fragment_weight(f, &phi);
            t.add_entry(phi, w);
        }
        t
    }

    /// The model transformed by the signed permutation `e_c -> ±e_{perm[c]}`.
    /// Signed permutations keep supports finite, so the transform is exact.
    pub fn transform_signed(&self, perm: &[usize], negate: &[bool]) -> Result<VertexModel> {
        let n = self.n;
        if perm.len() != n || negate.len() != n {
            return Err(Error::pre("permutation length mismatch"));
        }
        let mut support = BTreeMap::new();
        for (beta, val) in &self.support {
            let mut alpha = vec![0u32; n];
            let mut flip = false;
            for c in 0..n {
                alpha[perm[c]] = beta[c];
                if negate[c] && beta[c] % 2 == 1 {
                    flip = !flip;
                }
            }
            support.insert(alpha, if flip { -val } else { val.clone() });
        }
        let spin = match &self.spin {
            None => None,
            Some(sf) => {
                let points = sf
                    .points
                    .iter()
                    .map(|u| {
                        let mut img = vec![GaussRational::zero(); n];
                        for c in 0..n {
                            img[perm[c]] = if negate[c] { -&u[c] } else { u[c].clone() };
                        }
                        img
                    })
                    .collect();
                Some(SpinForm {
                    points,
                    weights: sf.weights.clone(),
                })
            }
        };
        Ok(VertexModel {
            n,
            support,
            spin,
            truncation: self.truncation,
        })
    }

    /// Parses a `model ...` or `spin ...` file.
    pub fn parse(text: &str) -> Result<VertexModel> {
        enum Kind {
            Model,
            Spin,
        }
        let mut kind: Option<(Kind, usize)> = None;
        let mut degree: Option<usize> = None;
        let mut terms: Vec<(usize, Vec<u32>, GaussRational)> = Vec::new();
        let mut points: Vec<(usize, GaussRational, Vec<GaussRational>)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut tokens = content.split_whitespace();
            let keyword = tokens.next().unwrap();
            let rest: Vec<&str> = tokens.collect();
            if kind.is_none() {
                let k = match keyword {
                    "model" => Kind::Model,
                    "spin" => Kind::Spin,
                    _ => {
                        return Err(Error::parse(
                            line,
                            format!("expected `model n=<n>` or `spin n=<n>`, found `{keyword}`"),
                        ))
                    }
                };
                let n = rest
                    .first()
                    .and_then(|t| t.strip_prefix("n="))
                    .and_then(|v| v.parse::<usize>().ok())
                    .ok_or_else(|| Error::parse(line, "expected `n=<dimension>`"))?;
                if n == 0 {
                    return Err(Error::parse(line, "dimension must be positive"));
                }
                kind = Some((k, n));
                continue;
            }
            let (k, n) = kind.as_ref().unwrap();
            match (keyword, k) {
                ("degree", _) => {
                    let e = rest
                        .first()
                        .and_then(|v| v.parse::<usize>().ok())
                        .ok_or_else(|| Error::parse(line, "expected `degree <bound>`"))?;
                    degree = Some(e);
                }
                ("term", Kind::Model) => {
                    let Some(colon) = rest.iter().position(|&t| t == ":") else {
                        return Err(Error::parse(line, "expected `term a1 .. an : scalar`"));
                    };
                    if colon != *n || rest.len() != n + 2 {
                        return Err(Error::parse(
                            line,
                            format!("expected {n} exponents, a colon, and one scalar"),
                        ));
                    }
                    let mut alpha = Vec::with_capacity(*n);
                    for t in &rest[..colon] {
                        alpha.push(
                            t.parse::<u32>()
                                .map_err(|_| Error::parse(line, format!("bad exponent `{t}`")))?,
                        );
                    }
                    let v: GaussRational = rest[colon + 1]
                        .parse()
                        .map_err(|e: Error| Error::parse(line, e.to_string()))?;
                    terms.push((line, alpha, v));
                }
                ("point", Kind::Spin) => {
                    let Some(colon) = rest.iter().position(|&t| t == ":") else {
                        return Err(Error::parse(line, "expected `point weight : coordinates`"));
                    };
                    if colon != 1 || rest.len() != n + 2 {
                        return Err(Error::parse(
                            line,
                            format!("expected one weight, a colon, and {n} coordinates"),
                        ));
                    }
                    let w: GaussRational = rest[0]
                        .parse()
                        .map_err(|e: Error| Error::parse(line, e.to_string()))?;
                    let mut coords = Vec::with_capacity(*n);
                    for t in &rest[colon + 1..] {
                        coords.push(
                            t.parse::<GaussRational>()
                                .map_err(|e: Error| Error::parse(line, e.to_string()))?,
                        );
                    }
                    points.push((line, w, coords));
                }
                _ => return Err(Error::parse(line, format!("unknown directive `{keyword}`"))),
            }
        }
        let Some((kind, n)) = kind else {
            return Err(Error::parse(1, "missing `model`/`spin` header"));
        };
        match kind {
            Kind::Model => {
                let mut support = BTreeMap::new();
                for (line, alpha, v) in terms {
                    if support.insert(alpha.clone(), v).is_some() {
                        return Err(Error::parse(line, format!("duplicate term {alpha:?}")));
                    }
                }
                let mut m =
                    VertexModel::new(n, support).map_err(|e| Error::parse(1, e.to_string()))?;
                if let Some(e) = degree {
                    if m.support_degree() > e {
                        return Err(Error::parse(
                            1,
                            format!("support exceeds the declared degree bound {e}"),
                        ));
                    }
                    m.truncation = Some(e);
                }
                Ok(m)
            }
            Kind::Spin => {
                let m = points.len();
                let bound = degree.unwrap_or(3 * m.max(1));
                let weights = points.iter().map(|(_, w, _)| w.clone()).collect();
                let coords = points.into_iter().map(|(_, _, u)| u).collect();
                VertexModel::from_spin(coords, weights, n, bound)
            }
        }
    }
}

impl fmt::Display for VertexModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(spin) = &self.spin {
            writeln!(f, "spin n={}", self.n)?;
            if let Some(e) = self.truncation {
                writeln!(f, "degree {e}")?;
            }
            for (w, u) in spin.weights.iter().zip(&spin.points) {
                let coords: Vec<String> = u.iter().map(|c| c.to_string()).collect();
                writeln!(f, "point {w} : {}", coords.join(" "))?;
            }
            return Ok(());
        }
        writeln!(f, "model n={}", self.n)?;
        if let Some(e) = self.truncation {
            writeln!(f, "degree {e}")?;
        }
        for (alpha, v) in &self.support {
            let exps: Vec<String> = alpha.iter().map(|e| e.to_string()).collect();
            writeln!(f, "term {} : {v}", exps.join(" "))?;
        }
        Ok(())
    }
}

fn eval_spin(spin: &SpinForm, alpha: &[u32]) -> GaussRational {
    let mut acc = GaussRational::zero();
    for (a, u) in spin.weights.iter().zip(&spin.points) {
        let mut term = a.clone();
        for (coord, &e) in u.iter().zip(alpha) {
            for _ in 0..e {
                if term.is_zero() {
                    break;
                }
                term *= coord;
            }
            if term.is_zero() {
                break;
            }
        }
        acc += &term;
    }
    acc
}

/// All exponent vectors of length `n` with total degree at most `bound`,
/// in graded lexicographic order.
pub fn exponents_up_to(n: usize, bound: usize) -> Vec<Exponent> {
    let mut out = Vec::new();
    for total in 0..=bound {
        let mut current = vec![0u32; n];
        fill(&mut out, &mut current, 0, total as u32);
    }
    fn fill(out: &mut Vec<Exponent>, current: &mut Vec<u32>, pos: usize, remaining: u32) {
        if pos + 1 == current.len() {
            current[pos] = remaining;
            out.push(current.clone());
            return;
        }
        for v in (0..=remaining).rev() {
            current[pos] = v;
            fill(out, current, pos + 1, remaining - v);
        }
        current[pos] = 0;
    }
    out
}

/// Odometer over all maps `[count] -> [n]`, emitted in lexicographic order.
pub(crate) struct Colorings {
    next: Option<Vec<u8>>,
    n: u8,
}

impl Colorings {
    pub(crate) fn new(count: usize, n: usize) -> Self {
        assert!((1..=255).contains(&n));
        Colorings {
            next: Some(vec![0u8; count]),
            n: n as u8,
        }
    }
}

impl Iterator for Colorings {
    type Item = Vec<u8>;

    fn next(&mut self) -> Option<Vec<u8>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut pos = succ.len();
        loop {
            if pos == 0 {
                self.next = None;
                break;
            }
            pos -= 1;
            if succ[pos] + 1 < self.n {
                succ[pos] += 1;
                for c in succ.iter_mut().skip(pos + 1) {
                    *c = 0;
                }
                self.next = Some(succ);
                break;
            }
        }
        Some(current)
    }
}

/// Sparse multivariate polynomial in the variables `y_alpha` with integer
/// coefficients; `alpha` ranges over vertex-degree exponent vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionPolynomial {
    n: usize,
    /// Key: a monomial as a sorted list of `(variable exponent vector, power)`.
    terms: BTreeMap<Vec<(Exponent, u32)>, BigInt>,
}

impl PartitionPolynomial {
    /// The polynomial `sum over colorings of prod_v y_{degrees at v}`, times
    /// `n^circles` as a constant factor.
    pub fn of_graph(g: &Graph, n: usize) -> Self {
        let mut terms: BTreeMap<Vec<(Exponent, u32)>, BigInt> = BTreeMap::new();
        for coloring in Colorings::new(g.edge_count(), n) {
            let mut exps = vec![vec![0u32; n]; g.num_vertices()];
            for (e, &(a, b)) in g.edges().iter().enumerate() {
                let c = coloring[e] as usize;
                exps[a][c] += 1;
                exps[b][c] += 1;
            }
            let mut mono: BTreeMap<Exponent, u32> = BTreeMap::new();
            for alpha in exps {
                *mono.entry(alpha).or_insert(0) += 1;
            }
            let key: Vec<(Exponent, u32)> = mono.into_iter().collect();
            *terms.entry(key).or_insert_with(BigInt::zero) += 1;
        }
        let factor = BigInt::from(n).pow(g.circles() as u32);
        for coeff in terms.values_mut() {
            *coeff *= &factor;
        }
        PartitionPolynomial { n, terms }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<Vec<(Exponent, u32)>, BigInt> {
        &self.terms
    }

    /// Evaluates with `values(alpha)` substituted for `y_alpha`.
    pub fn evaluate_with<F>(&self, mut values: F) -> GaussRational
    where
        F: FnMut(&[u32]) -> GaussRational,
    {
        let mut acc = GaussRational::zero();
        for (mono, coeff) in &self.terms {
            let mut term = gauss_from_bigint(coeff);
            for (alpha, pow) in mono {
                if term.is_zero() {
                    break;
                }
                let v = values(alpha);
                term = &term * &v.pow(*pow as i64).expect("nonnegative power");
            }
            acc += &term;
        }
        acc
    }

    /// Evaluates at the support of a model; by construction this equals the
    /// partition function of the model on the source graph.
    pub fn evaluate(&self, model: &VertexModel) -> GaussRational {
        self.evaluate_with(|alpha| model.eval(alpha))
    }
}

fn gauss_from_bigint(v: &BigInt) -> GaussRational {
    GaussRational::from_rational(Rational::from_bigint(v.clone()))
}

impl fmt::Display for PartitionPolynomial {
    /// Monomial terms like `2*y[1,0]^2*y[0,1]`, joined by ` + `, with the
    /// variables of each term in descending order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut keys: Vec<&Vec<(Exponent, u32)>> = self.terms.keys().collect();
        keys.sort_by(|a, b| b.cmp(a));
        let rendered: Vec<String> = keys
            .into_iter()
            .map(|mono| {
                let coeff = &self.terms[mono];
                let mut parts = vec![coeff.to_string()];
                let mut vars: Vec<&(Exponent, u32)> = mono.iter().collect();
                vars.sort_by(|a, b| b.cmp(a));
                for (alpha, pow) in vars {
                    let idx: Vec<String> = alpha.iter().map(|e| e.to_string()).collect();
                    let var = format!("y[{}]", idx.join(","));
                    parts.push(if *pow == 1 {
                        var
                    } else {
                        format!("{var}^{pow}")
                    });
                }
                parts.join("*")
            })
            .collect();
        write!(f, "{}", rendered.join(" + "))
    }
}

/// Number of perfect matchings, by direct enumeration of edge subsets. Used
/// as an independent oracle for the matching vertex model.
pub fn count_perfect_matchings(g: &Graph) -> usize {
    let edges = g.edges();
    let nv = g.num_vertices();
    let mut count = 0usize;
    let subsets: u64 = 1 << edges.len();
    for mask in 0..subsets {
        let mut deg = vec![0usize; nv];
        for (e, &(a, b)) in edges.iter().enumerate() {
            if mask >> e & 1 == 1 {
                deg[a] += 1;
                deg[b] += 1;
            }
        }
        if deg.iter().all(|&d| d == 1) {
            count += 1;
        }
    }
    count
}

/// `count_perfect_matchings` as an exact scalar, for comparisons with
/// partition-function values.
pub fn matching_count_scalar(g: &Graph) -> GaussRational {
    GaussRational::from_rational(Rational::from_bigint(BigInt::from(
        count_perfect_matchings(g),
    )))
}
