//! Spin-model orbit analysis: the closedness test for the orbit of a spin
//! model, one-parameter subgroups of O_n and their limits on truncated
//! models, the explicit destabilizing witness for degenerate point sets, and
//! normalization to a closed-orbit model with the same partition function.
//!
//! A one-parameter subgroup is presented by a canonical basis (Gram matrix
//! equal to the anti-diagonal identity) and an antisymmetric nonincreasing
//! integer weight vector; `lambda(t)` scales the i-th basis vector by
//! `t^{d_i}`. Limits act on monomial coefficients by `t^{alpha . d}`:
//! negative-weight components must vanish for the limit to exist,
//! positive-weight components die, zero-weight components survive.
//!
//! Canonical-basis completion needs square roots; when a required root lies
//! outside Q(i) the construction fails loudly, naming the value, instead of
//! approximating.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{self, dot};
use crate::model::{exponents_up_to, Exponent, VertexModel};
use crate::scalar::GaussRational;

type Vector = Vec<GaussRational>;

/// `lambda(t) = B diag(t^{d_i}) B^{-1}` for a basis matrix `B` whose columns
/// are `v_1..v_n` and integer weights `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneParamSubgroup {
    columns: Vec<Vector>,
    weights: Vec<i64>,
    inverse: Vec<Vector>, // B^{-1} as rows
}

impl OneParamSubgroup {
    pub fn new(columns: Vec<Vector>, weights: Vec<i64>) -> Result<Self> {
        let n = columns.len();
        if n == 0 {
            return Err(Error::pre("basis must be nonempty"));
        }
        if columns.iter().any(|c| c.len() != n) {
            return Err(Error::pre("basis columns have wrong dimension"));
        }
        if weights.len() != n {
            return Err(Error::pre(format!(
                "expected {n} weights, got {}",
                weights.len()
            )));
        }
        let b = basis_matrix(&columns);
        let inverse = linalg::invert(&b).ok_or_else(|| Error::pre("basis matrix is singular"))?;
        Ok(OneParamSubgroup {
            columns,
            weights,
            inverse,
        })
    }

    pub fn n(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Vector] {
        &self.columns
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub fn basis_matrix(&self) -> Vec<Vector> {
        basis_matrix(&self.columns)
    }

    pub fn basis_inverse(&self) -> &[Vector] {
        &self.inverse
    }

    /// Checks the canonical-basis Gram shape and the weight profile, then
    /// certifies `lambda(t)^T lambda(t) = I` as a Laurent-polynomial identity
    /// by sampling at `2*max|d| + 1` distinct rational points.
    pub fn verify(&self) -> Result<()> {
        let n = self.n();
        for i in 0..n {
            for j in 0..n {
                let g = dot(&self.columns[i], &self.columns[j]);
                let expected = if i + j == n - 1 {
                    GaussRational::one()
                } else {
                    GaussRational::zero()
                };
                if g != expected {
                    return Err(Error::pre(format!(
                        "basis is not canonical: <v{}, v{}> = {g}, expected {expected}",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        for i in 0..n.saturating_sub(1) {
            if self.weights[i] < self.weights[i + 1] {
                return Err(Error::pre(format!(
                    "weights must be nonincreasing: d{} = {} < d{} = {}",
                    i + 1,
                    self.weights[i],
                    i + 2,
                    self.weights[i + 1]
                )));
            }
        }
        for i in 0..n {
            if self.weights[i] != -self.weights[n - 1 - i] {
                return Err(Error::pre(format!(
                    "weights must satisfy d{} = -d{}; got {} and {}",
                    i + 1,
                    n - i,
                    self.weights[i],
                    self.weights[n - 1 - i]
                )));
            }
        }
        let span = self
            .weights
            .iter()
            .map(|d| d.unsigned_abs())
            .max()
            .unwrap_or(0);
        let samples = 2 * span + 1;
        for s in 1..=samples {
            let t = GaussRational::from_int(s as i64);
            let m = self.evaluate(&t)?;
            let mt = linalg::transpose(&m);
            if linalg::mat_mul(&mt, &m) != linalg::identity(self.n()) {
                return Err(Error::internal(format!(
                    "lambda({s}) failed the orthogonality identity"
                )));
            }
        }
        Ok(())
    }

    /// The matrix of `lambda(t)` at a nonzero rational point.
    pub fn evaluate(&self, t: &GaussRational) -> Result<Vec<Vector>> {
        if t.is_zero() {
            return Err(Error::pre("lambda is only defined for nonzero t"));
        }
        let n = self.n();
        let b = self.basis_matrix();
        let mut scaled = vec![vec![GaussRational::zero(); n]; n];
        for (i, row) in b.iter().enumerate() {
            for j in 0..n {
                scaled[i][j] = &row[j] * &t.pow(self.weights[j])?;
            }
        }
        Ok(linalg::mat_mul(&scaled, &self.inverse))
    }

    /// `oneparam n=<n>`, one line per basis column, then `weights d1 .. dn`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut n: Option<usize> = None;
        let mut columns: Vec<Vector> = Vec::new();
        let mut weights: Option<Vec<i64>> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if n.is_none() {
                let dim = content
                    .strip_prefix("oneparam")
                    .map(str::trim)
                    .and_then(|t| t.strip_prefix("n="))
                    .and_then(|v| v.parse::<usize>().ok())
                    .ok_or_else(|| Error::parse(line, "expected `oneparam n=<n>`"))?;
                n = Some(dim);
                continue;
            }
            let dim = n.unwrap();
            if let Some(rest) = content.strip_prefix("weights") {
                let ds: std::result::Result<Vec<i64>, _> =
                    rest.split_whitespace().map(str::parse).collect();
                let ds = ds.map_err(|_| Error::parse(line, "bad weight entry"))?;
                if ds.len() != dim {
                    return Err(Error::parse(line, format!("expected {dim} weights")));
                }
                weights = Some(ds);
                continue;
            }
            let col: Vector = content
                .split_whitespace()
                .map(|t| t.parse::<GaussRational>())
                .collect::<Result<_>>()
                .map_err(|e| Error::parse(line, e.to_string()))?;
            if col.len() != dim {
                return Err(Error::parse(line, format!("expected {dim} coordinates")));
            }
            if columns.len() == dim {
                return Err(Error::parse(line, "too many basis columns"));
            }
            columns.push(col);
        }
        let Some(dim) = n else {
            return Err(Error::parse(1, "missing `oneparam` header"));
        };
        if columns.len() != dim {
            return Err(Error::pre(format!(
                "expected {dim} basis columns, found {}",
                columns.len()
            )));
        }
        let weights = weights.ok_or_else(|| Error::pre("missing `weights` line"))?;
        OneParamSubgroup::new(columns, weights)
    }
}

impl fmt::Display for OneParamSubgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "oneparam n={}", self.n())?;
        for col in &self.columns {
            let cells: Vec<String> = col.iter().map(|v| v.to_string()).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        let ws: Vec<String> = self.weights.iter().map(|d| d.to_string()).collect();
        writeln!(f, "weights {}", ws.join(" "))
    }
}

fn basis_matrix(columns: &[Vector]) -> Vec<Vector> {
    let n = columns.len();
    (0..n)
        .map(|r| columns.iter().map(|c| c[r].clone()).collect())
        .collect()
}

/// A vertex model together with the degree bound it is restricted to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedModel {
    model: VertexModel,
    bound: usize,
}

impl TruncatedModel {
    pub fn new(model: VertexModel, bound: usize) -> Result<Self> {
        if model.support_degree() > bound {
            return Err(Error::pre(format!(
                "support degree {} exceeds the bound {bound}",
                model.support_degree()
            )));
        }
        Ok(TruncatedModel { model, bound })
    }

    pub fn model(&self) -> &VertexModel {
        &self.model
    }

    pub fn bound(&self) -> usize {
        self.bound
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LimitResult {
    Converges(TruncatedModel),
    NoLimit,
}

/// True iff the orbit of the weighted point configuration is closed: the
/// Gram rank of the points equals the dimension of their span. The empty
/// configuration and the single zero point are closed (single-point orbits).
pub fn orbit_closed(points: &[Vector], weights: &[GaussRational]) -> Result<bool> {
    if points.len() != weights.len() {
        return Err(Error::pre("point and weight counts differ"));
    }
    if points.is_empty() {
        return Ok(true);
    }
    let n = points[0].len();
    if points.iter().any(|u| u.len() != n) {
        return Err(Error::pre("points have mixed dimensions"));
    }
    let span = linalg::rank(points);
    let gram: Vec<Vector> = points
        .iter()
        .map(|u| points.iter().map(|v| dot(u, v)).collect())
        .collect();
    Ok(linalg::rank(&gram) == span)
}

/// Sparse polynomial product, exponent vectors added componentwise.
fn poly_mul(
    a: &BTreeMap<Exponent, GaussRational>,
    b: &BTreeMap<Exponent, GaussRational>,
) -> BTreeMap<Exponent, GaussRational> {
    let mut out: BTreeMap<Exponent, GaussRational> = BTreeMap::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let key: Exponent = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            let add = ca * cb;
            match out.entry(key) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(add);
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    let sum = e.get() + &add;
                    if sum.is_zero() {
                        e.remove();
                    } else {
                        *e.get_mut() = sum;
                    }
                }
            }
        }
    }
    out
}

/// Expands `prod_i (sum_j forms[i][j] z_j)^{alpha_i}` as a sparse polynomial
/// in the `z` variables.
fn expand_monomial(forms: &[Vector], alpha: &[u32]) -> BTreeMap<Exponent, GaussRational> {
    let n = forms.len();
    let mut acc: BTreeMap<Exponent, GaussRational> = BTreeMap::new();
    acc.insert(vec![0u32; n], GaussRational::one());
    for (i, &power) in alpha.iter().enumerate() {
        if power == 0 {
            continue;
        }
        let mut linear: BTreeMap<Exponent, GaussRational> = BTreeMap::new();
        for (j, coeff) in forms[i].iter().enumerate() {
            if !coeff.is_zero() {
                let mut unit = vec![0u32; n];
                unit[j] = 1;
                linear.insert(unit, coeff.clone());
            }
        }
        for _ in 0..power {
            acc = poly_mul(&acc, &linear);
        }
    }
    acc
}

/// Limit of `lambda(t) . h` as `t -> 0` on the truncated model, or `NoLimit`
/// when a negative-weight coefficient is nonzero.
///
/// The model is re-expressed in the monomial basis dual to the subgroup's
/// eigenbasis; there each coefficient scales by `t^{alpha . d}`, and the
/// surviving zero-weight part is transformed back.
pub fn apply_limit(lambda: &OneParamSubgroup, h: &TruncatedModel) -> Result<LimitResult> {
    let n = lambda.n();
    if h.model().n() != n {
        return Err(Error::pre("model and subgroup dimensions differ"));
    }
    let bound = h.bound();
    let betas = exponents_up_to(n, bound);

    // Dual coordinates: w_j = sum_i Binv[j][i] x_i.
    let binv = lambda.basis_inverse();
    let mut surviving: BTreeMap<Exponent, GaussRational> = BTreeMap::new();
    for beta in &betas {
        let weight: i64 = beta
            .iter()
            .zip(lambda.weights())
            .map(|(&b, &d)| b as i64 * d)
            .sum();
        if weight > 0 {
            continue; // scales to zero in the limit
        }
        let expansion = expand_monomial(binv, beta);
        let mut value = GaussRational::zero();
        for (alpha, coeff) in &expansion {
            let hv = h.model().eval(alpha);
            if !hv.is_zero() {
                value += &(coeff * &hv);
            }
        }
        if weight < 0 {
            if !value.is_zero() {
                return Ok(LimitResult::NoLimit);
            }
            continue;
        }
        if !value.is_zero() {
            surviving.insert(beta.clone(), value);
        }
    }

    // Back to the standard basis: x_i = sum_j B[i][j] w_j.
    let b = lambda.basis_matrix();
    let mut support: BTreeMap<Exponent, GaussRational> = BTreeMap::new();
    for alpha in &betas {
        let expansion = expand_monomial(&b, alpha);
        let mut value = GaussRational::zero();
        for (beta, coeff) in &expansion {
            if let Some(hv) = surviving.get(beta) {
                value += &(coeff * hv);
            }
        }
        if !value.is_zero() {
            support.insert(alpha.clone(), value);
        }
    }
    let model = VertexModel::new(n, support)?.truncate(bound);
    Ok(LimitResult::Converges(TruncatedModel::new(model, bound)?))
}

/// Canonical basis of a nondegenerate subspace, given by an independent
/// spanning list: returns vectors whose Gram matrix is the anti-diagonal
/// identity, failing loudly when a needed square root leaves Q(i).
fn canonical_basis_of(space: &[Vector]) -> Result<Vec<Vector>> {
    let d = space.len();
    if d == 0 {
        return Ok(Vec::new());
    }
    let gram: Vec<Vector> = space
        .iter()
        .map(|u| space.iter().map(|v| dot(u, v)).collect())
        .collect();
    if d == 1 {
        let c = &gram[0][0];
        if c.is_zero() {
            return Err(Error::internal("middle space is degenerate"));
        }
        let s = c.sqrt_exact().ok_or_else(|| Error::SqrtNotInField {
            value: c.to_string(),
        })?;
        let inv = s.recip()?;
        return Ok(vec![scale_vec(&space[0], &inv)]);
    }
    // Find an isotropic vector in the span.
    let iso: Vector = if let Some(i) = (0..d).find(|&i| gram[i][i].is_zero()) {
        space[i].clone()
    } else {
        let c0 = &gram[0][0];
        let t = gram[0][1].try_div(c0)?;
        let mut b1p = space[1].clone();
        for (x, y) in b1p.iter_mut().zip(&space[0]) {
            *x = &*x - &(&t * y);
        }
        let c1 = dot(&b1p, &b1p);
        if c1.is_zero() {
            b1p
        } else {
            let ratio = (-&c1).try_div(c0)?;
            let rho = ratio.sqrt_exact().ok_or_else(|| Error::SqrtNotInField {
                value: ratio.to_string(),
            })?;
            let mut v = scale_vec(&space[0], &rho);
            for (x, y) in v.iter_mut().zip(&b1p) {
                *x = &*x + y;
            }
            v
        }
    };
    // Hyperbolic partner inside the span.
    let partner_seed = space
        .iter()
        .find(|b| !dot(&iso, b).is_zero())
        .ok_or_else(|| Error::internal("isotropic vector pairs to zero with the whole space"))?;
    let scale = dot(&iso, partner_seed).recip()?;
    let mut partner = scale_vec(partner_seed, &scale);
    let half = GaussRational::from_parts(1, 2, 0, 1).unwrap();
    let correction = &dot(&partner, &partner) * &half;
    for (x, y) in partner.iter_mut().zip(&iso) {
        *x = &*x - &(&correction * y);
    }
    debug_assert!(dot(&partner, &partner).is_zero());
    debug_assert!(dot(&iso, &partner).is_one());
    // Orthogonal complement of the hyperbolic pair, in span coordinates.
    let rows = vec![
        space.iter().map(|b| dot(b, &iso)).collect::<Vector>(),
        space.iter().map(|b| dot(b, &partner)).collect::<Vector>(),
    ];
    let kernel = linalg::kernel_basis(&rows, d);
    let sub: Vec<Vector> = kernel
        .iter()
        .map(|coeffs| {
            let mut v = vec![GaussRational::zero(); space[0].len()];
            for (c, b) in coeffs.iter().zip(space) {
                for (x, y) in v.iter_mut().zip(b) {
                    *x = &*x + &(c * y);
                }
            }
            v
        })
        .collect();
    let mut result = vec![iso];
    result.extend(canonical_basis_of(&sub)?);
    result.push(partner);
    Ok(result)
}

fn scale_vec(v: &[GaussRational], c: &GaussRational) -> Vector {
    v.iter().map(|x| x * c).collect()
}

/// For a point set whose span carries a degenerate form, builds the
/// destabilizing one-parameter subgroup: a canonical basis starting with a
/// radical vector of the span, weights `(1, 0, .., 0, -1)`. Scaling the
/// radical direction to zero strictly shrinks the span, which drives the
/// normalization loop.
pub fn degenerate_witness(
    points: &[Vector],
    weights: &[GaussRational],
) -> Result<OneParamSubgroup> {
    if orbit_closed(points, weights)? {
        return Err(Error::pre(
            "the form on the span of the points is nondegenerate; no witness exists",
        ));
    }
    let n = points[0].len();
    // Independent spanning subset of the points.
    let mut span: Vec<Vector> = Vec::new();
    for u in points {
        if u.iter().all(GaussRational::is_zero) {
            continue;
        }
        span.push(u.clone());
        if linalg::rank(&span) < span.len() {
            span.pop();
        }
    }
    let gram: Vec<Vector> = span
        .iter()
        .map(|u| span.iter().map(|v| dot(u, v)).collect())
        .collect();
    let kernel = linalg::kernel_basis(&gram, span.len());
    let coeffs = kernel
        .first()
        .ok_or_else(|| Error::internal("degenerate span must have a radical"))?;
    let mut radical = vec![GaussRational::zero(); n];
    for (c, b) in coeffs.iter().zip(&span) {
        for (x, y) in radical.iter_mut().zip(b) {
            *x = &*x + &(c * y);
        }
    }
    debug_assert!(span.iter().all(|u| dot(u, &radical).is_zero()));

    // Hyperbolic partner of the radical vector inside V.
    let j = radical
        .iter()
        .position(|c| !c.is_zero())
        .ok_or_else(|| Error::internal("radical vector is zero"))?;
    let mut partner = vec![GaussRational::zero(); n];
    partner[j] = radical[j].recip()?;
    let half = GaussRational::from_parts(1, 2, 0, 1).unwrap();
    let correction = &dot(&partner, &partner) * &half;
    for (x, y) in partner.iter_mut().zip(&radical) {
        *x = &*x - &(&correction * y);
    }
    // Middle block: everything orthogonal to the hyperbolic pair.
    let rows = vec![radical.clone(), partner.clone()];
    let middle_space = linalg::kernel_basis(&rows, n);
    let middle = canonical_basis_of(&middle_space)?;

    let mut columns = vec![radical];
    columns.extend(middle);
    columns.push(partner);
    let mut ds = vec![0i64; n];
    ds[0] = 1;
    ds[n - 1] = -1;
    let lambda = OneParamSubgroup::new(columns, ds)?;
    lambda
        .verify()
        .map_err(|e| Error::internal(format!("constructed witness failed verification: {e}")))?;
    Ok(lambda)
}

/// Repeatedly applies witness limits until the point configuration has a
/// closed orbit (or vanishes); the resulting truncated model has the same
/// partition function as the input on graphs within the degree bound. The
/// truncation degree defaults to `max(3m, e)`.
pub fn normalize_spin(
    points: &[Vector],
    weights: &[GaussRational],
    n: usize,
    e: usize,
) -> Result<TruncatedModel> {
    if points.len() != weights.len() {
        return Err(Error::pre("point and weight counts differ"));
    }
    if points.iter().any(|u| u.len() != n) {
        return Err(Error::pre(format!("points must have dimension {n}")));
    }
    let bound = e.max(3 * points.len());
    let mut pts: Vec<Vector> = points.to_vec();
    let mut wts: Vec<GaussRational> = weights.to_vec();
    for _ in 0..=n + 1 {
        merge_points(&mut pts, &mut wts);
        if pts.is_empty() {
            let zero = VertexModel::zero(n).truncate(bound);
            return TruncatedModel::new(zero, bound);
        }
        if orbit_closed(&pts, &wts)? {
            let model = VertexModel::from_spin(pts, wts, n, bound)?;
            return TruncatedModel::new(model, bound);
        }
        let lambda = degenerate_witness(&pts, &wts)?;
        let binv = lambda.basis_inverse();
        let b = lambda.basis_matrix();
        for u in pts.iter_mut() {
            let coords = linalg::mat_vec(binv, u);
            for (i, &d) in lambda.weights().iter().enumerate() {
                if d < 0 && !coords[i].is_zero() {
                    return Err(Error::internal(
                        "witness limit does not exist on its own span",
                    ));
                }
            }
            let mut limit = vec![GaussRational::zero(); n];
            for (i, &d) in lambda.weights().iter().enumerate() {
                if d == 0 && !coords[i].is_zero() {
                    for (x, col) in limit.iter_mut().zip(&b) {
                        *x = &*x + &(&coords[i] * &col[i]);
                    }
                }
            }
            *u = limit;
        }
    }
    Err(Error::internal("normalization did not terminate"))
}

/// Merges coinciding points (summing weights) and drops zero weights.
fn merge_points(points: &mut Vec<Vector>, weights: &mut Vec<GaussRational>) {
    let mut merged: Vec<(Vector, GaussRational)> = Vec::new();
    'next: for (u, a) in points.iter().zip(weights.iter()) {
        for (v, b) in merged.iter_mut() {
            if v == u {
                *b = &*b + a;
                continue 'next;
            }
        }
        merged.push((u.clone(), a.clone()));
    }
    merged.retain(|(_, a)| !a.is_zero());
    *points = merged.iter().map(|(u, _)| u.clone()).collect();
    *weights = merged.into_iter().map(|(_, a)| a).collect();
}
