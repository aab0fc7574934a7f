//! Edge connection matrices of partition functions on finite fragment lists,
//! exact ranks along two independent routes, and a saturating rank search.
//!
//! The infinite connection matrix is approximated from below: the search
//! enumerates fragments in increasing vertex classes and keeps the Gram rank
//! of their tensor images. A reported rank is always a valid lower bound; it
//! is *certified* only when it hits an independently computed upper bound
//! (an invariant-space dimension passed as `target`, or the ambient n^k).

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{enumerate_fragments_exact, Fragment};
use crate::linalg;
use crate::model::VertexModel;
use crate::scalar::GaussRational;
use crate::tensor::{gram_rank, Tensor};

/// The fragment-indexed matrix with entry `(a, b)` the partition function of
/// the gluing of fragments `a` and `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectionMatrix {
    fragments: Vec<Fragment>,
    entries: Vec<Vec<GaussRational>>,
}

pub fn build_matrix(h: &VertexModel, fragments: &[Fragment]) -> Result<ConnectionMatrix> {
    if let Some(first) = fragments.first() {
        let k = first.arity();
        if fragments.iter().any(|f| f.arity() != k) {
            return Err(Error::pre("all fragments must have the same arity"));
        }
    }
    let m = fragments.len();
    let mut entries = vec![vec![GaussRational::zero(); m]; m];
    for a in 0..m {
        for b in a..m {
            let glued = fragments[a].glue(&fragments[b])?;
            let v = h.partition_function(&glued);
            entries[a][b] = v.clone();
            entries[b][a] = v;
        }
    }
    Ok(ConnectionMatrix {
        fragments: fragments.to_vec(),
        entries,
    })
}

impl ConnectionMatrix {
    pub fn fragments(&self) -> &[Fragment] {
        &self.fragments
    }

    pub fn entries(&self) -> &[Vec<GaussRational>] {
        &self.entries
    }

    pub fn size(&self) -> usize {
        self.fragments.len()
    }

    /// Exact rank by fraction-free elimination on the matrix itself.
    pub fn rank_direct(&self) -> usize {
        linalg::rank(&self.entries)
    }

    /// Basis of the null space; a kernel vector is a linear combination of
    /// fragments glued to zero by every enumerated fragment.
    pub fn kernel(&self) -> Vec<Vec<GaussRational>> {
        linalg::kernel_basis(&self.entries, self.size())
    }

    /// Entries as tab-separated scalar text, one row per line.
    pub fn to_tsv(&self) -> String {
        self.entries
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join("\t")
            })
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// Rank of the same matrix computed through tensor images: the Gram rank of
/// `[tensor_image(F) for F in fragments]`. Agrees with `rank_direct` because
/// each matrix entry equals the bilinear pairing of the two images.
pub fn rank_via_gram(h: &VertexModel, fragments: &[Fragment]) -> Result<usize> {
    if let Some(first) = fragments.first() {
        let k = first.arity();
        if fragments.iter().any(|f| f.arity() != k) {
            return Err(Error::pre("all fragments must have the same arity"));
        }
    }
    let images: Vec<Tensor> = fragments.iter().map(|f| h.tensor_image(f)).collect();
    gram_rank(&images)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certificate {
    HitAmbientBound,
    HitInvariantDim,
    None,
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Certificate::HitAmbientBound => "hit_ambient_bound",
            Certificate::HitInvariantDim => "hit_invariant_dim",
            Certificate::None => "none",
        };
        write!(f, "{s}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankReport {
    pub k: usize,
    pub rank: usize,
    pub certified: bool,
    pub fragments_used: usize,
    pub certificate: Certificate,
}

impl fmt::Display for RankReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "rank={} certified={} certificate={} fragments={}",
            self.rank, self.certified, self.certificate, self.fragments_used
        )
    }
}

/// Grows the fragment list class by class (by internal vertex count up to
/// `vertex_budget`) and tracks the Gram rank of the accumulated tensor
/// images. Stops early when the rank reaches `target` or the ambient
/// dimension n^k; otherwise stops after two consecutive classes without rank
/// growth, or when the budget is exhausted, reporting an uncertified lower
/// bound.
///
/// `max_degree` bounds the vertex degrees considered; `None` uses the model's
/// support degree (higher-degree vertices force a zero factor for finitely
/// supported models), or `max(k, 2)` for spin models, whose support has
/// unbounded degree.
pub fn saturating_rank(
    h: &VertexModel,
    k: usize,
    vertex_budget: usize,
    target: Option<usize>,
    max_degree: Option<usize>,
) -> RankReport {
    let n = h.n();
    let ambient = n.pow(k as u32);
    let degree = max_degree.unwrap_or_else(|| {
        if h.spin().is_some() {
            k.max(2)
        } else {
            h.support_degree()
        }
    });

    let mut distinct: Vec<Tensor> = Vec::new();
    let mut seen: BTreeSet<Tensor> = BTreeSet::new();
    let mut gram: Vec<Vec<GaussRational>> = Vec::new();
    let mut rank = 0usize;
    let mut fragments_used = 0usize;

    let report = |rank, certified, fragments_used, certificate| RankReport {
        k,
        rank,
        certified,
        fragments_used,
        certificate,
    };

    if target == Some(0) {
        return report(0, true, 0, Certificate::HitInvariantDim);
    }

    let mut stagnant = 0usize;
    for class in 0..=vertex_budget {
        // Isolated vertices only rescale images of smaller fragments, so the
        // search skips them.
        for f in enumerate_fragments_exact(k, class, degree, false) {
            fragments_used += 1;
            let t = h.tensor_image(&f);
            if t.is_zero() || seen.contains(&t) {
                continue;
            }
            let mut row: Vec<GaussRational> = distinct
                .iter()
                .map(|u| t.bilinear_form(u).expect("uniform shapes"))
                .collect();
            row.push(t.bilinear_form(&t).expect("uniform shapes"));
            for (existing, v) in gram.iter_mut().zip(&row) {
                existing.push(v.clone());
            }
            gram.push(row);
            seen.insert(t.clone());
            distinct.push(t);
        }
        let new_rank = linalg::rank(&gram);
        debug_assert!(new_rank >= rank);
        let grew = new_rank > rank;
        rank = new_rank;
        if target == Some(rank) {
            return report(rank, true, fragments_used, Certificate::HitInvariantDim);
        }
        if rank == ambient {
            return report(rank, true, fragments_used, Certificate::HitAmbientBound);
        }
        if grew {
            stagnant = 0;
        } else {
            stagnant += 1;
            if stagnant >= 2 {
                break;
            }
        }
    }
    report(rank, false, fragments_used, Certificate::None)
}
