//! Seeded random generators and the randomized self-check used by the
//! `selftest` CLI subcommand and by the test suites.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Attachment, Fragment, Graph};
use crate::model::{PartitionPolynomial, VertexModel};
use crate::scalar::GaussRational;
use crate::tensor::OrthogonalMap;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A small random element of Q(i), biased toward integers.
pub fn random_scalar(rng: &mut ChaCha8Rng) -> GaussRational {
    let re_num = rng.gen_range(-4i64..=4);
    let re_den = if rng.gen_bool(0.3) {
        rng.gen_range(2i64..=3)
    } else {
        1
    };
    let im_num = if rng.gen_bool(0.5) {
        rng.gen_range(-3i64..=3)
    } else {
        0
    };
    GaussRational::from_parts(re_num, re_den, im_num, 1).unwrap()
}

pub fn random_nonzero_scalar(rng: &mut ChaCha8Rng) -> GaussRational {
    loop {
        let v = random_scalar(rng);
        if !v.is_zero() {
            return v;
        }
    }
}

/// A random model with `terms` support monomials of degree <= `max_degree`.
pub fn random_model(
    rng: &mut ChaCha8Rng,
    n: usize,
    max_degree: usize,
    terms: usize,
) -> VertexModel {
    let mut support = BTreeMap::new();
    for _ in 0..terms {
        let degree = rng.gen_range(0..=max_degree);
        let mut alpha = vec![0u32; n];
        for _ in 0..degree {
            alpha[rng.gen_range(0..n)] += 1;
        }
        support.insert(alpha, random_nonzero_scalar(rng));
    }
    VertexModel::new(n, support).expect("generated support is well formed")
}

/// A random graph within the given bounds (multi-edges and loops included).
pub fn random_graph(
    rng: &mut ChaCha8Rng,
    max_vertices: usize,
    max_edges: usize,
    max_circles: usize,
) -> Graph {
    let nv = rng.gen_range(0..=max_vertices);
    let ne = if nv == 0 {
        0
    } else {
        rng.gen_range(0..=max_edges)
    };
    let mut edges = Vec::with_capacity(ne);
    for _ in 0..ne {
        let a = rng.gen_range(0..nv);
        let b = rng.gen_range(0..nv);
        edges.push((a, b));
    }
    let circles = rng.gen_range(0..=max_circles);
    Graph::new(nv, edges, circles).expect("generated edges are valid")
}

/// A random k-fragment with at most `max_vertices` vertices and
/// `max_internal_edges` internal edges.
pub fn random_fragment(
    rng: &mut ChaCha8Rng,
    k: usize,
    max_vertices: usize,
    max_internal_edges: usize,
) -> Fragment {
    // Open-end pairing needs either vertices or an even leftover, so retry.
    loop {
        let nv = rng.gen_range(0..=max_vertices);
        let mut attachments: Vec<Option<Attachment>> = vec![None; k];
        let mut ok = true;
        for idx in 0..k {
            if attachments[idx].is_some() {
                continue;
            }
            let free_later: Vec<usize> =
                (idx + 1..k).filter(|&j| attachments[j].is_none()).collect();
            let pair_possible = !free_later.is_empty();
            if nv > 0 && (!pair_possible || rng.gen_bool(0.7)) {
                attachments[idx] = Some(Attachment::Vertex(rng.gen_range(0..nv)));
            } else if pair_possible {
                let partner = free_later[rng.gen_range(0..free_later.len())];
                attachments[idx] = Some(Attachment::Pair(partner + 1));
                attachments[partner] = Some(Attachment::Pair(idx + 1));
            } else {
                ok = false;
                break;
            }
        }
        if !ok {
            continue;
        }
        let ne = if nv == 0 {
            0
        } else {
            rng.gen_range(0..=max_internal_edges)
        };
        let mut edges = Vec::with_capacity(ne);
        for _ in 0..ne {
            edges.push((rng.gen_range(0..nv), rng.gen_range(0..nv)));
        }
        let graph = Graph::new(nv, edges, 0).expect("generated edges are valid");
        let attachments = attachments.into_iter().map(Option::unwrap).collect();
        return Fragment::new(graph, attachments).expect("generated attachments are valid");
    }
}

/// A uniformly random signed permutation in O_n.
pub fn random_signed_permutation(rng: &mut ChaCha8Rng, n: usize) -> OrthogonalMap {
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    let negate: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
    OrthogonalMap::signed_permutation(&perm, &negate).expect("valid permutation")
}

#[derive(Clone, Copy, Debug)]
pub struct SelftestReport {
    pub rounds: usize,
    pub checks: usize,
}

/// Randomized cross-checks of the central identities; fails with an
/// `Internal` error describing the first broken identity.
pub fn run_selftest(seed: u64, rounds: usize) -> Result<SelftestReport> {
    let mut rng = rng_from_seed(seed);
    let mut checks = 0usize;
    let ensure = |ok: bool, what: &str, round: usize| -> Result<()> {
        if !ok {
            return Err(Error::internal(format!("selftest round {round}: {what}")));
        }
        Ok(())
    };
    for round in 0..rounds {
        let n = rng.gen_range(1..=3);
        let terms = rng.gen_range(1..=4);
        let h = random_model(&mut rng, n, 3, terms);

        // Field axioms on random scalars.
        let (a, b, c) = (
            random_scalar(&mut rng),
            random_scalar(&mut rng),
            random_scalar(&mut rng),
        );
        checks += 2;
        ensure(
            &(&a + &b) + &c == &a + &(&b + &c),
            "addition associativity",
            round,
        )?;
        ensure(
            &a * &(&b + &c) == &(&a * &b) + &(&a * &c),
            "distributivity",
            round,
        )?;

        // Fragment contraction commutes with tensor contraction.
        let k = rng.gen_range(2..=4);
        let f = random_fragment(&mut rng, k, 2, 3);
        let i = rng.gen_range(1..k);
        let j = rng.gen_range(i + 1..=k);
        let lhs = h.tensor_image(&f.contract(i, j).expect("valid labels"));
        let rhs = h.tensor_image(&f).contract(i, j).expect("valid slots");
        checks += 1;
        ensure(lhs == rhs, "contraction compatibility", round)?;

        // Gluing pairs with the bilinear form.
        let g2 = random_fragment(&mut rng, k, 2, 2);
        let glued = f.glue(&g2).expect("same arity");
        let direct = h.partition_function(&glued);
        let paired = h
            .tensor_image(&f)
            .bilinear_form(&h.tensor_image(&g2))
            .expect("same shape");
        checks += 1;
        ensure(direct == paired, "gluing pairing identity", round)?;

        // Products map to tensor products.
        let small_arity = rng.gen_range(0..=2);
        let small = random_fragment(&mut rng, small_arity, 2, 2);
        let prod = h.tensor_image(&f.product(&small));
        let split = h
            .tensor_image(&f)
            .tensor_product(&h.tensor_image(&small))
            .expect("same n");
        checks += 1;
        ensure(prod == split, "product multiplicativity", round)?;

        // Partition polynomial evaluates to the partition function.
        let g = random_graph(&mut rng, 3, 4, 1);
        let poly = PartitionPolynomial::of_graph(&g, n);
        checks += 1;
        ensure(
            poly.evaluate(&h) == h.partition_function(&g),
            "partition polynomial consistency",
            round,
        )?;

        // Signed-permutation equivariance of the tensor image.
        let gmap = random_signed_permutation(&mut rng, n);
        let perm: Vec<usize> = (0..n)
            .map(|c| {
                gmap.rows()
                    .iter()
                    .position(|row| !row[c].is_zero())
                    .expect("signed permutation column")
            })
            .collect();
        let negate: Vec<bool> = (0..n)
            .map(|c| gmap.rows()[perm[c]][c] == -GaussRational::one())
            .collect();
        let moved = gmap.apply(&h.tensor_image(&f)).expect("same n");
        let transformed = h
            .transform_signed(&perm, &negate)
            .expect("valid permutation");
        checks += 1;
        ensure(
            moved == transformed.tensor_image(&f),
            "signed-permutation equivariance",
            round,
        )?;
    }
    Ok(SelftestReport { rounds, checks })
}
