//! Randomized cross-module invariants, seeded for reproducibility.

use conmat::check::{
    random_fragment, random_model, random_nonzero_scalar, random_signed_permutation, rng_from_seed,
};
use conmat::{
    gram_rank, saturating_rank, span_rank, GaussRational, OrthogonalMap, Tensor, VertexModel,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn q(v: i64) -> GaussRational {
    GaussRational::from_int(v)
}

fn random_tensor(rng: &mut ChaCha8Rng, n: usize, k: usize, entries: usize) -> Tensor {
    let mut t = Tensor::zero(n, k);
    for _ in 0..entries {
        let idx: Vec<u8> = (0..k).map(|_| rng.gen_range(0..n) as u8).collect();
        t.add_entry(idx, random_nonzero_scalar(rng));
    }
    t
}

/// A pool of exactly orthogonal maps: signed permutations and a rational
/// rotation, composed at random.
fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> OrthogonalMap {
    let mut g = random_signed_permutation(rng, n);
    if n >= 2 && rng.gen_bool(0.5) {
        // Embed the 3-4-5 rotation in the first two coordinates.
        let a = GaussRational::from_parts(3, 5, 0, 1).unwrap();
        let b = GaussRational::from_parts(4, 5, 0, 1).unwrap();
        let mut rows = conmat::linalg::identity(n);
        rows[0][0] = a.clone();
        rows[0][1] = b.clone();
        rows[1][0] = -&b;
        rows[1][1] = a;
        let rot = OrthogonalMap::new(rows).unwrap();
        g = g.compose(&rot);
    }
    g
}

#[test]
fn contraction_is_equivariant() {
    let mut rng = rng_from_seed(11);
    for _ in 0..60 {
        let n = rng.gen_range(2..=3);
        let k = rng.gen_range(2..=4);
        let entries = rng.gen_range(1..=6);
        let t = random_tensor(&mut rng, n, k, entries);
        let g = random_orthogonal(&mut rng, n);
        let i = rng.gen_range(1..k);
        let j = rng.gen_range(i + 1..=k);
        let lhs = g.apply(&t.contract(i, j).unwrap()).unwrap();
        let rhs = g.apply(&t).unwrap().contract(i, j).unwrap();
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn bilinear_form_is_orthogonally_invariant() {
    let mut rng = rng_from_seed(12);
    for _ in 0..60 {
        let n = rng.gen_range(2..=3);
        let k = rng.gen_range(1..=3);
        let ea = rng.gen_range(1..=5);
        let a = random_tensor(&mut rng, n, k, ea);
        let eb = rng.gen_range(1..=5);
        let b = random_tensor(&mut rng, n, k, eb);
        let g = random_orthogonal(&mut rng, n);
        let before = a.bilinear_form(&b).unwrap();
        let after = g
            .apply(&a)
            .unwrap()
            .bilinear_form(&g.apply(&b).unwrap())
            .unwrap();
        assert_eq!(before, after);
    }
}

#[test]
fn rank_chain_and_real_equality() {
    let mut rng = rng_from_seed(13);
    for _ in 0..40 {
        let n = rng.gen_range(1..=3);
        let k = rng.gen_range(1..=3);
        let count = rng.gen_range(0..=5);
        // Real-rational tensors: no isotropic directions, so the Gram and
        // span ranks must coincide.
        let ts: Vec<Tensor> = (0..count)
            .map(|_| {
                let mut t = Tensor::zero(n, k);
                for _ in 0..rng.gen_range(1..=5) {
                    let idx: Vec<u8> = (0..k).map(|_| rng.gen_range(0..n) as u8).collect();
                    t.add_entry(idx, q(rng.gen_range(-3..=3)));
                }
                t
            })
            .collect();
        let g = gram_rank(&ts).unwrap();
        let s = span_rank(&ts).unwrap();
        assert!(g <= s);
        assert!(s <= ts.len().min(n.pow(k as u32)));
        assert_eq!(g, s, "real-rational input");
    }
}

#[test]
fn gram_rank_monotone_under_extension() {
    let mut rng = rng_from_seed(14);
    for _ in 0..30 {
        let n = rng.gen_range(2..=3);
        let k = rng.gen_range(1..=2);
        let ts: Vec<Tensor> = (0..6)
            .map(|_| {
                let entries = rng.gen_range(1..=4);
                random_tensor(&mut rng, n, k, entries)
            })
            .collect();
        let mut last = 0;
        for m in 0..=ts.len() {
            let r = gram_rank(&ts[..m]).unwrap();
            assert!(r >= last);
            last = r;
        }
    }
}

#[test]
fn tensor_image_equivariance_for_signed_permutations() {
    let mut rng = rng_from_seed(15);
    for _ in 0..40 {
        let n = rng.gen_range(1..=3);
        let terms = rng.gen_range(1..=4);
        let h = random_model(&mut rng, n, 3, terms);
        let k = rng.gen_range(0..=3);
        let f = random_fragment(&mut rng, k, 2, 3);
        let g = random_signed_permutation(&mut rng, n);
        let perm: Vec<usize> = (0..n)
            .map(|c| g.rows().iter().position(|row| !row[c].is_zero()).unwrap())
            .collect();
        let negate: Vec<bool> = (0..n)
            .map(|c| g.rows()[perm[c]][c] == -GaussRational::one())
            .collect();
        let moved = g.apply(&h.tensor_image(&f)).unwrap();
        let transformed = h.transform_signed(&perm, &negate).unwrap();
        assert_eq!(moved, transformed.tensor_image(&f));
    }
}

#[test]
fn saturating_rank_is_monotone_in_budget() {
    let mut rng = rng_from_seed(16);
    for _ in 0..10 {
        let n = rng.gen_range(1..=2);
        let terms = rng.gen_range(1..=3);
        let h = random_model(&mut rng, n, 2, terms);
        let k = rng.gen_range(1..=2);
        let mut last = 0;
        for budget in 0..=3 {
            let r = saturating_rank(&h, k, budget, None, None);
            assert!(r.rank >= last);
            last = r.rank;
        }
    }
}

#[test]
fn kernel_combinations_glue_to_zero() {
    let mut rng = rng_from_seed(17);
    for _ in 0..10 {
        let n = rng.gen_range(1..=2);
        let terms = rng.gen_range(1..=3);
        let h = random_model(&mut rng, n, 2, terms);
        let k = rng.gen_range(1..=2);
        let fs = conmat::enumerate_fragments(k, 2, h.support_degree());
        if fs.is_empty() {
            continue;
        }
        let m = conmat::build_matrix(&h, &fs).unwrap();
        for c in m.kernel() {
            for f in &fs {
                let mut acc = GaussRational::zero();
                for (coeff, fa) in c.iter().zip(&fs) {
                    if coeff.is_zero() {
                        continue;
                    }
                    let glued = fa.glue(f).unwrap();
                    acc += &(coeff * &h.partition_function(&glued));
                }
                assert!(acc.is_zero(), "kernel vector fails to annihilate {f}");
            }
        }
    }
}

#[test]
fn circle_scaling_of_tensor_images() {
    let mut rng = rng_from_seed(18);
    for _ in 0..20 {
        let n = rng.gen_range(1..=3);
        let terms = rng.gen_range(1..=4);
        let h = random_model(&mut rng, n, 3, terms);
        let k = rng.gen_range(0..=3);
        let f = random_fragment(&mut rng, k, 2, 2);
        let with_circle = conmat::Fragment::new(
            f.graph().clone().with_circles(f.graph().circles() + 1),
            f.attachments().to_vec(),
        )
        .unwrap();
        assert_eq!(
            h.tensor_image(&with_circle),
            h.tensor_image(&f).scale(&q(n as i64))
        );
    }
}

#[test]
fn gluing_agrees_with_repeated_contraction_of_products() {
    // The gluing chain walk must coincide with the contraction route:
    // glue(F, H) is the graph left after contracting the pairs (i, k+i)
    // of the product, in any order consistent with relabeling.
    let mut rng = rng_from_seed(19);
    for _ in 0..80 {
        let k = rng.gen_range(0..=4);
        let f = random_fragment(&mut rng, k, 2, 3);
        let h = random_fragment(&mut rng, k, 2, 3);
        let glued = f.glue(&h).unwrap();
        let mut acc = f.product(&h);
        for step in 0..k {
            acc = acc.contract(1, k + 1 - step).unwrap();
        }
        assert_eq!(acc.arity(), 0);
        assert_eq!(acc.into_graph(), glued, "{f} glued with {h}");
    }
}

#[test]
fn contraction_order_independence_with_label_bookkeeping() {
    // For disjoint label pairs, contracting in either order gives the same
    // fragment once the second pair is re-mapped through the first
    // contraction's relabeling.
    let remap = |x: usize, i: usize, j: usize| x - (i < x) as usize - (j < x) as usize;
    let mut rng = rng_from_seed(21);
    for _ in 0..60 {
        let k = rng.gen_range(4..=6);
        let f = random_fragment(&mut rng, k, 3, 3);
        // Two disjoint pairs drawn from distinct labels.
        let mut labels: Vec<usize> = (1..=k).collect();
        for i in (1..labels.len()).rev() {
            labels.swap(i, rng.gen_range(0..=i));
        }
        let (a, b) = (labels[0].min(labels[1]), labels[0].max(labels[1]));
        let (c, d) = (labels[2].min(labels[3]), labels[2].max(labels[3]));
        let first = f
            .contract(a, b)
            .unwrap()
            .contract(remap(c, a, b), remap(d, a, b))
            .unwrap();
        let second = f
            .contract(c, d)
            .unwrap()
            .contract(remap(a, c, d), remap(b, c, d))
            .unwrap();
        assert_eq!(first, second, "pairs ({a},{b}) and ({c},{d}) on {f}");
    }
}

#[test]
fn fragment_text_round_trips_on_random_inputs() {
    let mut rng = rng_from_seed(22);
    for _ in 0..60 {
        let k = rng.gen_range(0..=4);
        let f = random_fragment(&mut rng, k, 3, 4);
        // Also exercise the circle lines.
        let circles = rng.gen_range(0..=2);
        let f = conmat::Fragment::new(
            f.graph().clone().with_circles(circles),
            f.attachments().to_vec(),
        )
        .unwrap();
        let text = f.to_string();
        assert_eq!(conmat::Fragment::parse(&text).unwrap(), f, "{text}");
    }
}

#[test]
fn gluing_is_symmetric_in_partition_value() {
    // glue(F, H) and glue(H, F) are isomorphic graphs, so every partition
    // function agrees on them even though the encodings may differ.
    let mut rng = rng_from_seed(20);
    for _ in 0..40 {
        let n = rng.gen_range(1..=3);
        let terms = rng.gen_range(1..=4);
        let model = random_model(&mut rng, n, 3, terms);
        let k = rng.gen_range(0..=3);
        let f = random_fragment(&mut rng, k, 2, 2);
        let h = random_fragment(&mut rng, k, 2, 2);
        assert_eq!(
            model.partition_function(&f.glue(&h).unwrap()),
            model.partition_function(&h.glue(&f).unwrap()),
            "{f} vs {h}"
        );
    }
}

#[test]
fn normalized_model_has_the_same_certified_ranks() {
    // Normalizing the degenerate one-point spin model yields evaluation at
    // the origin; since the partition functions agree, the two models share
    // one connection matrix, and rank searches must certify the same values.
    use conmat::{brauer_invariant_dim, normalize_spin};
    let i = GaussRational::i();
    let normalized = normalize_spin(&[vec![q(1), i.clone()]], &[q(1)], 2, 3).unwrap();
    let original = VertexModel::from_spin(vec![vec![q(1), i]], vec![q(1)], 2, 3).unwrap();
    for k in 1..=4usize {
        let target = brauer_invariant_dim(2, k);
        let a = saturating_rank(&original, k, 3, Some(target), None);
        let b = saturating_rank(normalized.model(), k, 3, Some(target), None);
        assert!(a.certified && b.certified, "k={k}: {a} / {b}");
        assert_eq!(a.rank, b.rank, "k={k}");
        assert_eq!(a.rank, target, "k={k}");
    }
}

#[test]
fn spin_truncation_evaluates_like_its_support() {
    // For a spin model, support lookups within the truncation agree with the
    // closed-form evaluation.
    let pts = vec![vec![q(2), q(1)], vec![q(0), q(-1)]];
    let wts = vec![q(1), q(3)];
    let h = VertexModel::from_spin(pts, wts, 2, 5).unwrap();
    for (alpha, v) in h.support() {
        assert_eq!(&h.eval(alpha), v);
    }
}

#[test]
fn bilinear_form_equals_iterated_contraction() {
    // The induced form on order-k tensors factors as the tensor product
    // followed by k slot contractions pairing slot 1 with the matching slot
    // of the second factor.
    let mut rng = rng_from_seed(23);
    for _ in 0..60 {
        let n = rng.gen_range(1..=3);
        let k = rng.gen_range(1..=4);
        let ea = rng.gen_range(1..=5);
        let a = random_tensor(&mut rng, n, k, ea);
        let eb = rng.gen_range(1..=5);
        let b = random_tensor(&mut rng, n, k, eb);
        let mut w = a.tensor_product(&b).unwrap();
        for step in 0..k {
            w = w.contract(1, k + 1 - step).unwrap();
        }
        assert_eq!(w.scalar_value().unwrap(), a.bilinear_form(&b).unwrap());
    }
}

#[test]
fn partition_function_is_invariant_under_signed_permutations() {
    let mut rng = rng_from_seed(24);
    for _ in 0..40 {
        let n = rng.gen_range(1..=3);
        let terms = rng.gen_range(1..=4);
        let h = random_model(&mut rng, n, 3, terms);
        let g = random_signed_permutation(&mut rng, n);
        let perm: Vec<usize> = (0..n)
            .map(|c| g.rows().iter().position(|row| !row[c].is_zero()).unwrap())
            .collect();
        let negate: Vec<bool> = (0..n)
            .map(|c| g.rows()[perm[c]][c] == -GaussRational::one())
            .collect();
        let moved = h.transform_signed(&perm, &negate).unwrap();
        let graph = conmat::check::random_graph(&mut rng, 3, 4, 1);
        assert_eq!(
            moved.partition_function(&graph),
            h.partition_function(&graph),
            "{graph}"
        );
    }
}
