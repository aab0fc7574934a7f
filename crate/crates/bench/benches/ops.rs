use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use conmat::{brauer_invariant_dim, enumerate_fragments, saturating_rank, VertexModel};
use conmat_bench::{complete_graph, isotropic_model, matching_model};

fn bench_partition_function(c: &mut Criterion) {
    let h = matching_model(5);
    let k5 = complete_graph(5);
    c.bench_function("partition_function/matching_k5", |b| {
        b.iter(|| black_box(h.partition_function(black_box(&k5))))
    });
}

fn bench_tensor_images(c: &mut Criterion) {
    let h = matching_model(4);
    let fragments = enumerate_fragments(3, 2, 3);
    c.bench_function("tensor_image/enumerated_k3", |b| {
        b.iter(|| {
            for f in &fragments {
                black_box(h.tensor_image(f));
            }
        })
    });
}

fn bench_diagram_dimension(c: &mut Criterion) {
    c.bench_function("brauer_invariant_dim/n3_k8", |b| {
        b.iter(|| black_box(brauer_invariant_dim(black_box(3), black_box(8))))
    });
}

fn bench_rank_search(c: &mut Criterion) {
    let iso = isotropic_model();
    c.bench_function("saturating_rank/isotropic_k4", |b| {
        b.iter(|| {
            black_box(saturating_rank(
                black_box(&iso),
                4,
                3,
                Some(brauer_invariant_dim(2, 4)),
                None,
            ))
        })
    });
    let zero = VertexModel::zero(2);
    c.bench_function("saturating_rank/zero_model_k6", |b| {
        b.iter(|| {
            black_box(saturating_rank(
                black_box(&zero),
                6,
                2,
                Some(brauer_invariant_dim(2, 6)),
                None,
            ))
        })
    });
}

criterion_group!(
    benches,
    bench_partition_function,
    bench_tensor_images,
    bench_diagram_dimension,
    bench_rank_search
);
criterion_main!(benches);
