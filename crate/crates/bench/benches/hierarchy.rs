use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use symext::dps::{build_extension_sdp, check_extendible, ExtensionSpec};
use symext::oracle::uncompressed_extendibility;
use symext::symmetric::sym_isometry;
use symext::Family;
use symext_bench::{first_party, named, random_state};

fn levels(c: &mut Criterion) {
    let rho = random_state(&[2, 2]);
    let mut group = c.benchmark_group("check_two_qubits");
    group.sample_size(20);
    for k in [2, 3, 4, 6] {
        let spec = first_party(k, 2);
        group.bench_with_input(BenchmarkId::from_parameter(k), &spec, |b, spec| {
            b.iter(|| check_extendible(black_box(&rho), spec).unwrap())
        });
    }
    group.finish();
}

fn compressed_vs_full(c: &mut Criterion) {
    let rho = random_state(&[2, 2]);
    let spec = first_party(3, 2);
    let mut group = c.benchmark_group("compression_k3");
    group.sample_size(10);
    group.bench_function("compressed", |b| b.iter(|| check_extendible(black_box(&rho), &spec).unwrap()));
    group.bench_function("uncompressed", |b| {
        b.iter(|| uncompressed_extendibility(black_box(&rho), &spec).unwrap())
    });
    group.finish();
}

fn ppt(c: &mut Criterion) {
    let tiles = named(Family::Tiles, None);
    let spec = ExtensionSpec::new(vec![2, 1]).with_ppt("1:2".parse().unwrap());
    let mut group = c.benchmark_group("tiles_ppt");
    group.sample_size(10);
    group.bench_function("k2", |b| b.iter(|| check_extendible(black_box(&tiles), &spec).unwrap()));
    group.finish();
}

fn build(c: &mut Criterion) {
    let rho = random_state(&[2, 2, 2]);
    let spec = ExtensionSpec::new(vec![3, 3, 1]);
    c.bench_function("build_three_qubits_331", |b| {
        b.iter(|| build_extension_sdp(black_box(&rho), &spec).unwrap())
    });
    c.bench_function("sym_space_d3_k4", |b| b.iter(|| sym_isometry(black_box(3), black_box(4)).unwrap()));
}

criterion_group!(benches, levels, compressed_vs_full, ppt, build);
criterion_main!(benches);
