use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use loqc::cluster::{tree_loss_sim, LossTree};
use loqc::linalg::cr;
use loqc::teleport::teleport_with;
use loqc::Exec;

fn modes() -> [(&'static str, Exec); 2] {
    [("parallel", Exec::Parallel), ("sequential", Exec::Sequential)]
}

fn loss_tree(c: &mut Criterion) {
    let tree = LossTree::new(vec![3, 3, 3], 0.9).unwrap();
    let mut group = c.benchmark_group("tree_loss_sim");
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| tree_loss_sim(&tree, 20_000, 1, exec).unwrap())
        });
    }
    group.finish();
}

fn teleport(c: &mut Criterion) {
    let mut group = c.benchmark_group("teleport_n5");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| teleport_with([cr(0.6), cr(0.8)], 5, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, loss_tree, teleport);
criterion_main!(benches);
