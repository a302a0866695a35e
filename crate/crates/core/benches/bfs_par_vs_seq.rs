use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use cuspidal::cusped::CuspedGraph;
use cuspidal::fixtures;
use cuspidal::par;

fn sources(space: &CuspedGraph, n: usize) -> Vec<u32> {
    let step = (space.len() / n).max(1);
    (0..space.len()).step_by(step).take(n).map(|v| v as u32).collect()
}

fn eccentricity(space: &CuspedGraph, v: u32) -> u32 {
    space.bfs(v).into_iter().filter(|&d| d != u32::MAX).max().unwrap_or(0)
}

fn bfs_rows(c: &mut Criterion) {
    let mut group = c.benchmark_group("bfs_rows");
    group.sample_size(10);
    let cases = [
        ("free_rel_a_r8", CuspedGraph::build(&fixtures::free_rel_a(), 8, 4).unwrap()),
        ("surface_r4", CuspedGraph::build(&fixtures::surface(), 4, 4).unwrap()),
    ];
    for (name, space) in &cases {
        let src = sources(space, 32);
        group.bench_with_input(BenchmarkId::new("sequential", name), &src, |b, src| {
            b.iter(|| black_box(src.iter().map(|&v| eccentricity(space, v)).collect::<Vec<_>>()))
        });
        let label = if par::is_parallel() { "rayon" } else { "par_fallback" };
        group.bench_with_input(BenchmarkId::new(label, name), &src, |b, src| {
            b.iter(|| black_box(par::map(src, |&v| eccentricity(space, v))))
        });
    }
    group.finish();
}

criterion_group!(benches, bfs_rows);
criterion_main!(benches);
