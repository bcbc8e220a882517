use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use meandiff::divergences::{audit_divergence_chain, DivergenceAuditConfig};
use meandiff::inequalities::{audit_chain, builtin_chain, AuditConfig};
use meandiff::Execution;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn chain_audit(c: &mut Criterion) {
    let chain = builtin_chain("thm31-43").expect("builtin");
    let mut group = c.benchmark_group("audit_chain/thm31-43");
    group.sample_size(10);
    for samples in [10_000usize, 100_000] {
        for (name, execution) in MODES {
            let cfg = AuditConfig { samples, seed: 42, execution, ..AuditConfig::default() };
            group.bench_with_input(BenchmarkId::new(name, samples), &cfg, |b, cfg| {
                b.iter(|| audit_chain(&chain, cfg).expect("audit"))
            });
        }
    }
    group.finish();
}

fn divergence_audit(c: &mut Criterion) {
    let chain = builtin_chain("thm41").expect("builtin");
    let mut group = c.benchmark_group("audit_divergence_chain/thm41");
    group.sample_size(10);
    for (name, execution) in MODES {
        let cfg = DivergenceAuditConfig { trials: 2_000, seed: 7, execution, ..DivergenceAuditConfig::default() };
        group.bench_with_input(BenchmarkId::new(name, cfg.trials), &cfg, |b, cfg| {
            b.iter(|| audit_divergence_chain(&chain, cfg).expect("audit"))
        });
    }
    group.finish();
}

criterion_group!(benches, chain_audit, divergence_audit);
criterion_main!(benches);
