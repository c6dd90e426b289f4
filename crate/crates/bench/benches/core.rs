use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use posmod_bench::{t4_theory, triple_c3};
use posmod_core::analysis::{enumerate_models, pc_members, SearchBudget};
use posmod_core::logic::fragment::{FormulaFragment, FragmentContext};
use posmod_core::morphisms::find_homomorphisms;
use posmod_core::structures::{canonical_form, cycle};

fn bench_enumerate(c: &mut Criterion) {
    let theory = t4_theory();
    let budget = SearchBudget::default();
    c.bench_function("enumerate_models/t4/bound5", |b| {
        b.iter(|| enumerate_models(black_box(&theory), 5, &budget).unwrap())
    });
}

fn bench_classify(c: &mut Criterion) {
    let theory = t4_theory();
    let budget = SearchBudget::default();
    c.bench_function("pc_members/t4/bound4", |b| {
        // Flags are cached per universe, so rebuild it each iteration.
        b.iter(|| {
            let u = enumerate_models(&theory, 4, &budget).unwrap();
            pc_members(black_box(&u)).len()
        })
    });
}

fn bench_homs(c: &mut Criterion) {
    let nine = triple_c3();
    c.bench_function("find_homomorphisms/3xc3/self", |b| {
        b.iter(|| find_homomorphisms(black_box(&nine), &nine, &[], None).unwrap().len())
    });
}

fn bench_sat_table(c: &mut Criterion) {
    let c5 = cycle(5);
    let ctx = FragmentContext::new(c5.sig().clone(), FormulaFragment::new(2, 2, 3));
    c.bench_function("sat_table/c5/frag(2,2,3)", |b| {
        b.iter(|| ctx.sat_table(black_box(&c5)))
    });
}

fn bench_canonical(c: &mut Criterion) {
    let nine = triple_c3();
    c.bench_function("canonical_form/3xc3", |b| {
        b.iter(|| canonical_form(black_box(&nine)))
    });
}

criterion_group!(
    benches,
    bench_enumerate,
    bench_classify,
    bench_homs,
    bench_sat_table,
    bench_canonical
);
criterion_main!(benches);
