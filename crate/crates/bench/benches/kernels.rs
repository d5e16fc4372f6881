use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use hyperslice::fields::{field_of_order, Elem};
use hyperslice::irreddetect::{census_row, CensusConfig};
use hyperslice::polyexpr::{make_vars, parse_poly, CompiledSystem, Scratch};
use hyperslice::projgeom::{enum_hyperplanes, enum_points, incident};
use hyperslice::variety::{count_points, Ambient, AmbientKind, ConstructibleSet, CountOptions, MorphismToPn};

fn field_mul(c: &mut Criterion) {
    let mut group = c.benchmark_group("field_mul");
    for q in [7u64, 256, 3u64.pow(7)] {
        let f = field_of_order(q).unwrap();
        let elems: Vec<Elem> = f.elements().take(1024).collect();
        group.throughput(Throughput::Elements(elems.len() as u64));
        group.bench_with_input(BenchmarkId::new("tables", q), &elems, |b, es| {
            b.iter(|| es.iter().fold(Elem::ONE, |acc, &e| f.add(f.mul(acc, e), Elem::ONE)))
        });
        group.bench_with_input(BenchmarkId::new("reference", q), &elems, |b, es| {
            b.iter(|| es.iter().fold(Elem::ONE, |acc, &e| f.ref_add(f.ref_mul(acc, e), Elem::ONE)))
        });
    }
    group.finish();
}

fn compiled_eval(c: &mut Criterion) {
    let f = field_of_order(49).unwrap();
    let v = make_vars(&["x", "y", "z", "w"]).unwrap();
    let polys =
        vec![parse_poly("x^3*y + g*z^2*w - x*y*z*w + 3", &v, &f).unwrap(), parse_poly("x*w - y*z", &v, &f).unwrap()];
    let sys = CompiledSystem::new(&polys, 4, &f).unwrap();
    let pts: Vec<[Elem; 4]> =
        (0..512u32).map(|i| [Elem(i % 49), Elem((i * 7) % 49), Elem((i * 13) % 49), Elem((i * 31) % 49)]).collect();
    c.bench_function("compiled_eval_gf49", |b| {
        let mut scratch = Scratch::default();
        b.iter(|| {
            let mut acc = 0u32;
            for p in &pts {
                sys.load(p, &mut scratch);
                acc ^= sys.eval(0, &scratch).0 ^ sys.eval(1, &scratch).0;
            }
            black_box(acc)
        })
    });
}

fn incidence(c: &mut Criterion) {
    let f = field_of_order(5).unwrap();
    let pts = enum_points(&f, 3);
    let hs = enum_hyperplanes(&f, 3);
    c.bench_function("incidence_p3_f5", |b| {
        b.iter(|| hs.iter().map(|h| pts.iter().filter(|y| incident(&f, y, h).unwrap()).count()).sum::<usize>())
    });
}

fn quadric(q: u64) -> (ConstructibleSet, MorphismToPn) {
    let f = field_of_order(q).unwrap();
    let v = make_vars(&["x0", "x1", "x2", "x3"]).unwrap();
    let x = ConstructibleSet::new(
        &f,
        Ambient::new(AmbientKind::Projective, v.clone()).unwrap(),
        vec![parse_poly("x0*x3 - x1*x2", &v, &f).unwrap()],
        vec![],
    )
    .unwrap();
    let phi = MorphismToPn::inclusion(&x).unwrap();
    (x, phi)
}

fn counting(c: &mut Criterion) {
    let mut group = c.benchmark_group("count_points_quadric");
    group.sample_size(10);
    for m in [1u32, 2] {
        let (x, _) = quadric(7);
        group.bench_with_input(BenchmarkId::from_parameter(m), &m, |b, &m| {
            b.iter(|| count_points(&x, m, &CountOptions::default()).unwrap().count)
        });
    }
    group.finish();
}

fn census(c: &mut Criterion) {
    let mut group = c.benchmark_group("census_row");
    group.sample_size(10);
    let f = field_of_order(5).unwrap();
    let v = make_vars(&["x1", "x2", "y"]).unwrap();
    let x = ConstructibleSet::new(
        &f,
        Ambient::new(AmbientKind::Affine, v.clone()).unwrap(),
        vec![parse_poly("y^2 - x1", &v, &f).unwrap()],
        vec![],
    )
    .unwrap();
    let comps = ["1", "x1", "x2"].iter().map(|s| parse_poly(s, &v, &f).unwrap()).collect();
    let phi = MorphismToPn::new(&x, comps).unwrap();
    group
        .bench_function("parabola_q5", |b| b.iter(|| census_row(&x, &phi, &CensusConfig::new(2, 0)).unwrap().very_bad));
    let (x, phi) = quadric(5);
    group.bench_function("quadric_q5", |b| b.iter(|| census_row(&x, &phi, &CensusConfig::new(2, 1)).unwrap().very_bad));
    group.finish();
}

criterion_group!(benches, field_mul, compiled_eval, incidence, counting, census);
criterion_main!(benches);
