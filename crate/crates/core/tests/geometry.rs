use hyperslice::fields::{field_of_order, Elem, Field};
use hyperslice::irreddetect::{census_row, classify, lw_estimate, CensusConfig, Mode, Verdict};
use hyperslice::polyexpr::{make_vars, parse_poly};
use hyperslice::projgeom::{
    enum_hyperplanes, enum_points, incident, projective_count, span_dim, span_locus_dim, ProjPoint, ProjectiveSpace,
};
use hyperslice::slicestats::{exact_stats, predicted_stats, Geometric};
use hyperslice::variety::{
    count_points, fiber_profile, slice, Ambient, AmbientKind, ConstructibleSet, CountOptions, MorphismToPn,
};
use proptest::prelude::*;

fn set(f: &Field, kind: AmbientKind, vars: &[&str], eqs: &[&str]) -> ConstructibleSet {
    let v = make_vars(vars).unwrap();
    let eqs = eqs.iter().map(|s| parse_poly(s, &v, f).unwrap()).collect();
    ConstructibleSet::new(f, Ambient::new(kind, v).unwrap(), eqs, vec![]).unwrap()
}

fn morphism(x: &ConstructibleSet, comps: &[&str]) -> MorphismToPn {
    let c = comps.iter().map(|s| parse_poly(s, x.ambient().vars(), x.field()).unwrap()).collect();
    MorphismToPn::new(x, c).unwrap()
}

fn parabola(q: u64) -> (ConstructibleSet, MorphismToPn) {
    let f = field_of_order(q).unwrap();
    let x = set(&f, AmbientKind::Affine, &["x1", "x2", "y"], &["y^2 - x1"]);
    let phi = morphism(&x, &["1", "x1", "x2"]);
    (x, phi)
}

fn blowup(q: u64) -> (ConstructibleSet, MorphismToPn) {
    let f = field_of_order(q).unwrap();
    let x = set(&f, AmbientKind::Affine, &["x", "t", "s"], &[]);
    let phi = morphism(&x, &["1", "x", "x*t", "x*s"]);
    (x, phi)
}

fn quadric(q: u64) -> (ConstructibleSet, MorphismToPn) {
    let f = field_of_order(q).unwrap();
    let x = set(&f, AmbientKind::Projective, &["x0", "x1", "x2", "x3"], &["x0*x3 - x1*x2"]);
    let phi = MorphismToPn::inclusion(&x).unwrap();
    (x, phi)
}

type Maker = fn(u64) -> (ConstructibleSet, MorphismToPn);

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

#[test]
fn counts_and_profiles_do_not_depend_on_workers() {
    let (x, phi) = blowup(5);
    let reference = in_pool(1, || {
        let fp = fiber_profile(&x, &phi, 2, &CountOptions::default()).unwrap();
        (fp.collision_sum, fp.fibers.len(), census_row(&x, &phi, &CensusConfig::new(3, 0)).unwrap())
    });
    for k in [2, 8] {
        let other = in_pool(k, || {
            let fp = fiber_profile(&x, &phi, 2, &CountOptions::default()).unwrap();
            (fp.collision_sum, fp.fibers.len(), census_row(&x, &phi, &CensusConfig::new(3, 0)).unwrap())
        });
        assert_eq!(other, reference);
    }
}

#[test]
fn geometric_exactness_for_small_q() {
    let makers: [Maker; 3] = [parabola, blowup, quadric];
    for make in makers {
        for q in [3u64, 5] {
            let (x, phi) = make(q);
            let s = exact_stats(&Geometric { x: &x, phi: &phi }, &CountOptions::default()).unwrap();
            let (mu, var) = predicted_stats(s.domain_size, s.collision_sum, q, phi.target_dim() as u32).unwrap();
            assert_eq!((s.mean, s.variance), (mu, var));
        }
    }
}

#[test]
fn parabola_census_is_q_and_splits_by_residue() {
    for q in [3u64, 5, 7, 9] {
        let (x, phi) = parabola(q);
        let row = census_row(&x, &phi, &CensusConfig::new(2, 0)).unwrap();
        assert_eq!(row.very_bad, q);
        assert_eq!(row.good + row.very_bad + row.equals_x, row.total_hyperplanes);
        // (q-1)/2 square slices give two lines, (q-1)/2 nonsquare ones are empty over F_q, plus 1 = 0
        assert_eq!(row.count_high, (q - 1) / 2);
        assert_eq!(row.count_low, (q - 1) / 2);
        assert_eq!(row.empty, 1);
        assert!(row.very_bad_fraction * q as f64 <= 4.0);
    }
}

#[test]
fn quadric_very_bad_are_tangent_planes() {
    for q in [3u64, 5] {
        let (x, phi) = quadric(q);
        let f = x.field().clone();
        let pts = enum_points(&f, 3);
        let on_quadric: Vec<&ProjPoint> = pts
            .iter()
            .filter(|p| {
                let c = p.coords();
                f.sub(f.mul(c[0], c[3]), f.mul(c[1], c[2])).is_zero()
            })
            .collect();
        let mut tangent = 0;
        for h in enum_hyperplanes(&f, 3) {
            // the tangent plane at y is [y3 : -y2 : -y1 : y0]
            let c = h.coeffs();
            let pole = ProjPoint::new(&f, &[c[3], f.neg(c[2]), f.neg(c[1]), c[0]]).unwrap();
            let is_tangent = on_quadric.contains(&&pole);
            let v = classify(&x, &phi, &h, 2, Mode::Threshold, 2, &CountOptions::default()).unwrap();
            assert_eq!(v.verdict.is_very_bad(), is_tangent, "{h}");
            tangent += u64::from(is_tangent);
        }
        assert_eq!(tangent, (q + 1) * (q + 1));
    }
}

#[test]
fn blowup_very_bad_split() {
    // c0 = 0 and (c2, c3) != 0 gives x * L = 0; [1:0:0:0] is empty; [0:1:0:0] is the plane x = 0
    for q in [3u64, 5] {
        let (x, phi) = blowup(q);
        let f = x.field().clone();
        let mut expected = 0;
        for h in enum_hyperplanes(&f, 3) {
            let c = h.coeffs();
            let reducible = c[0].is_zero() && !(c[2].is_zero() && c[3].is_zero());
            let empty = c[1..].iter().all(|e| e.is_zero());
            let v = classify(&x, &phi, &h, 3, Mode::Threshold, 2, &CountOptions::default()).unwrap();
            assert_eq!(v.verdict.is_very_bad(), reducible || empty, "{h}");
            expected += u64::from(reducible || empty);
        }
        assert_eq!(expected, q * q + q + 1);
    }
}

#[test]
fn equals_x_for_degenerate_image() {
    // phi(X) inside the coordinate hyperplane c3 = 0
    let f = field_of_order(5).unwrap();
    let x = set(&f, AmbientKind::Affine, &["a", "b"], &[]);
    let phi = morphism(&x, &["1", "a", "b", "0"]);
    let row = census_row(&x, &phi, &CensusConfig::new(2, 1)).unwrap();
    assert_eq!(row.equals_x, 1);
    let h = ProjectiveSpace::new(&f, 3).hyperplane(155);
    assert_eq!(h.coeffs(), &[Elem(0), Elem(0), Elem(0), Elem(1)]);
    let v = classify(&x, &phi, &h, 2, Mode::Threshold, 2, &CountOptions::default()).unwrap();
    assert_eq!(v.verdict, Verdict::EqualsX);
}

#[test]
fn lang_weil_sanity() {
    // (scenario, r, C)
    let cases: [(Maker, u32, f64); 3] = [(parabola, 2, 1.0), (blowup, 3, 1.0), (quadric, 2, 2.0)];
    for (make, r, c) in cases {
        for q in [3u64, 5] {
            let (x, _) = make(q);
            let e = lw_estimate(&x, 2, Some(r), &CountOptions::default()).unwrap();
            if q >= 5 {
                assert_eq!(e.components, 1);
            }
            for (i, &n) in e.counts.iter().enumerate() {
                let qm = (q as f64).powi(i as i32 + 1);
                assert!((n as f64 - qm.powi(r as i32)).abs() <= c * qm.powf(r as f64 - 0.5));
            }
        }
    }
}

#[test]
fn slices_never_exceed_x() {
    let (x, phi) = parabola(5);
    let total = count_points(&x, 1, &CountOptions::default()).unwrap().count;
    for h in enum_hyperplanes(x.field(), 2) {
        assert!(count_points(&slice(&x, &phi, &h).unwrap(), 1, &CountOptions::default()).unwrap().count <= total);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]
    #[test]
    fn locus_dimension_matches_enumeration(ranks in prop::collection::vec(0u64..40, 1..7)) {
        let f = field_of_order(3).unwrap();
        let space = ProjectiveSpace::new(&f, 3);
        let pts: Vec<ProjPoint> = ranks.iter().map(|&r| space.point(r)).collect();
        let span = span_dim(&f, &pts).unwrap();
        let locus = span_locus_dim(&f, &pts).unwrap();
        prop_assert_eq!(locus, (3 - span) - 1);
        let containing = enum_hyperplanes(&f, 3)
            .iter()
            .filter(|h| pts.iter().all(|p| incident(&f, p, h).unwrap()))
            .count() as u64;
        prop_assert_eq!(containing, projective_count(3, locus));
    }
}
