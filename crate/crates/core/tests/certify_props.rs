use dmlab_core::certify::{
    certify_fat_alpha, example54_histogram_mass, example54_mass, lemma43_find_m,
    product_bracket, thm11_bound, thm11_terms, FatConclusion,
};
use dmlab_core::doubling::{doubling_scan, lemma21_fit};
use dmlab_core::geom::{Ambient, CutOutConfig, RationalInterval};
use dmlab_core::measure::TreeMeasure;
use dmlab_core::rational::{int, rat, to_f64_lossy, Rational};
use dmlab_core::seq::{log_floor_exponent, SequenceFamily};
use proptest::prelude::*;

fn exact_partial(f: &SequenceFamily, n: u64) -> Rational {
    (1..=n).fold(int(1), |acc, i| acc * (int(1) - f.term_exact(i).unwrap()))
}

#[test]
fn product_bracket_contains_deeper_truncations() {
    let fams = [
        SequenceFamily::geometric(rat(1, 2), rat(1, 2)).unwrap(),
        SequenceFamily::geometric(rat(1, 3), rat(2, 3)).unwrap(),
        SequenceFamily::power(int(1), int(2), int(1)).unwrap(),
        SequenceFamily::log_floor(rat(1, 3)).unwrap(),
    ];
    for f in &fams {
        for n in [8u64, 20, 40] {
            let Ok(b) = product_bracket(f, n) else { continue };
            for deeper in [n + 16, n + 40, n + 120] {
                let v = exact_partial(f, deeper);
                assert!(b.lower() <= v, "{f:?} n = {n} deeper = {deeper}");
            }
            // Deeper truncations decrease to the limit, which the bracket holds.
            let far = exact_partial(f, n + 120);
            assert!(far <= exact_partial(f, n));
            assert!(b.lower() <= b.upper());
        }
    }
}

#[test]
fn example54_closed_form_equals_enumeration() {
    for p in [rat(1, 4), rat(1, 3), rat(1, 2), rat(2, 3)] {
        for stages in 1..=12 {
            let r = example54_mass(&p, stages).unwrap();
            assert!(r.closed_form.partial.is_exact());
            assert_eq!(r.closed_form.partial.lo, r.brute_force, "p = {p} stages = {stages}");
        }
    }
}

#[test]
fn example54_histogram_against_product_oracle() {
    let p = rat(1, 4);
    let mut prod = int(1);
    for j in 1..=20u64 {
        prod *= int(1) - dmlab_core::rational::powi(&p, log_floor_exponent(j) as i64);
        assert_eq!(example54_histogram_mass(&p, j).unwrap(), prod);
    }
}

/// Σ_{m>=N} m^{-δ} in floating point: direct terms, then Euler–Maclaurin.
fn zeta_tail_f64(n: u64, delta: f64) -> f64 {
    let cut = n + 20_000;
    let mut s = 0.0;
    for m in n..cut {
        s += (m as f64).powf(-delta);
    }
    let c = cut as f64;
    s + c.powf(1.0 - delta) / (delta - 1.0) + 0.5 * c.powf(-delta)
}

#[test]
fn lemma43_minimality() {
    for (eps, delta, gamma) in [(rat(1, 1), int(2), rat(1, 2)), (rat(1, 10), int(3), int(1)), (rat(1, 4), rat(5, 2), rat(1, 3))] {
        let r = lemma43_find_m(&eps, &delta, &gamma).unwrap();
        let (e, d, g) = (to_f64_lossy(&eps), to_f64_lossy(&delta), to_f64_lossy(&gamma));
        let holds = |n: u64| zeta_tail_f64(n, d) < e * (n as f64).powf(-g);
        for n in r.m..=4 * r.m {
            assert!(holds(n), "N = {n} for {eps} {delta} {gamma}");
        }
        assert_eq!(r.verified, (r.m..=4 * r.m).collect::<Vec<_>>());
        if r.m > 1 {
            assert!(r.fails_below);
            assert!(!holds(r.m - 1));
        }
    }
}

fn packed(scale: Rational, count: u64) -> CutOutConfig {
    let fam = SequenceFamily::geometric(rat(1, 8), rat(1, 2)).unwrap();
    let mut at = int(0);
    let mut balls = Vec::new();
    for i in 1..=count {
        let d = fam.term_exact(i).unwrap() * &scale;
        balls.push(RationalInterval::closed(at.clone(), &at + &d).unwrap());
        at += d;
    }
    CutOutConfig::new(balls, fam, Ambient::UnitInterval).unwrap()
}

#[test]
fn thm11_monotone_in_gap() {
    let m = TreeMeasure::lebesgue();
    let mut rep = doubling_scan(&m, 6).unwrap();
    rep.lemma21_fit = Some(lemma21_fit(&m, 6, &rep, &int(1)).unwrap());
    let base = thm11_bound(&packed(int(1), 32), &rep, &int(1), 32, &rat(1, 4)).unwrap();
    let wider = thm11_bound(&packed(rat(1, 2), 32), &rep, &int(1), 32, &rat(1, 4)).unwrap();
    assert!(wider.gap >= base.gap);
    assert!(wider.value >= base.value);
    assert_eq!(base.conclusion, FatConclusion::Positive);
    assert_eq!(wider.conclusion, FatConclusion::Positive);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fat_bound_shrinks_as_constant_grows(k in 1i64..12, num in 1i64..5) {
        let f = SequenceFamily::geometric(rat(num, 8), rat(1, 2)).unwrap();
        let a = certify_fat_alpha(&f, &int(1), &int(k), 32).unwrap();
        let b = certify_fat_alpha(&f, &int(1), &int(k + 1), 32).unwrap();
        prop_assert!(b.n0 >= a.n0);
        // Comparable only over the same index range: a later N0 drops factors.
        if a.n0 == b.n0 {
            prop_assert!(b.bound.lower() <= a.bound.lower());
            prop_assert!(b.bound.upper() <= a.bound.upper());
        }
    }

    #[test]
    fn thm11_tail_grows_with_cp(cp in 1i64..200, extra in 1i64..50, n in 2u64..64) {
        let (c1, c2, r, s, t, p) = (rat(1, 2), int(2), int(1), int(1), int(1), rat(1, 4));
        let (m1, t1) = thm11_terms(&c1, &c2, &r, &s, &t, &p, n, &rat(cp, 10));
        let (m2, t2) = thm11_terms(&c1, &c2, &r, &s, &t, &p, n, &rat(cp + extra, 10));
        prop_assert_eq!(m1.clone(), m2.clone());
        prop_assert!(t2 >= t1);
        prop_assert!(&m2 - &t2 <= &m1 - &t1);
    }
}
