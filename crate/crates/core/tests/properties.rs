use std::sync::LazyLock;

use ditop::certs::{ex54_mul, Ex54Element, H};
use ditop::constructions::{
    reduced_product, semidirect_left, tychonoff_product, zero_extension, Action, ReducedProductSpec,
};
use ditop::finsg::{is_closed_set, is_homomorphism};
use ditop::fintop::{generate_from_subbase, is_continuous, preserves_specialization, validate_topology};
use ditop::hm::{hm_apply_unit, hm_mul, random_step_function};
use ditop::search::{
    canonical_key, enumerate_semigroups, enumerate_topologies, enumerate_unostructures, EnumerationTask, Filter, What,
};
use ditop::unocore::{canonical_uno_from_inverse, dicontinuity_oracle, is_ditopological, validate_uno};
use ditop::{FiniteSemigroup, FiniteTopology, PointSet, Side, UnoStructure};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

static TOPS: LazyLock<Vec<Vec<FiniteTopology>>> = LazyLock::new(|| (0..=4).map(enumerate_topologies).collect());
static SGS: LazyLock<Vec<Vec<FiniteSemigroup>>> = LazyLock::new(|| (0..=4).map(enumerate_semigroups).collect());
static LEFT4: LazyLock<Vec<UnoStructure>> =
    LazyLock::new(|| enumerate_unostructures(&EnumerationTask::new(4, What::LeftUnos)).unwrap());
static SMALL: LazyLock<Vec<UnoStructure>> = LazyLock::new(|| {
    let mut v = Vec::new();
    for n in 1..=2 {
        for w in [What::LeftUnos, What::RightUnos, What::Unos] {
            v.extend(enumerate_unostructures(&EnumerationTask::new(n, w)).unwrap());
        }
    }
    v
});
static GROUPS: LazyLock<Vec<UnoStructure>> = LazyLock::new(|| {
    (1..=4)
        .flat_map(|n| {
            enumerate_unostructures(&EnumerationTask::new(n, What::InverseUnos).with_filters(&[Filter::Group])).unwrap()
        })
        .collect()
});

fn topology() -> impl Strategy<Value = FiniteTopology> {
    (1usize..=4).prop_flat_map(|n| (0..TOPS[n].len()).prop_map(move |i| TOPS[n][i].clone()))
}

fn semigroup() -> impl Strategy<Value = FiniteSemigroup> {
    (1usize..=4).prop_flat_map(|n| (0..SGS[n].len()).prop_map(move |i| SGS[n][i].clone()))
}

fn pick<'a>(xs: &'a LazyLock<Vec<UnoStructure>>) -> impl Strategy<Value = UnoStructure> + 'a {
    (0..xs.len()).prop_map(move |i| xs[i].clone())
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn open_family_round_trips(t in topology()) {
        let fam = t.to_open_family();
        for a in &fam.opens {
            for b in &fam.opens {
                prop_assert!(fam.opens.contains(&(a | b)));
                prop_assert!(fam.opens.contains(&(a & b)));
            }
        }
        prop_assert_eq!(validate_topology(&fam).unwrap(), t);
    }

    #[test]
    fn continuity_forms_agree(
        (dom, cod, f) in (topology(), topology()).prop_flat_map(|(d, c)| {
            let (n, m) = (d.len(), c.len());
            (Just(d), Just(c), proptest::collection::vec(0..m, n))
        })
    ) {
        prop_assert_eq!(is_continuous(&f, &dom, &cod).unwrap(), preserves_specialization(&f, &dom, &cod).unwrap());
    }

    #[test]
    fn product_preorder_is_componentwise(x in topology(), y in topology()) {
        let (px, py, p) = (x.specialization_preorder(), y.specialization_preorder(), x.product(&y).specialization_preorder());
        let m = y.len();
        for a in 0..x.len() * m {
            for b in 0..x.len() * m {
                prop_assert_eq!(p.le(a, b), px.le(a / m, b / m) && py.le(a % m, b % m));
            }
        }
    }

    #[test]
    fn subbase_generates_the_coarsest_topology(
        (n, sets) in (1usize..=4).prop_flat_map(|n| (Just(n), proptest::collection::vec(0u64..1 << n, 0..4)))
    ) {
        let sets: Vec<PointSet> = sets.into_iter().map(PointSet::from_mask).collect();
        let t = generate_from_subbase(n, &sets).unwrap();
        prop_assert!(sets.iter().all(|s| t.is_open(s)));
        for other in TOPS[n].iter().filter(|o| sets.iter().all(|s| o.is_open(s))) {
            prop_assert!(t.opens().iter().all(|o| other.is_open(o)));
        }
    }

    #[test]
    fn divisions_match_the_table(s in semigroup(), ma in 0u64..16, mb in 0u64..16) {
        let n = s.len();
        for a in 0..n {
            for b in 0..n {
                let want: PointSet = (0..n).filter(|&x| s.mul(a, x) == b).collect();
                prop_assert_eq!(s.left_division(a, b), want);
                let want: PointSet = (0..n).filter(|&x| s.mul(x, a) == b).collect();
                prop_assert_eq!(s.right_division(b, a), want);
            }
        }
        let (a, b) = (PointSet::from_mask(ma & ((1 << n) - 1)), PointSet::from_mask(mb & ((1 << n) - 1)));
        let union = a.iter().flat_map(|x| b.iter().map(move |y| (x, y)))
            .fold(PointSet::new(), |acc, (x, y)| acc.union(&s.left_division(x, y)));
        prop_assert_eq!(s.set_left_division(&a, &b), union);
    }

    #[test]
    fn inverse_idempotents(s in semigroup()) {
        if let Ok(inv) = s.inverse_structure() {
            let e = s.idempotents();
            let left: PointSet = (0..s.len()).map(|x| s.mul(x, inv.inv(x))).collect();
            let right: PointSet = (0..s.len()).map(|x| s.mul(inv.inv(x), x)).collect();
            prop_assert_eq!(&left, &e);
            prop_assert_eq!(&right, &e);
            for a in e.iter() {
                for b in e.iter() {
                    prop_assert_eq!(s.mul(a, b), s.mul(b, a));
                }
            }
        }
    }

    #[test]
    fn group_divisions_are_singletons(s in semigroup()) {
        if s.is_group() {
            for a in 0..s.len() {
                for b in 0..s.len() {
                    prop_assert_eq!(s.left_division(a, b).len(), 1);
                    prop_assert_eq!(s.right_division(b, a).len(), 1);
                }
            }
        }
    }

    #[test]
    fn fast_criterion_matches_oracle_at_four(u in pick(&LEFT4)) {
        let rep = is_ditopological(&u).unwrap();
        for p in &rep.sides[0].points {
            prop_assert_eq!(dicontinuity_oracle(u.sg(), u.top(), Side::Left, u.lam().unwrap(), p.point), p.pass);
        }
        let op = u.opposite();
        let rep = is_ditopological(&op).unwrap();
        for p in &rep.sides[0].points {
            prop_assert_eq!(dicontinuity_oracle(op.sg(), op.top(), Side::Right, op.rho().unwrap(), p.point), p.pass);
        }
    }

    #[test]
    fn canonical_key_ignores_relabeling((u, perm) in pick(&LEFT4).prop_flat_map(|u| { let n = u.len(); (Just(u), permutation(n)) })) {
        let n = u.len();
        let mut inv = vec![0; n];
        for (x, &p) in perm.iter().enumerate() {
            inv[p] = x;
        }
        let table = (0..n * n).map(|i| perm[u.sg().mul(inv[i / n], inv[i % n])]).collect();
        let sg = FiniteSemigroup::from_flat(table, None).unwrap();
        let top = FiniteTopology::from_min_nbhds((0..n).map(|a| u.top().min_nbhd(inv[a]).iter().map(|y| perm[y]).collect()).collect()).unwrap();
        let lam = (0..n).map(|a| perm[u.lam().unwrap()[inv[a]]]).collect();
        let v = validate_uno(sg, top, Some(lam), None).unwrap();
        prop_assert_eq!(canonical_key(&v), canonical_key(&u));
    }

    #[test]
    fn collapse_is_a_surjective_homomorphism(x in pick(&SMALL), y in pick(&SMALL), k in any::<prop::sample::Index>()) {
        let specs: Vec<_> = (0..1u64 << x.len())
            .map(|m| ReducedProductSpec { x: x.clone(), y: y.clone(), ideal: PointSet::from_mask(m) })
            .filter(|s| s.check().is_ok())
            .collect();
        prop_assume!(!specs.is_empty());
        let spec = &specs[k.index(specs.len())];
        let r = reduced_product(spec).unwrap();
        let prod = tychonoff_product(&[x, y]).unwrap();
        prop_assert!(is_homomorphism(&r.collapse, prod.sg(), r.structure.sg()));
        let image: PointSet = r.collapse.iter().collect();
        prop_assert_eq!(image.len(), r.structure.len());
        prop_assert!(is_continuous(&r.collapse, prod.top(), r.structure.top()).unwrap());
    }

    #[test]
    fn zero_extension_shape(g in pick(&GROUPS)) {
        let z = zero_extension(&g).unwrap();
        prop_assert_eq!(z.len(), g.len() + 1);
        let e = g.sg().identity().unwrap();
        prop_assert_eq!(z.sg().idempotents(), [0, 1 + e].into_iter().collect::<PointSet>());
        prop_assert!(is_closed_set(z.top(), &PointSet::singleton(0)));
    }

    #[test]
    fn trivial_semidirect_is_the_product(s in pick(&SMALL), f in pick(&SMALL)) {
        prop_assume!(s.lam().is_some() && f.lam().is_some());
        let (s, f) = (s.restrict_sides(&[Side::Left]), f.restrict_sides(&[Side::Left]));
        let sd = semidirect_left(&s, &f, &Action::trivial(f.len(), s.len())).unwrap();
        let p = tychonoff_product(&[s, f]).unwrap();
        prop_assert_eq!(canonical_key(&sd), canonical_key(&p));
    }

    #[test]
    fn hm_product_is_associative_with_exact_unit(seed in any::<u64>(), which in 0usize..3) {
        let base = [ditop::fixtures::discrete_z2(), ditop::fixtures::sierp_2(), ditop::fixtures::zeroext_z2()][which].clone();
        let n = base.len();
        let all: Vec<usize> = (0..n).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, g, h) = (
            random_step_function(&mut rng, n, &all),
            random_step_function(&mut rng, n, &all),
            random_step_function(&mut rng, n, &all),
        );
        let sg = base.sg();
        let l = hm_mul(sg, &hm_mul(sg, &f, &g).unwrap(), &h).unwrap();
        let r = hm_mul(sg, &f, &hm_mul(sg, &g, &h).unwrap()).unwrap();
        prop_assert_eq!(l, r);
        let lf = hm_apply_unit(base.lam().unwrap(), &f);
        prop_assert_eq!(hm_mul(sg, &lf, &f).unwrap(), f.clone());
        let rf = hm_apply_unit(base.rho().unwrap(), &f);
        prop_assert_eq!(hm_mul(sg, &f, &rf).unwrap(), f);
    }

    #[test]
    fn ex54_product_is_associative_and_commutative(
        xs in proptest::collection::vec((0u64..12, any::<bool>()), 3)
    ) {
        let el = |(k, h): (u64, bool)| {
            let s = if h { H::H } else { H::E };
            if k == 0 { Ex54Element::zero(s) } else { Ex54Element::tail(k, s) }
        };
        let (a, b, c) = (el(xs[0]), el(xs[1]), el(xs[2]));
        prop_assert_eq!(ex54_mul(ex54_mul(a, b), c), ex54_mul(a, ex54_mul(b, c)));
        prop_assert_eq!(ex54_mul(a, b), ex54_mul(b, a));
    }
}

#[test]
fn canonical_structure_of_every_small_group_passes() {
    for g in GROUPS.iter() {
        let u = canonical_uno_from_inverse(g.sg().clone(), g.top().clone()).unwrap();
        assert_eq!(&u, g);
        assert!(is_ditopological(&u).unwrap().passed());
    }
}
