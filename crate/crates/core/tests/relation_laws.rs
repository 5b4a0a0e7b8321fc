mod common;

use common::*;
use proptest::prelude::*;
use reldyn::chain::chain_analysis;
use reldyn::viability::{minimal_viable_subsets, viability_report, Extended};
use reldyn::{compose, CellSet, Eps};
use reldyn_oracle as oracle;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn composition_matches_oracle_and_inverts(
        (a, b) in (1usize..=12).prop_flat_map(|n| (mat(n, 0.25), mat(n, 0.25)))
    ) {
        let space = line(a.len());
        let f = from_mat(space.clone(), &a);
        let g = from_mat(space, &b);
        let gf = compose(&g, &f).unwrap();
        prop_assert_eq!(to_mat(&gf), oracle::compose(&b, &a));
        prop_assert_eq!(gf.inverse(), compose(&f.inverse(), &g.inverse()).unwrap());
    }

    #[test]
    fn star_laws(
        (a, b, v) in (1usize..=12).prop_flat_map(|n| (mat(n, 0.25), mat(n, 0.25), proptest::collection::vec(any::<bool>(), n)))
    ) {
        let space = line(a.len());
        let f = from_mat(space.clone(), &a);
        let g = from_mat(space, &b);
        let v = set_of(&v);
        let star = f.star(&v).unwrap();
        prop_assert_eq!(mask(&star), oracle::star(&a, &mask(&v)));
        prop_assert_eq!(star.clone(), f.preimage(&v.complement()).unwrap().complement());
        let gf = compose(&g, &f).unwrap();
        prop_assert_eq!(f.star(&g.star(&v).unwrap()).unwrap(), gf.star(&v).unwrap());
    }

    #[test]
    fn orbit_is_transitive_closure(f in line_relation(12)) {
        prop_assert_eq!(to_mat(&f.orbit()), oracle::floyd_warshall(&to_mat(&f)));
    }

    #[test]
    fn tower_and_eps_monotonicity(f in line_relation(12)) {
        let orbit = f.orbit();
        prop_assert!(f.is_subset(&orbit));
        let ladder = [Eps::strict(), Eps::touching(), Eps::new(1.0).unwrap(), Eps::new(2.5).unwrap()];
        let chains: Vec<_> = ladder.iter().map(|&e| chain_analysis(&f, e).chain_relation).collect();
        prop_assert!(orbit.is_subset(&chains[0]));
        for w in chains.windows(2) {
            prop_assert!(w[0].is_subset(&w[1]));
        }
    }

    #[test]
    fn restriction_emptiness_matches_star_n((f, c) in relation_and_set(10)) {
        let n = f.cell_count();
        let fc = f.restrict(&c).unwrap();
        let outside = c.complement();
        for k in 1..=n {
            let power = fc.iterate(k as i64);
            let dead = CellSet::from_cells(n, c.iter().filter(|&x| power.row(x).is_empty()));
            prop_assert_eq!(dead, c.intersection(&f.star_n(&outside, k).unwrap()));
        }
    }

    #[test]
    fn viability_matches_oracle((f, c) in relation_and_set(10)) {
        let m = to_mat(&f);
        let cm = mask(&c);
        let r = viability_report(&f, &c).unwrap();
        prop_assert_eq!(mask(&r.c_plus), oracle::c_plus(&m, &cm));
        prop_assert_eq!(mask(&r.c_minus), oracle::c_minus(&m, &cm));
        let nu: Vec<Option<usize>> = r.nu.iter().map(|v| match v {
            Extended::Finite(k) => Some(*k as usize),
            Extended::Infinite => None,
        }).collect();
        prop_assert_eq!(nu, oracle::longest_paths(&m, &cm));
    }

    #[test]
    fn minimal_viable_subsets_match_oracle((f, c) in relation_and_set(8)) {
        let got: Vec<Vec<usize>> = {
            let mut v: Vec<Vec<usize>> = minimal_viable_subsets(&f, &c).unwrap().iter().map(|s| s.to_vec()).collect();
            v.sort();
            v
        };
        prop_assert_eq!(got, oracle::minimal_viable_subsets(&to_mat(&f), &mask(&c)));
    }
}
