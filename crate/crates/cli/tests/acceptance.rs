//! Acceptance suite. Runs every criterion, prints one line per criterion and
//! exits nonzero if any fails.

use std::path::Path;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reldyn::chain::{chain_analysis, dilate, restricted_chain_bound_check, Dilation};
use reldyn::conley::{build_index_pair, isolating_checks, quotient_relation, robustness_eps, validate_index_pair, IndexPair};
use reldyn::grid::{hausdorff_distance, GridSpace, Space};
use reldyn::hybrid::{
    associated_relation, build_spanning_path, enumerate_hybrid_paths, span_decomposition, teel_relation, HybridSystem,
};
use reldyn::lyapunov::{complete_lyapunov, verify_lyapunov};
use reldyn::morse::ar_family;
use reldyn::perturbation::{eliminate_repeller, eliminate_saddle};
use reldyn::semiflow::SemiflowApprox;
use reldyn::systems::{central_cube, dbl, sdl, sdl_onto};
use reldyn::viability::{c_minus, c_plus};
use reldyn::{compose, CellSet, Eps, Relation};
use reldyn_cli::{build_system, load_spec, run, Report, RunOptions};
use reldyn_oracle::{self as oracle, Mat};

type Outcome = Result<String, String>;

/// Name, check, and time budget in seconds.
type Criterion = (&'static str, fn() -> Outcome, Option<u64>);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn line(n: usize) -> Arc<Space> {
    Space::grid(GridSpace::interval(0.0, n as f64, n).unwrap())
}

fn to_mat(f: &Relation) -> Mat {
    oracle::from_edges(f.cell_count(), &f.edges().collect::<Vec<_>>())
}

fn random_mat(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Mat {
    (0..n).map(|_| (0..n).map(|_| rng.gen_bool(p)).collect()).collect()
}

fn random_relation(rng: &mut ChaCha8Rng, max_n: usize) -> Relation {
    let n = rng.gen_range(1..=max_n);
    let m = random_mat(rng, n, 0.25);
    Relation::from_edges(line(n), oracle::edges(&m)).unwrap()
}

fn random_set(rng: &mut ChaCha8Rng, n: usize) -> CellSet {
    CellSet::from_cells(n, (0..n).filter(|_| rng.gen_bool(0.5)))
}

fn corpus(seed: u64, count: usize, max_n: usize) -> Vec<Relation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_relation(&mut rng, max_n)).collect()
}

fn eps_ladder() -> [Eps; 3] {
    [Eps::strict(), Eps::touching(), Eps::new(1.0).unwrap()]
}

fn c1_relation_laws() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..500 {
        let n = rng.gen_range(1..=12);
        let (a, b) = (random_mat(&mut rng, n, 0.25), random_mat(&mut rng, n, 0.25));
        let f = Relation::from_edges(line(n), oracle::edges(&a)).unwrap();
        let g = Relation::from_edges(line(n), oracle::edges(&b)).unwrap();
        let gf = compose(&g, &f).unwrap();
        ensure!(to_mat(&gf) == oracle::compose(&b, &a), "composition differs from the oracle");
        ensure!(gf.inverse() == compose(&f.inverse(), &g.inverse()).unwrap(), "inverse of a composition");
        let c = random_set(&mut rng, n);
        let star = f.star(&c).unwrap();
        ensure!(star.to_mask() == oracle::star(&a, &c.to_mask()), "star differs from the oracle");
        ensure!(star == f.preimage(&c.complement()).unwrap().complement(), "star/complement duality");
        ensure!(f.star(&g.star(&c).unwrap()).unwrap() == gf.star(&c).unwrap(), "star of a composition");
        ensure!(to_mat(&f.orbit()) == oracle::floyd_warshall(&a), "orbit differs from Floyd-Warshall");
    }
    Ok("500 relation pairs".into())
}

fn c2_tower() -> Outcome {
    for f in corpus(1, 500, 12) {
        let orbit = f.orbit();
        ensure!(f.is_subset(&orbit), "F not in its orbit relation");
        let chains: Vec<_> = eps_ladder().iter().map(|&e| chain_analysis(&f, e).chain_relation).collect();
        ensure!(orbit.is_subset(&chains[0]), "orbit relation not in the chain relation");
        ensure!(chains.windows(2).all(|w| w[0].is_subset(&w[1])), "chain relation not monotone in eps");
    }
    Ok("500 relations, 3 eps".into())
}

fn c3_restriction_star() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut instances = 0;
    for _ in 0..60 {
        let f = random_relation(&mut rng, 10);
        let n = f.cell_count();
        for bits in 0u32..(1 << n) {
            let c = CellSet::from_cells(n, (0..n).filter(|i| bits >> i & 1 == 1));
            let outside = c.complement();
            let fc = f.restrict(&c).unwrap();
            let mut power = Relation::identity_on(f.space().clone(), &c);
            for k in 1..=n {
                power = compose(&fc, &power).unwrap();
                let dead = CellSet::from_cells(n, c.iter().filter(|&x| power.row(x).is_empty()));
                ensure!(dead == c.intersection(&f.star_n(&outside, k).unwrap()), "mismatch at n = {k}");
            }
            instances += 1;
        }
    }
    Ok(format!("{instances} (F, C) instances, all powers"))
}

fn c4_ar_soundness() -> Outcome {
    let mut pairs_seen = 0;
    for (i, f) in corpus(4, 200, 10).iter().enumerate() {
        let eps = eps_ladder()[i % 3];
        let chain = chain_analysis(f, eps);
        let g = dilate(f, eps, Dilation::OneSided);
        let pairs = ar_family(f, eps);
        for p in &pairs {
            ensure!(p.attractor.is_disjoint(&p.repeller), "attractor meets repeller");
            ensure!(chain.recurrent.is_subset(&p.attractor.union(&p.repeller)), "recurrent cell outside A ∪ B");
            ensure!(c_minus(&g, &p.attractor) == p.attractor, "attractor not invariant");
            ensure!(c_plus(&g, &p.repeller) == p.repeller, "repeller not invariant");
            ensure!(
                g.edges().all(|(x, y)| !(p.attractor.contains(x) && !p.attractor.contains(y))),
                "edge leaves the attractor"
            );
        }
        pairs_seen += pairs.len();
        let sig: Vec<Vec<bool>> = chain
            .components
            .iter()
            .map(|c| pairs.iter().map(|p| p.attractor.contains(c.first().unwrap())).collect())
            .collect();
        for a in 0..sig.len() {
            ensure!(sig[a + 1..].iter().all(|s| *s != sig[a]), "two components share a signature");
        }
    }
    Ok(format!("200 relations, {pairs_seen} pairs"))
}

fn lyapunov_ok(f: &Relation, eps: Eps) -> Result<(), String> {
    let field = complete_lyapunov(f, eps);
    let check = verify_lyapunov(f, eps, &field.values).map_err(|e| e.to_string())?;
    ensure!(check.pass, "verify_lyapunov failed on {} cells", f.cell_count());
    let g = to_mat(&dilate(f, eps, Dilation::OneSided));
    let (monotone, critical, separates) = oracle::lyapunov_check(&g, &field.values);
    ensure!(monotone && separates, "oracle rejects the field");
    ensure!(critical == chain_analysis(f, eps).recurrent.to_mask(), "critical set is not the recurrent set");
    Ok(())
}

fn c5_lyapunov() -> Outcome {
    for (i, f) in corpus(4, 200, 10).iter().enumerate() {
        lyapunov_ok(f, eps_ladder()[i % 3])?;
    }
    lyapunov_ok(&dbl(64), Eps::strict())?;
    lyapunov_ok(&sdl(32), Eps::strict())?;
    Ok("200 relations, DBL 64, SDL 32x32".into())
}

fn c6_chain_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..200 {
        let f = random_relation(&mut rng, 10);
        let c = random_set(&mut rng, f.cell_count());
        let check = restricted_chain_bound_check(&f, &c, Eps::strict()).map_err(|e| e.to_string())?;
        ensure!(check.pass, "bound fails: {:?}", check.witness);
    }
    Ok("200 instances".into())
}

fn c7_index_pairs() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    for _ in 0..400 {
        let f = random_relation(&mut rng, 8);
        let c = random_set(&mut rng, f.cell_count());
        if !isolating_checks(&f, &c).unwrap().index_type {
            continue;
        }
        let pair = build_index_pair(&f, &c).map_err(|e| e.to_string())?;
        ensure!(validate_index_pair(&f, &pair).unwrap().pass, "built pair fails validation");
        let cells = c.to_vec();
        for bits in 0u32..(1 << cells.len()) {
            let p2 = CellSet::from_cells(f.cell_count(), cells.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, &x)| x));
            let other = IndexPair { p2: p2.clone(), ..pair.clone() };
            if validate_index_pair(&f, &other).unwrap().pass {
                ensure!(pair.p2.is_subset(&p2), "a smaller valid P2 exists");
            }
        }
        checked += 1;
    }
    let f = sdl(32);
    let c = central_cube(f.space(), 0.25);
    let pair = build_index_pair(&f, &c).map_err(|e| e.to_string())?;
    ensure!(validate_index_pair(&f, &pair).unwrap().pass, "SDL pair fails validation");
    let q = quotient_relation(&f, &pair).map_err(|e| e.to_string())?;
    ensure!(q.star_attractor == Some(true), "star is not an attractor of the quotient");
    ensure!(q.dual_repeller == Some(c_plus(&f, &pair.p1)), "dual repeller is not (P1)+");
    Ok(format!("{checked} index pairs minimal; SDL quotient ok"))
}

/// Re-checks a perturbation from scratch with dense matrices and raw box
/// distances.
fn independent_certificate(f: &Relation, g: &Relation, c: &CellSet, eps: f64, need_onto: bool) -> Result<usize, String> {
    let space = f.space();
    let n = f.cell_count();
    let v: Mat = (0..n).map(|i| (0..n).map(|j| space.box_distance(i, j).unwrap() <= eps + 1e-12).collect()).collect();
    let (fm, gm) = (to_mat(f), to_mat(g));
    ensure!(oracle::subset(&gm, &oracle::compose(&v, &fm)), "G is not inside V∘F");
    ensure!(oracle::subset(&fm, &oracle::compose(&v, &gm)), "F is not inside V∘G");
    let gc = oracle::restrict(&gm, &c.to_mask());
    let steps = (1..=n).find(|&k| oracle::edges(&oracle::power(&gc, k)).is_empty());
    let steps = steps.ok_or("G restricted to C never dies out")?;
    if need_onto {
        ensure!(oracle::image(&gm, &vec![true; n]).iter().all(|&b| b), "G is not onto");
        ensure!(gm.iter().all(|row| row.iter().any(|&b| b)), "G does not have full domain");
    }
    Ok(steps)
}

fn c8_perturbations() -> Outcome {
    let f = dbl(64);
    let c = central_cube(f.space(), 0.25);
    let r = eliminate_repeller(&f, &c, 0.5).map_err(|e| e.to_string())?;
    ensure!(r.cert.eliminates(), "repeller certificate rejected: {:?}", r.cert);
    let nr = independent_certificate(&f, &r.g, &c, 0.5, false)?;
    ensure!(Some(nr) == r.cert.annihilation_n, "annihilation step count differs");
    let f = sdl_onto(32);
    let c = central_cube(f.space(), 0.25);
    let s = eliminate_saddle(&f, &c, 0.5).map_err(|e| e.to_string())?;
    ensure!(s.cert.eliminates() && s.cert.surjective, "saddle certificate rejected: {:?}", s.cert);
    let ns = independent_certificate(&f, &s.g_hat, &c, 0.5, true)?;
    ensure!(Some(ns) == s.cert.annihilation_n, "annihilation step count differs");
    Ok(format!("DBL N = {nr}, SDL N = {ns}"))
}

fn c9_robust() -> Outcome {
    let f = sdl(32);
    let space = f.space().clone();
    let c = central_cube(&space, 0.5);
    let u = space.interior(&c);
    let ladder: Vec<Eps> = [0.25, 0.125, 0.0625, 0.03125].iter().map(|&v| Eps::new(v).unwrap()).chain([Eps::strict()]).collect();
    let eps = robustness_eps(&f, &c, &u, &ladder).map_err(|e| e.to_string())?.ok_or("not robust on the ladder")?;
    ensure!(eps.value() == 0.03125, "eps* = {}", eps.value());
    let g = dilate(&f, eps, Dilation::TwoSided);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for i in 0..50 {
        // half keep F, half are arbitrary sub-relations of the dilation
        let keep = |rng: &mut ChaCha8Rng, x: usize, y: usize| (i % 2 == 0 && f.contains(x, y)) || rng.gen_bool(0.5);
        let edges: Vec<_> = g.edges().filter(|&(x, y)| keep(&mut rng, x, y)).collect();
        let f1 = Relation::from_edges(space.clone(), edges).unwrap();
        let chk = isolating_checks(&f1, &c).map_err(|e| e.to_string())?;
        ensure!(chk.isolating, "sample {i} is not isolating");
        ensure!(chk.c_pm.is_subset(&u), "sample {i} has viable set outside U");
    }
    Ok(format!("eps* = {}, 50 samples", eps.value()))
}

fn cycler() -> HybridSystem {
    let s = line(4);
    let step = Relation::from_edges(s.clone(), [(0, 1), (1, 2), (2, 3)]).unwrap();
    let sf = SemiflowApprox::new(step, 1).unwrap();
    HybridSystem::new(sf, CellSet::full(4), Relation::from_edges(s, [(3, 0)]).unwrap()).unwrap()
}

fn orbits(h: &Relation, want: usize) -> Vec<Vec<usize>> {
    let mut layer: Vec<Vec<usize>> = (0..h.cell_count()).map(|x| vec![x]).collect();
    let mut out = Vec::new();
    while out.len() < want && !layer.is_empty() {
        let mut next = Vec::new();
        for p in &layer {
            for &y in h.row(*p.last().unwrap()) {
                let mut q = p.clone();
                q.push(y);
                next.push(q);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out.truncate(want);
    out
}

fn c10_spanning() -> Outcome {
    let hs = cycler();
    let h = associated_relation(&hs);
    let en = enumerate_hybrid_paths(&hs, &CellSet::full(4), 130.0, 1000).map_err(|e| e.to_string())?;
    let paths: Vec<_> = en.paths.iter().filter(|p| p.length() >= 1.0).take(500).collect();
    ensure!(paths.len() == 500, "only {} paths generated", paths.len());
    for p in &paths {
        let ell = p.length();
        let sp = span_decomposition(&hs, p).map_err(|e| e.to_string())?;
        let k = sp.k as f64;
        ensure!(ell / 3.0 <= k + 1e-9 && k <= ell + 1e-9, "l = {ell}, k = {k}");
        ensure!(sp.orbit.windows(2).all(|w| h.contains(w[0], w[1])), "decomposition is not an H orbit");
    }
    let orbits = orbits(&h, 500);
    ensure!(orbits.len() == 500, "only {} orbits", orbits.len());
    for o in &orbits {
        let built = build_spanning_path(&hs, o).map_err(|e| e.to_string())?;
        let k = (o.len() - 1) as f64;
        let ell = built.length();
        ensure!(k <= ell + 1e-9 && ell <= 3.0 * k + 1e-9, "k = {k}, l = {ell}");
        ensure!(built.start_cell() == o[0] && built.end_cell() == *o.last().unwrap(), "endpoints differ");
    }
    Ok("500 paths, 500 orbits".into())
}

fn sandwich(hs: &HybridSystem, step: &Mat, c: &[bool], jump: &Mat, k: usize) -> Result<(), String> {
    let h = associated_relation(hs);
    let teel = teel_relation(hs);
    ensure!(to_mat(&h) == oracle::hybrid::associated(step, c, jump, k), "H differs from the oracle");
    ensure!(to_mat(&teel) == oracle::hybrid::teel(step, c, jump, k), "H̃ differs from the oracle");
    ensure!(h.is_subset(&teel), "H is not inside H̃");
    ensure!(oracle::subset(&to_mat(&teel), &oracle::hybrid::up_to_cube(&to_mat(&h))), "H̃ is not inside H ∪ H² ∪ H³");
    for eps in eps_ladder() {
        ensure!(chain_analysis(&h, eps) == chain_analysis(&teel, eps), "chain analyses differ at eps {}", eps.value());
    }
    Ok(())
}

fn c11_teel() -> Outcome {
    let hs = cycler();
    sandwich(&hs, &to_mat(hs.semiflow().step()), &hs.flow_set().to_mask(), &to_mat(hs.jump()), 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 7;
    let (step, jump) = (random_mat(&mut rng, n, 0.3), random_mat(&mut rng, n, 0.15));
    let c: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.7)).collect();
    let space = line(n);
    let sf = SemiflowApprox::new(Relation::from_edges(space.clone(), oracle::edges(&step)).unwrap(), 2).unwrap();
    let hs = HybridSystem::new(sf, CellSet::from_mask(&c), Relation::from_edges(space, oracle::edges(&jump)).unwrap()).unwrap();
    sandwich(&hs, &step, &c, &jump, 2)?;
    Ok("cycler and a random 7-cell system, 3 eps".into())
}

fn c12_hausdorff() -> Outcome {
    let space = line(5);
    let sets: Vec<CellSet> = (1u32..32).map(|b| CellSet::from_cells(5, (0..5).filter(|i| b >> i & 1 == 1))).collect();
    let n = sets.len();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            d[i][j] = hausdorff_distance(&space, &sets[i], &sets[j]).unwrap();
        }
    }
    for i in 0..n {
        ensure!(d[i][i] == 0.0, "d(S, S) != 0");
        for j in 0..n {
            ensure!(d[i][j] == d[j][i], "asymmetric");
            ensure!(i == j || d[i][j] > 0.0, "distinct sets at distance 0");
            for k in 0..n {
                ensure!(d[i][k] <= d[i][j] + d[j][k] + 1e-12, "triangle inequality fails");
            }
        }
    }
    let empty = CellSet::empty(5);
    let cap = space.diameter() + 1.0;
    ensure!(hausdorff_distance(&space, &empty, &empty).unwrap() == 0.0, "d(∅, ∅) != 0");
    for s in &sets {
        ensure!(hausdorff_distance(&space, &empty, s).unwrap() == cap, "d(∅, T) != D + 1");
        ensure!(hausdorff_distance(&space, s, &empty).unwrap() == cap, "d(T, ∅) != D + 1");
    }
    Ok(format!("{n} sets, {} triples", n * n * n))
}

fn binomial(a: usize, b: usize) -> usize {
    (1..=b).fold(1, |acc, i| acc * (a + 1 - i) / i)
}

fn c13_time_domains() -> Outcome {
    // one cell that can always flow and always jump, on a lattice with step 1/2
    let s = line(1);
    let sf = SemiflowApprox::new(Relation::from_edges(s.clone(), [(0, 0)]).unwrap(), 2).unwrap();
    let hs = HybridSystem::new(sf, CellSet::full(1), Relation::from_edges(s, [(0, 0)]).unwrap()).unwrap();
    let en = enumerate_hybrid_paths(&hs, &CellSet::full(1), 6.0, 100_000).map_err(|e| e.to_string())?;
    ensure!(!en.truncated, "enumeration truncated");
    let mut count = 0;
    for p in &en.paths {
        let d = p.domain();
        let end = d.end();
        if end.t > 6 || end.n > 3 {
            continue;
        }
        let pts: Vec<(usize, usize)> = d.points().iter().map(|h| (h.t, h.n)).collect();
        ensure!(oracle::hybrid::is_maximal_chain(&pts, end.t, end.n), "domain ending at {:?} is not a maximal chain", end);
        count += 1;
    }
    let expected: usize = (0..=6).flat_map(|t| (0..=3).map(move |n| binomial(t + n, n))).sum();
    ensure!(count == expected, "{count} domains, expected {expected}");
    Ok(format!("{count} domains in [0, 3] x [0, 3]"))
}

fn c14_cli() -> Outcome {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let names = ["l3", "dbl64", "sdl32", "sdl32_onto", "sdl_flow", "cycler"];
    for name in names {
        let loaded = load_spec(&dir.join(format!("{name}.toml"))).map_err(|e| e.to_string())?;
        let sys = build_system(&loaded.spec).map_err(|e| e.to_string())?;
        let bodies: Vec<String> = (0..2)
            .map(|_| run(&loaded, &sys, &RunOptions::default()).unwrap().report.to_toml().unwrap())
            .collect();
        ensure!(bodies[0] == bodies[1], "{name}: reports differ between runs");
        let back = Report::from_toml(&bodies[0]).map_err(|e| e.to_string())?;
        let rebuilt = back.relation.to_relation(sys.space.clone()).map_err(|e| e.to_string())?;
        ensure!(rebuilt == sys.base, "{name}: relation section does not round-trip");
        ensure!(back.to_toml().unwrap() == bodies[0], "{name}: report does not round-trip");
    }
    Ok(format!("{} fixtures", names.len()))
}

fn main() {
    let criteria: [Criterion; 14] = [
        ("relation-calculus laws", c1_relation_laws, Some(5)),
        ("tower and eps monotonicity", c2_tower, Some(5)),
        ("restriction-star equivalence", c3_restriction_star, None),
        ("attractor-repeller soundness", c4_ar_soundness, None),
        ("complete Lyapunov functions", c5_lyapunov, Some(30)),
        ("restricted chain bound", c6_chain_bound, None),
        ("index pairs", c7_index_pairs, Some(30)),
        ("anomalous perturbations", c8_perturbations, Some(60)),
        ("robust isolation", c9_robust, Some(30)),
        ("hybrid spanning bounds", c10_spanning, Some(10)),
        ("H̃ sandwich", c11_teel, None),
        ("Hausdorff metric", c12_hausdorff, None),
        ("hybrid time domains", c13_time_domains, None),
        ("CLI determinism and round-trip", c14_cli, None),
    ];
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        let outcome = match (outcome, budget) {
            (Ok(_), Some(b)) if took > Duration::from_secs(*b) => Err(format!("took {took:.2?}, budget {b} s")),
            (o, _) => o,
        };
        let limit = budget.map_or(String::new(), |b| format!(" / {b} s"));
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{took:.2?}{limit}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} [{took:.2?}{limit}]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
