//! Runs the requested analyses in dependency order and collects a report.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reldyn::chain::{chain_analysis, chain_ladder, dilate, Dilation};
use reldyn::conley::{build_index_pair, isolating_checks, quotient_relation, robustness_eps, validate_index_pair};
use reldyn::hybrid::{self, associated_relation, enumerate_hybrid_paths, span_decomposition, teel_relation};
use reldyn::lyapunov::{complete_lyapunov, verify_lyapunov};
use reldyn::morse::{ar_family, MorseGraph};
use reldyn::perturbation::{eliminate_repeller, eliminate_saddle};
use reldyn::semiflow::{semiflow_conley, tau_and_terminal, TimedRelationTable};
use reldyn::viability::{c_minus, c_plus, enumerate_paths};
use reldyn::{compose, CellSet, Relation};

use crate::error::CliResult;
use crate::report::*;
use crate::spec::{check_analyses, eps_of, resolve_region, Analysis, LoadedSpec, PerturbMode, RelationSection, System};

/// Overrides applied on top of a spec.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Replaces the spec's run list.
    pub analyses: Option<Vec<Analysis>>,
    /// Replaces the eps ladder with a single value.
    pub eps: Option<f64>,
    pub seed: u64,
}

/// A report plus the data the text emitters need.
pub struct RunOutput {
    pub report: Report,
    pub lyapunov: Option<LyapunovCsv>,
    /// Wall-clock milliseconds per analysis; kept out of the report body.
    pub timing: BTreeMap<String, f64>,
    pub space: std::sync::Arc<reldyn::grid::Space>,
}

pub struct LyapunovCsv {
    pub values: Vec<String>,
    pub approx: Vec<f64>,
}

fn cells(s: &CellSet) -> Vec<usize> {
    s.to_vec()
}

fn edge_list(f: &Relation) -> Vec<[usize; 2]> {
    f.edges().map(|(x, y)| [x, y]).collect()
}

struct Ctx<'a> {
    spec: &'a crate::spec::SystemSpec,
    sys: &'a System,
    ladder: Vec<f64>,
    seed: u64,
    failures: Vec<Failure>,
}

impl Ctx<'_> {
    fn fail(&mut self, analysis: Analysis, message: impl Into<String>) {
        self.failures.push(Failure { analysis: analysis.name().into(), message: message.into() });
    }

    /// The finest ladder value, used by single-eps analyses.
    fn eps(&self) -> f64 {
        *self.ladder.last().expect("ladder is nonempty")
    }

    fn region(&mut self, analysis: Analysis) -> CliResult<Option<CellSet>> {
        match &self.spec.analysis.region {
            Some(r) => Ok(Some(resolve_region(&self.sys.space, "analysis.region", r)?)),
            None => {
                self.fail(analysis, "no analysis.region given");
                Ok(None)
            }
        }
    }
}

pub fn run(loaded: &LoadedSpec, sys: &System, opts: &RunOptions) -> CliResult<RunOutput> {
    let spec = &loaded.spec;
    let mut analyses = opts.analyses.clone().unwrap_or_else(|| spec.analysis.run.clone());
    analyses.sort();
    analyses.dedup();
    check_analyses(spec.kind, &analyses)?;
    let ladder = match opts.eps {
        Some(e) => {
            crate::spec::validate_ladder("--eps", &[e])?;
            vec![e]
        }
        None => spec.analysis.eps.clone(),
    };
    let mut ctx = Ctx { spec, sys, ladder: ladder.clone(), seed: opts.seed, failures: Vec::new() };
    let mut report = Report {
        meta: Meta {
            name: spec.name.clone(),
            kind: spec.kind.to_string(),
            schema: spec.schema,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            spec_hash: loaded.hash.clone(),
            seed: opts.seed.to_string(),
            analyses: analyses.iter().map(|a| a.name().to_string()).collect(),
            eps: ladder,
        },
        relation: RelationSection::from_relation(&sys.base),
        chain: None,
        morse: None,
        lyapunov: None,
        conley: None,
        robust: None,
        perturb: None,
        semiflow: None,
        hybrid: None,
        paths: None,
        failures: Vec::new(),
    };
    let mut timing = BTreeMap::new();
    let mut csv = None;
    for &a in &analyses {
        let start = Instant::now();
        match a {
            Analysis::Chain => report.chain = Some(run_chain(&ctx)),
            Analysis::Morse => report.morse = Some(run_morse(&mut ctx)),
            Analysis::Lyapunov => {
                let (r, c) = run_lyapunov(&mut ctx)?;
                report.lyapunov = Some(r);
                csv = Some(c);
            }
            Analysis::Conley => report.conley = run_conley(&mut ctx)?,
            Analysis::Robust => report.robust = run_robust(&mut ctx)?,
            Analysis::Perturb => report.perturb = run_perturb(&mut ctx)?,
            Analysis::Semiflow => report.semiflow = run_semiflow(&mut ctx)?,
            Analysis::Hybrid => report.hybrid = run_hybrid(&mut ctx)?,
            Analysis::Paths => report.paths = run_paths(&mut ctx)?,
        }
        timing.insert(a.name().to_string(), start.elapsed().as_secs_f64() * 1e3);
    }
    report.failures = ctx.failures;
    Ok(RunOutput { report, lyapunov: csv, timing, space: sys.space.clone() })
}

fn run_chain(ctx: &Ctx) -> ChainReport {
    let ladder: Vec<_> = ctx.ladder.iter().map(|&e| eps_of(e)).collect();
    let (levels, stable_from) = chain_ladder(&ctx.sys.base, &ladder);
    ChainReport {
        stable_from,
        levels: levels
            .iter()
            .zip(&ctx.ladder)
            .map(|(c, &eps)| ChainLevel {
                eps,
                recurrent: cells(&c.recurrent),
                components: c.components.iter().map(cells).collect(),
            })
            .collect(),
    }
}

fn run_morse(ctx: &mut Ctx) -> MorseReport {
    let eps = ctx.eps();
    let analysis = chain_analysis(&ctx.sys.base, eps_of(eps));
    let graph = MorseGraph::from_analysis(&analysis);
    let acyclic = graph.is_acyclic();
    if !acyclic {
        ctx.fail(Analysis::Morse, "Morse graph has a cycle");
    }
    let pairs = ar_family(&ctx.sys.base, eps_of(eps));
    MorseReport {
        eps,
        acyclic,
        components: graph.components.iter().map(cells).collect(),
        edges: graph.edges.iter().map(|&(a, b)| [a, b]).collect(),
        pairs: pairs
            .iter()
            .map(|p| PairReport { attractor: cells(&p.attractor), repeller: cells(&p.repeller) })
            .collect(),
    }
}

fn run_lyapunov(ctx: &mut Ctx) -> CliResult<(LyapunovReport, LyapunovCsv)> {
    let eps = ctx.eps();
    let field = complete_lyapunov(&ctx.sys.base, eps_of(eps));
    let check = verify_lyapunov(&ctx.sys.base, eps_of(eps), &field.values)?;
    if !check.pass {
        ctx.fail(Analysis::Lyapunov, format!("Lyapunov check failed with {} violations", check.violations.len()));
    }
    let values: Vec<String> = field.values.iter().map(|v| v.to_string()).collect();
    let report = LyapunovReport {
        eps,
        pass: check.pass,
        monotone: check.monotone,
        separates_components: check.separates_components,
        pair_count: field.pairs.len(),
        critical_set: cells(&check.critical_set),
        violations: check.violations.iter().map(|&(x, y)| [x, y]).collect(),
        values: values.clone(),
    };
    Ok((report, LyapunovCsv { values, approx: field.to_f64() }))
}

fn run_conley(ctx: &mut Ctx) -> CliResult<Option<ConleyReport>> {
    let Some(c) = ctx.region(Analysis::Conley)? else { return Ok(None) };
    let f = &ctx.sys.base;
    let checks = isolating_checks(f, &c)?;
    let mut report = ConleyReport {
        isolating: checks.isolating,
        simple: checks.simple,
        index_type: checks.index_type,
        valid: None,
        region: cells(&c),
        viable_set: cells(&checks.c_pm),
        exit: cells(&reldyn::conley::f_boundary(f, &c)?.delta),
        p1: Vec::new(),
        p2: Vec::new(),
        failed_conditions: Vec::new(),
        quotient: None,
    };
    if !checks.isolating {
        ctx.fail(Analysis::Conley, "region is not an isolating neighborhood");
        return Ok(Some(report));
    }
    let pair = build_index_pair(f, &c)?;
    let validation = validate_index_pair(f, &pair)?;
    report.valid = Some(validation.pass);
    report.p1 = cells(&pair.p1);
    report.p2 = cells(&pair.p2);
    report.failed_conditions = validation.failed_conditions.iter().map(|c| c.to_string()).collect();
    if !validation.pass {
        ctx.fail(Analysis::Conley, "index pair failed validation");
    }
    let q = quotient_relation(f, &pair)?;
    if q.star_attractor == Some(false) {
        ctx.fail(Analysis::Conley, "collapsed exit set is not an attractor of the quotient");
    }
    report.quotient = Some(QuotientReport {
        star: q.star,
        star_attractor: q.star_attractor,
        nodes: cells(&q.nodes),
        edges: edge_list(&q.relation),
    });
    Ok(Some(report))
}

/// `F` together with a random subset of the two-sided eps dilation of `F`.
pub fn random_sub_perturbation(f: &Relation, eps: f64, rng: &mut impl Rng) -> Relation {
    let g = dilate(f, eps_of(eps), Dilation::TwoSided);
    let extra: Vec<_> = g.edges().filter(|_| rng.gen_bool(0.5)).collect();
    let extra = Relation::from_edges(f.space().clone(), extra).expect("edges of a relation on the same space");
    f.union(&extra).expect("same space")
}

fn run_robust(ctx: &mut Ctx) -> CliResult<Option<RobustReport>> {
    let Some(c) = ctx.region(Analysis::Robust)? else { return Ok(None) };
    let Some(section) = ctx.spec.analysis.robust.clone() else {
        ctx.fail(Analysis::Robust, "no analysis.robust given");
        return Ok(None);
    };
    let f = &ctx.sys.base;
    let u = ctx.sys.space.interior(&c);
    let ladder: Vec<_> = section.ladder.iter().map(|&e| eps_of(e)).collect();
    let eps_star = robustness_eps(f, &c, &u, &ladder)?;
    let mut passes = 0;
    if let Some(e) = eps_star {
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
        for _ in 0..section.samples {
            let f1 = random_sub_perturbation(f, e.value(), &mut rng);
            let core = c_plus(&f1, &c).intersection(&c_minus(&f1, &c));
            if isolating_checks(&f1, &c)?.isolating && core.is_subset(&u) {
                passes += 1;
            }
        }
    }
    let pass = eps_star.is_some() && passes == section.samples;
    if !pass {
        ctx.fail(Analysis::Robust, "region is not robustly isolating on the ladder");
    }
    Ok(Some(RobustReport {
        eps_star: eps_star.map(|e| e.value()),
        samples: section.samples,
        sample_passes: passes,
        pass,
        ladder: section.ladder,
        u: cells(&u),
    }))
}

fn run_perturb(ctx: &mut Ctx) -> CliResult<Option<PerturbReport>> {
    let Some(c) = ctx.region(Analysis::Perturb)? else { return Ok(None) };
    let Some(section) = ctx.spec.analysis.perturb.clone() else {
        ctx.fail(Analysis::Perturb, "no analysis.perturb given");
        return Ok(None);
    };
    let f = &ctx.sys.base;
    let result = match section.mode {
        PerturbMode::Repeller => eliminate_repeller(f, &c, section.eps).map(|r| (r.g, r.cert, r.retract_to)),
        PerturbMode::Saddle => eliminate_saddle(f, &c, section.eps).map(|r| (r.g_hat, r.cert, r.retract_to)),
    };
    let mode = match section.mode {
        PerturbMode::Repeller => "repeller",
        PerturbMode::Saddle => "saddle",
    };
    let (g, cert, retract_to) = match result {
        Ok(r) => r,
        Err(e) => {
            ctx.fail(Analysis::Perturb, e.to_string());
            return Ok(None);
        }
    };
    let eliminates = cert.eliminates() && (section.mode == PerturbMode::Repeller || cert.surjective);
    if !eliminates {
        ctx.fail(Analysis::Perturb, "perturbation certificate does not verify");
    }
    let changed = (0..f.cell_count()).filter(|&x| f.row(x) != g.row(x));
    Ok(Some(PerturbReport {
        mode: mode.into(),
        eps: section.eps,
        eliminates,
        containment_fwd: cert.containment_fwd,
        containment_bwd: cert.containment_bwd,
        annihilation_n: cert.annihilation_n,
        surjective: cert.surjective,
        changed_cells: changed.collect(),
        retract_to: cells(&retract_to),
        g: RelationSection::from_relation(&g),
    }))
}

fn run_semiflow(ctx: &mut Ctx) -> CliResult<Option<SemiflowReport>> {
    let sf = ctx.sys.semiflow.clone().expect("semiflow and hybrid specs carry a semiflow");
    let c = match &ctx.spec.analysis.region {
        Some(r) => resolve_region(&ctx.sys.space, "analysis.region", r)?,
        None => ctx.sys.space.full_set(),
    };
    let horizon = 2 * sf.steps_per_unit();
    let weak_kolmogorov = TimedRelationTable::from_step(sf.step(), horizon).check_weak_kolmogorov().is_ok();
    if !weak_kolmogorov {
        ctx.fail(Analysis::Semiflow, "step table fails the weak Kolmogorov condition");
    }
    let tau = tau_and_terminal(&sf, &c)?;
    let conley = semiflow_conley(&sf, &c)?;
    let valid = conley.validation.as_ref().map(|v| v.pass);
    if valid == Some(false) {
        ctx.fail(Analysis::Semiflow, "semiflow index pair failed validation");
    }
    Ok(Some(SemiflowReport {
        steps_per_unit: sf.steps_per_unit(),
        complete: sf.complete(),
        kolmogorov_horizon: horizon,
        weak_kolmogorov,
        isolating: conley.checks.isolating,
        index_type: conley.checks.index_type,
        valid,
        region: cells(&c),
        terminal: cells(&tau.terminal),
        exit: cells(&conley.exit),
        viable_set: cells(&conley.checks.c_pm),
        p2: conley.index_pair.map(|p| cells(&p.p2)).unwrap_or_default(),
    }))
}

fn run_hybrid(ctx: &mut Ctx) -> CliResult<Option<HybridReport>> {
    let hs = ctx.sys.hybrid.as_ref().expect("hybrid specs carry a hybrid system");
    let h = associated_relation(hs);
    let teel = teel_relation(hs);
    let cube = h.union(&compose(&h, &h)?)?.union(&h.iterate(3))?;
    let sandwich = h.is_subset(&teel) && teel.is_subset(&cube);
    let chain_agrees = ctx
        .ladder
        .iter()
        .all(|&e| chain_analysis(&h, eps_of(e)) == chain_analysis(&teel, eps_of(e)));
    let lyap = hybrid::hybrid_lyapunov(hs, eps_of(ctx.eps()))?;
    if !sandwich {
        ctx.fail(Analysis::Hybrid, "H ⊆ H̃ ⊆ H ∪ H² ∪ H³ fails");
    }
    if !chain_agrees {
        ctx.fail(Analysis::Hybrid, "chain analyses of H and H̃ differ");
    }
    if !lyap.check.pass {
        ctx.fail(Analysis::Hybrid, "hybrid Lyapunov check failed");
    }
    let (mut isolating, mut valid, mut exit) = (None, None, Vec::new());
    if let Some(r) = &ctx.spec.analysis.region {
        let k = resolve_region(&ctx.sys.space, "analysis.region", r)?;
        let hc = hybrid::hybrid_conley(hs, &k)?;
        isolating = Some(hc.checks.isolating);
        valid = hc.validation.as_ref().map(|v| v.pass);
        exit = cells(&hc.exit);
        if valid == Some(false) {
            ctx.fail(Analysis::Hybrid, "hybrid index pair failed validation");
        }
    }
    Ok(Some(HybridReport {
        steps_per_unit: hs.semiflow().steps_per_unit(),
        complete: hs.complete(),
        h_edges: h.edge_count(),
        teel_edges: teel.edge_count(),
        sandwich,
        chain_agrees,
        lyapunov_pass: lyap.check.pass,
        isolating,
        valid,
        flow_set: cells(hs.flow_set()),
        jump_domain: cells(hs.jump_domain()),
        exit,
    }))
}

const PATH_SAMPLE: usize = 8;

fn run_paths(ctx: &mut Ctx) -> CliResult<Option<PathsReport>> {
    let section = ctx.spec.analysis.paths.clone();
    let k = match &ctx.spec.analysis.region {
        Some(r) => resolve_region(&ctx.sys.space, "analysis.region", r)?,
        None => ctx.sys.space.full_set(),
    };
    if let Some(hs) = &ctx.sys.hybrid {
        let en = enumerate_hybrid_paths(hs, &k, section.length, section.cap)?;
        let mut span_ok = true;
        for p in en.paths.iter().filter(|p| p.length() >= 1.0) {
            let s = span_decomposition(hs, p)?;
            let l = p.length();
            let kk = s.k as f64;
            span_ok &= l / 3.0 <= kk + 1e-9 && kk <= l + 1e-9;
        }
        if !span_ok {
            ctx.fail(Analysis::Paths, "a hybrid path violates the spanning bounds");
        }
        return Ok(Some(PathsReport {
            max_length: section.length,
            cap: section.cap,
            count: en.paths.len(),
            truncated: en.truncated,
            span_ok,
            sample: en.paths.iter().take(PATH_SAMPLE).map(|p| p.cells()).collect(),
        }));
    }
    let len = section.length.floor() as usize;
    let en = enumerate_paths(&ctx.sys.base, &k, len, section.cap)?;
    Ok(Some(PathsReport {
        max_length: section.length,
        cap: section.cap,
        count: en.paths.len(),
        truncated: en.truncated,
        span_ok: true,
        sample: en.paths.iter().take(PATH_SAMPLE).cloned().collect(),
    }))
}
