use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;
use weaklump::algebra::{AnyElement, Element, Weight};
use weaklump::exec::ExecutionMode;
use weaklump::group::{double_cosets, FiniteGroup, Subgroup};
use weaklump::hecke::{check_q_characterization, orbital_matrices, verify_hecke_isomorphism};
use weaklump::io;
use weaklump::lumping::{
    abelian_weak_test, theta_dimension, theta_dimension_direct, CosetViolation, LumpingProblem, SubsetMode,
};
use weaklump::markov::{
    conditional_distribution, minimal_gl_space, sequence_probability, stationary_distribution, test_exact_generic,
    test_strong_generic, test_weak_generic, transition_from_weight, Distribution, LumpingFunction, TransitionMatrix,
};
use weaklump::scalar::{Rational, Scalar};
use weaklump::simulate::{markov_diagnostic, max_transition_deviation, simulate_walk, DiagnosticConfig};

use crate::report::{matrix, scalars, Report, Timing};
use crate::{Cli, Command, Inputs, TestKind};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Input { path: PathBuf, source: weaklump::Error },
    #[error(transparent)]
    Analysis(#[from] weaklump::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 1,
            CliError::Input { source, .. } | CliError::Analysis(source) => match source {
                weaklump::Error::Parse { .. } => 1,
                _ => 2,
            },
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

/// Input files read once, in a fixed flag order, and hashed together with the options.
struct Context<'a> {
    inputs: &'a Inputs,
    files: Vec<(&'static str, PathBuf, String)>,
    group: Option<Arc<FiniteGroup>>,
}

impl<'a> Context<'a> {
    fn load(cli: &'a Cli) -> Result<(Self, String)> {
        let i = &cli.inputs;
        let flags: [(&'static str, &Option<PathBuf>); 8] = [
            ("group", &i.group),
            ("subgroup", &i.subgroup),
            ("weight", &i.weight),
            ("dist", &i.dist),
            ("idempotent", &i.idempotent),
            ("inner-subgroup", &i.inner_subgroup),
            ("matrix", &i.matrix),
            ("lumping", &i.lumping),
        ];
        let mut hasher = Sha256::new();
        hasher.update(cli.command.name().as_bytes());
        let mut files = Vec::new();
        for (flag, path) in flags {
            let Some(path) = path else { continue };
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
            hasher.update([0]);
            hasher.update(flag.as_bytes());
            hasher.update([0]);
            hasher.update(text.as_bytes());
            files.push((flag, path.clone(), text));
        }
        match &cli.command {
            Command::Simulate { .. } => hasher.update(format!("\0seed={}\0length={}", i.seed, i.length)),
            Command::Conditional { observe } => hasher.update(format!("\0observe={observe:?}")),
            Command::ThetaDim { direct } => hasher.update(format!("\0direct={direct}")),
            Command::AbelianTest { real_only } => hasher.update(format!("\0real_only={real_only}")),
            _ => {}
        }
        let digest = hasher.finalize().iter().map(|b| format!("{b:02x}")).collect();
        Ok((Context { inputs: i, files, group: None }, digest))
    }

    fn file(&self, flag: &str) -> Result<(&Path, &str)> {
        self.files
            .iter()
            .find(|(f, _, _)| *f == flag)
            .map(|(_, p, t)| (p.as_path(), t.as_str()))
            .ok_or_else(|| CliError::Usage(format!("this command needs --{flag}")))
    }

    fn parse<T>(&self, flag: &str, f: impl FnOnce(&str) -> weaklump::Result<T>) -> Result<T> {
        let (path, text) = self.file(flag)?;
        f(text).map_err(|source| CliError::Input { path: path.to_path_buf(), source })
    }

    fn has(&self, flag: &str) -> bool {
        self.files.iter().any(|(f, _, _)| *f == flag)
    }

    fn group(&mut self) -> Result<Arc<FiniteGroup>> {
        if self.group.is_none() {
            self.group = Some(self.parse("group", io::parse_group)?);
        }
        Ok(self.group.clone().unwrap())
    }

    fn subgroup(&mut self, flag: &str) -> Result<Subgroup> {
        let g = self.group()?;
        self.parse(flag, |t| io::parse_subgroup(&g, t))
    }

    fn problem(&mut self) -> Result<LumpingProblem> {
        Ok(LumpingProblem::new(&self.subgroup("subgroup")?)?)
    }

    fn weight(&mut self) -> Result<Weight> {
        let g = self.group()?;
        self.parse("weight", |t| io::parse_weight(&g, t))
    }

    fn dist(&mut self) -> Result<Distribution> {
        let g = self.group()?;
        self.parse("dist", |t| io::parse_distribution(&g, t))
    }

    fn dist_or_uniform(&mut self) -> Result<Distribution> {
        if self.has("dist") {
            self.dist()
        } else {
            Ok(Distribution::uniform(self.group()?.order()))
        }
    }

    fn element(&mut self) -> Result<AnyElement> {
        let g = self.group()?;
        self.parse("idempotent", |t| io::parse_element(&g, t))
    }

    fn mode(&self) -> ExecutionMode {
        if self.inputs.sequential {
            ExecutionMode::Sequential
        } else {
            ExecutionMode::default()
        }
    }
}

fn coset_label(p: &LumpingProblem, c: usize) -> String {
    format!("{}H", p.group().element(p.left_cosets().representatives[c]))
}

fn violation_text(p: &LumpingProblem, v: &CosetViolation) -> String {
    format!(
        "double coset {}: cosets {} ({}) and {} ({}) carry different weight",
        v.double_coset,
        v.first,
        coset_label(p, v.first),
        v.second,
        coset_label(p, v.second)
    )
}

pub fn run(cli: &Cli) -> Result<Report> {
    let start = Instant::now();
    let (mut ctx, digest) = Context::load(cli)?;
    let mut r = Report::new(&cli.command.name(), digest);
    match &cli.command {
        Command::Cosets => cosets(&mut ctx, &mut r)?,
        Command::DoubleCosets => double_coset_report(&mut ctx, &mut r)?,
        Command::Test { kind } => test(&mut ctx, &mut r, *kind)?,
        Command::Lw => {
            let (p, w) = (ctx.problem()?, ctx.weight()?);
            let ideal = p.compute_lw(&w)?;
            r.dimension("stable_ideal", ideal.dim());
            r.basis("stable_ideal_local", ideal.local().basis());
        }
        Command::Jw => {
            let (p, w) = (ctx.problem()?, ctx.weight()?);
            let (ideal, trace) = p.compute_jw(&w)?;
            r.dimension("maximal_ideal", ideal.dim());
            r.basis("maximal_ideal_local", ideal.local().basis());
            r.value("a_circ_dims", trace.a_circ);
            r.value("b_circ_dims", trace.b_circ);
        }
        Command::LAlpha => {
            let (p, w, alpha) = (ctx.problem()?, ctx.weight()?, ctx.dist()?);
            let v = p.compute_l_alpha_w(&w, &alpha)?;
            r.verdict("weak", v.holds);
            r.dimension("stable_ideal", v.ideal.dim());
            r.basis("stable_ideal_local", v.ideal.local().basis());
            if let Some((_, c)) = v.certificate {
                r.certificate("weak", format!("circ part of the ideal moves mass into coset {c} ({})", coset_label(&p, c)));
            }
        }
        Command::TestDist => {
            let (p, w, alpha) = (ctx.problem()?, ctx.weight()?, ctx.dist()?);
            r.verdict("weak", p.test_weak_distribution(&w, &alpha)?);
        }
        Command::StableCheck => {
            let (p, w, e) = (ctx.problem()?, ctx.weight()?, ctx.element()?);
            let check = match &e {
                AnyElement::Rational(e) => p.stable_ideal_check(&w, e)?,
                AnyElement::Cyclotomic(e) => p.stable_ideal_check(&w, e)?,
            };
            r.verdict("stable", check.holds());
            r.verdict("ideal_closed", check.ideal_closed);
            r.verdict("circ_closed", check.circ_closed);
        }
        Command::Dual => {
            let (p, e) = (ctx.problem()?, ctx.element()?);
            let text = match &e {
                AnyElement::Rational(e) => io::format_element(&p.dual_idempotent(e)?),
                AnyElement::Cyclotomic(e) => io::format_element(&p.dual_idempotent(e)?),
            };
            r.value("dual", text);
        }
        Command::Interpolate => {
            let (p, w, t) = (ctx.problem()?, ctx.weight()?, ctx.subgroup("inner-subgroup")?);
            let v = p.interpolation_test(&t, &w)?;
            r.verdict("interpolation", v.holds());
            r.verdict("exact_to_inner", v.exact_to_inner);
            r.verdict("proportional", v.proportional);
        }
        Command::ThetaDim { direct } => {
            let (p, e) = (ctx.problem()?, ctx.element()?);
            let mode = ctx.mode();
            let (d, full) = match &e {
                AnyElement::Rational(e) => {
                    (theta_dimension(&p, e, mode)?, direct.then(|| theta_dimension_direct(&p, e)).transpose()?)
                }
                AnyElement::Cyclotomic(e) => {
                    (theta_dimension(&p, e, mode)?, direct.then(|| theta_dimension_direct(&p, e)).transpose()?)
                }
            };
            r.dimension("theta", d.total);
            r.value("per_double_coset", d.per_double_coset);
            if let Some(full) = full {
                r.dimension("theta_direct", full);
                r.verdict("direct_agrees", full == d.total);
            }
        }
        Command::AbelianTest { real_only } => {
            let (p, w) = (ctx.problem()?, ctx.weight()?);
            let subsets = if *real_only { SubsetMode::RealOnly } else { SubsetMode::All };
            let v = abelian_weak_test(&p, &w, subsets, ctx.mode())?;
            r.verdict("weak", v.holds);
            r.value("subsets_tried", v.subsets_tried);
            r.value("characters", Value::from(v.table.characters.clone()));
            r.value("character_order", v.table.order);
            if let Some(witness) = v.witness {
                r.value("witness", witness);
            }
            if let Some(e) = v.idempotent {
                r.value("witness_idempotent", io::format_element(&e));
            }
        }
        Command::LumpedQ => {
            let (p, w) = (ctx.problem()?, ctx.weight()?);
            r.value("lumps", (0..p.index()).map(|c| coset_label(&p, c)).collect::<Vec<_>>());
            r.value("q", matrix(&p.lumped_matrix(&w)?));
        }
        Command::Orbital => orbital(&mut ctx, &mut r)?,
        Command::GenericTest => generic(&mut ctx, &mut r)?,
        Command::Conditional { observe } => conditional(&mut ctx, &mut r, observe)?,
        Command::Simulate { trajectory } => simulate(&mut ctx, &mut r, trajectory.as_deref())?,
    }
    if cli.inputs.timing {
        r.timing = Some(Timing { seconds: start.elapsed().as_secs_f64() });
    }
    Ok(r)
}

fn cosets(ctx: &mut Context, r: &mut Report) -> Result<()> {
    let p = ctx.problem()?;
    let list: Vec<Value> = (0..p.index())
        .map(|c| json!({ "index": c, "coset": coset_label(&p, c), "size": p.left_cosets().members[c].len() }))
        .collect();
    r.dimension("cosets", p.index());
    r.value("left_cosets", list);
    Ok(())
}

fn double_coset_report(ctx: &mut Context, r: &mut Report) -> Result<()> {
    let h = ctx.subgroup("subgroup")?;
    let t = if ctx.has("inner-subgroup") { ctx.subgroup("inner-subgroup")? } else { h.clone() };
    let g = ctx.group()?;
    let d = double_cosets(&t, &h)?;
    let list: Vec<Value> = (0..d.count())
        .map(|c| json!({ "index": c, "representative": g.element(d.representatives[c]).to_string(), "size": d.sizes[c] }))
        .collect();
    r.dimension("double_cosets", d.count());
    r.value("double_cosets", list);
    r.verdict("counting_identity", d.verify_counting_identity());
    Ok(())
}

fn test(ctx: &mut Context, r: &mut Report, kind: TestKind) -> Result<()> {
    let (p, w) = (ctx.problem()?, ctx.weight()?);
    match kind {
        TestKind::Strong => {
            let v = p.test_strong(&w)?;
            r.verdict("strong", v.is_none());
            if let Some(v) = v {
                r.certificate("strong", violation_text(&p, &v));
            }
        }
        TestKind::Exact => {
            let v = p.test_exact(&w)?;
            r.verdict("exact", v.is_none());
            if let Some(v) = v {
                r.certificate("exact", violation_text(&p, &v));
            }
        }
        TestKind::Weak => {
            let report = p.analyze(&w)?;
            let weak = report.weak.ok_or_else(|| {
                weaklump::Error::Domain(
                    "weight is reducible and lumps neither strongly nor exactly; use test-dist with an initial distribution"
                        .into(),
                )
            })?;
            r.verdict("weak", weak);
            r.verdict("strong", report.strong);
            r.verdict("exact", report.exact);
            if let Some(d) = report.stable_ideal_dim {
                r.dimension("stable_ideal", d);
                r.basis("stable_ideal_local", &report.stable_ideal_local_basis);
            }
            if let Some(q) = &report.lumped_matrix {
                r.value("q", matrix(q));
            }
            if let Some(c) = report.certificate {
                r.certificate("weak", c);
            }
        }
    }
    Ok(())
}

fn orbital(ctx: &mut Context, r: &mut Report) -> Result<()> {
    let p = ctx.problem()?;
    let g = p.group().clone();
    let list: Vec<Value> = orbital_matrices(&p)
        .iter()
        .map(|o| {
            let rows: Vec<String> =
                o.entries.iter().map(|row| row.iter().map(u8::to_string).collect::<Vec<_>>().join(" ")).collect();
            json!({
                "double_coset": o.double_coset,
                "representative": g.element(p.double_cosets().representatives[o.double_coset]).to_string(),
                "row_count": o.row_count,
                "matrix": rows,
            })
        })
        .collect();
    r.dimension("hecke_algebra", list.len());
    r.value("orbitals", list);
    let iso = verify_hecke_isomorphism(&p);
    r.verdict("isomorphism", iso.holds());
    r.verdict("homomorphism", iso.homomorphism);
    r.verdict("anti_homomorphism", iso.anti_homomorphism);
    r.verdict("injective", iso.injective);
    if ctx.has("matrix") {
        let q = ctx.parse("matrix", io::parse_matrix)?;
        let c = check_q_characterization(&p, &q)?;
        r.verdict("invariant", c.invariant);
        if let Some(coeffs) = c.coefficients {
            r.value("coefficients", scalars(&coeffs));
        }
        if let Some(w) = c.realizing_weight {
            r.value("realizing_weight", io::format_element(&w.to_element(&p)));
        }
        if let Some((a, b)) = c.violation {
            r.certificate("invariant", format!("entry ({a}, {b}) differs from its translate"));
        }
    }
    Ok(())
}

fn generic(ctx: &mut Context, r: &mut Report) -> Result<()> {
    let (f, chain, alpha, labels) = if ctx.has("matrix") {
        let chain = TransitionMatrix::new(ctx.parse("matrix", io::parse_matrix)?)?;
        let n = chain.states();
        let (f, labels) = ctx.parse("lumping", |t| io::parse_lumping(t, n))?;
        let alpha = if ctx.has("dist") {
            Distribution::new(ctx.parse("dist", io::parse_vector)?)?
        } else {
            stationary_distribution(&chain)?
        };
        (f, chain, alpha, labels)
    } else {
        let (p, w) = (ctx.problem()?, ctx.weight()?);
        let alpha = ctx.dist_or_uniform()?;
        let labels = (0..p.index()).map(|c| coset_label(&p, c)).collect();
        (LumpingFunction::from_cosets(p.left_cosets()), transition_from_weight(&w), alpha, labels)
    };
    if alpha.len() != chain.states() {
        return Err(CliError::Usage(format!("distribution has {} entries, chain has {} states", alpha.len(), chain.states())));
    }
    r.value("lumps", labels);
    let strong = test_strong_generic(&f, &chain)?;
    r.verdict("strong", strong.is_none());
    if let Some(v) = strong {
        r.certificate(
            "strong",
            format!("states {} and {} send different mass to lump {}", v.state, v.other, v.target_lump),
        );
    }
    let exact = test_exact_generic(&f, &chain, &alpha)?;
    r.verdict("exact", exact.holds);
    let weak = test_weak_generic(&f, &chain, &alpha)?;
    r.verdict("weak", weak.holds);
    if let Some(c) = &weak.certificate {
        r.basis("weak_certificate", std::slice::from_ref(c));
    }
    let space = minimal_gl_space(&f, &chain, &alpha)?;
    r.dimension("minimal_space", space.space.dim());
    r.dimension("minimal_space_circ", space.circ(&f).dim());
    Ok(())
}

fn conditional(ctx: &mut Context, r: &mut Report, observe: &[usize]) -> Result<()> {
    let (p, w, alpha) = (ctx.problem()?, ctx.weight()?, ctx.dist()?);
    let f = LumpingFunction::from_cosets(p.left_cosets());
    let chain = transition_from_weight(&w);
    let law = conditional_distribution(&f, &chain, &alpha, observe)?;
    let g = p.group().clone();
    let state = Element::from_coeffs(&g, law.probabilities().to_vec());
    r.value("state_law", io::format_element(&state));
    let base = sequence_probability(&f, &chain, &alpha, observe);
    let next: Vec<Rational> = (0..f.lumps())
        .map(|b| {
            let mut longer = observe.to_vec();
            longer.push(b);
            sequence_probability(&f, &chain, &alpha, &longer).div(&base).expect("prefix has positive probability")
        })
        .collect();
    r.value("lumps", (0..p.index()).map(|c| coset_label(&p, c)).collect::<Vec<_>>());
    r.value("next_lump_law", scalars(&next));
    r.value("observation_probability", base.to_string());
    Ok(())
}

fn simulate(ctx: &mut Context, r: &mut Report, trajectory: Option<&Path>) -> Result<()> {
    let (p, w) = (ctx.problem()?, ctx.weight()?);
    let alpha = ctx.dist_or_uniform()?;
    let (seed, length) = (ctx.inputs.seed, ctx.inputs.length);
    let path = simulate_walk(&p, &w, &alpha, seed, length)?;
    if let Some(out) = trajectory {
        let text: String = path.lumps.iter().map(|b| format!("{b}\n")).collect();
        std::fs::write(out, text).map_err(|source| CliError::Io { path: out.to_path_buf(), source })?;
    }
    let exact = p.lumped_matrix(&w)?;
    let (dev, bound) = max_transition_deviation(&path.lumps, &exact);
    r.value("seed", seed);
    r.value("length", length);
    r.value("max_deviation", format!("{dev:.6}"));
    r.value("deviation_bound", format!("{bound:.6}"));
    r.verdict("within_bound", dev <= bound);
    let report = markov_diagnostic(&[path.lumps], p.index(), &DiagnosticConfig::default());
    r.verdict("no_order2_flags", report.flagged.is_empty());
    r.dimension("contexts_tested", report.contexts_tested);
    let flagged: Vec<Value> = report
        .flagged
        .iter()
        .map(|c| {
            json!({
                "previous": c.previous,
                "current": c.current,
                "count": c.count,
                "statistic": format!("{:.3}", c.statistic),
                "threshold": format!("{:.3}", c.threshold),
                "missing": c.missing,
            })
        })
        .collect();
    r.value("flagged_contexts", flagged);
    if !report.warnings.is_empty() {
        r.value("warnings", report.warnings);
    }
    Ok(())
}
