//! Executes a configuration and writes its artifacts into a fresh run
//! directory.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use super::config::{
    jsr_matrices, matrix_from_rows, ExperimentConfig, FlowSystem, Kind, SpectrumParams,
};
use crate::dynamics::{self, FixedPointOptions};
use crate::error::{Error, Result};
use crate::flows::{self, ExitConfig, MatrixFlowProblem, PolynomialMap};
use crate::mixing::check_translation_commutation;
use crate::schema::{self, EquivalenceRelation};
use crate::spectral;

/// One output file: name within the run directory and its contents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

impl Artifact {
    fn json<T: Serialize>(name: &str, value: &T) -> Result<Self> {
        let mut contents = serde_json::to_string_pretty(value)?;
        contents.push('\n');
        Ok(Artifact {
            name: name.to_string(),
            contents,
        })
    }

    fn csv(name: &str, contents: String) -> Self {
        Artifact {
            name: name.to_string(),
            contents,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
}

/// First 12 hex digits of the SHA-256 of the canonical config.
pub fn config_hash(config: &ExperimentConfig) -> String {
    let digest = Sha256::digest(config.canonical_json().as_bytes());
    hex::encode(digest)[..12].to_string()
}

/// Output root: `OUT_DIR` if set, else the config's `output`, else `runs`.
pub fn output_root(config: &ExperimentConfig) -> PathBuf {
    std::env::var_os("OUT_DIR")
        .map(PathBuf::from)
        .or_else(|| config.output.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("runs"))
}

fn create_run_dir(root: &Path, config: &ExperimentConfig) -> Result<PathBuf> {
    std::fs::create_dir_all(root)?;
    let stamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0);
    let base = format!("{}-{}-{stamp}", config.kind.name(), config_hash(config));
    for attempt in 0.. {
        let name = if attempt == 0 { base.clone() } else { format!("{base}-{attempt}") };
        let dir = root.join(name);
        match std::fs::create_dir(&dir) {
            Ok(()) => return Ok(dir),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => continue,
            Err(e) => return Err(e.into()),
        }
    }
    unreachable!("attempt counter is unbounded")
}

fn write_once(path: &Path, contents: &str) -> Result<()> {
    let mut file = OpenOptions::new().write(true).create_new(true).open(path)?;
    file.write_all(contents.as_bytes())?;
    Ok(())
}

/// Runs the experiment and writes `config.json` plus its artifacts into a
/// new directory under `root`.
pub fn run_into(config: &ExperimentConfig, root: &Path) -> Result<RunOutcome> {
    let artifacts = execute(config)?;
    let dir = create_run_dir(root, config)?;
    let mut files = Vec::new();
    let mut all = vec![Artifact {
        name: "config.json".into(),
        contents: config.canonical_json() + "\n",
    }];
    all.extend(artifacts);
    for a in &all {
        let path = dir.join(&a.name);
        write_once(&path, &a.contents)?;
        files.push(path);
    }
    Ok(RunOutcome { dir, files })
}

pub fn run_file(path: &Path) -> Result<RunOutcome> {
    let config = ExperimentConfig::from_file(path)?;
    run_into(&config, &output_root(&config))
}

/// Computes all artifacts of a configuration without touching the disk.
pub fn execute(config: &ExperimentConfig) -> Result<Vec<Artifact>> {
    config.validate()?;
    match config.kind {
        Kind::Orbits => orbits(config),
        Kind::Schema => schema_kind(config),
        Kind::Coverage => coverage(config),
        Kind::Mix => mix(config),
        Kind::Evolve => evolve(config),
        Kind::Sample => sample(config),
        Kind::Flow => flow(config),
        Kind::Spectrum => spectrum(config),
        Kind::Jsr => jsr(config),
    }
}

fn orbits(config: &ExperimentConfig) -> Result<Vec<Artifact>> {
    let group = config.group()?;
    let partition = group.orbit_partition();
    let points: Vec<_> = config
        .orbits
        .clone()
        .unwrap_or_default()
        .points
        .iter()
        .map(|&p| {
            json!({
                "point": p,
                "orbit": group.orbit_of(p),
                "stabilizer_order": group.stabilizer_of(p).order(),
            })
        })
        .collect();
    let report = json!({
        "group_order": group.order(),
        "classes": partition,
        "invariant_points": group.invariant_points(),
        "points": points,
    });
    Ok(vec![Artifact::json("orbits.json", &report)?])
}

fn binary_masks(config: &ExperimentConfig, masks: Option<&Vec<usize>>) -> Result<Vec<usize>> {
    let space = config.space()?;
    Ok(match masks {
        Some(m) => m.clone(),
        None => (0..space.n()).filter(|&s| space.is_binary_raw(s)).collect(),
    })
}

fn schema_kind(config: &ExperimentConfig) -> Result<Vec<Artifact>> {
    let space = config.space()?;
    let params = config.schema.clone().unwrap_or_default();
    let masks = binary_masks(config, params.masks.as_ref())?;
    let mut rows = Vec::new();
    for (i, &s) in masks.iter().enumerate() {
        let field = |e: Error| Error::validation(format!("schema.masks[{i}]"), e.to_string());
        let direct = EquivalenceRelation::from_mask(&space, s).map_err(field)?;
        let via = schema::schema_via_translations(&space, s)?;
        rows.push(json!({
            "mask": s,
            "classes": direct,
            "agrees_with_translation_orbits": direct == via,
        }));
    }
    Ok(vec![Artifact::json("schema.json", &json!({ "families": rows }))?])
}

fn coverage(config: &ExperimentConfig) -> Result<Vec<Artifact>> {
    let space = config.space()?;
    let params = config.coverage.clone().unwrap_or_default();
    let relations = match &params.masks {
        None => schema::digit_relations(&space),
        Some(masks) => masks
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                EquivalenceRelation::from_mask(&space, s)
                    .map_err(|e| Error::validation(format!("coverage.masks[{i}]"), e.to_string()))
            })
            .collect::<Result<Vec<_>>>()?,
    };
    if relations.is_empty() {
        return Err(Error::validation("coverage.masks", "at least one relation is required"));
    }
    let cov = schema::covers(&relations)?;
    let image = schema::chromosome_image(&relations)?;
    let report = json!({
        "covers": cov.covers,
        "witness": cov.witness,
        "image_size": image.size(),
        "n": space.n(),
        "tuples": image.tuples,
    });
    Ok(vec![Artifact::json("coverage.json", &report)?])
}

fn mix(config: &ExperimentConfig) -> Result<Vec<Artifact>> {
    let h = config.heuristic()?;
    let params = config.mix.clone().unwrap_or_default();
    let p = config.start(&params.population, "mix.population")?;
    check_translation_commutation(h.kernel())?;
    let selected = h.select(&p)?;
    let mixed = h.mix(&p)?;
    let next = h.generation(&p)?;
    let mut csv = String::from("genome,p,fitness,select,mix,generation\n");
    for g in 0..p.len() {
        csv.push_str(&format!(
            "{g},{},{},{},{},{}\n",
            p.as_slice()[g],
            h.fitness()[g],
            selected.as_slice()[g],
            mixed.as_slice()[g],
            next.as_slice()[g]
        ));
    }
    Ok(vec![
        Artifact::csv("mix.csv", csv),
        Artifact::csv("mixing_matrix.csv", matrix_csv(h.mixing().entries())),
    ])
}

fn matrix_csv(m: &DMatrix<f64>) -> String {
    let mut out = String::from("row");
    for j in 0..m.ncols() {
        out.push_str(&format!(",{j}"));
    }
    out.push('\n');
    for i in 0..m.nrows() {
        out.push_str(&i.to_string());
        for j in 0..m.ncols() {
            out.push_str(&format!(",{}", m[(i, j)]));
        }
        out.push('\n');
    }
    out
}

fn evolve(config: &ExperimentConfig) -> Result<Vec<Artifact>> {
    let h = config.heuristic()?;
    let params = config.evolve.clone().unwrap_or_default();
    let p0 = config.start(&params.start, "evolve.start")?;
    let traj = dynamics::iterate(&h, &p0, params.steps, params.tol)?;
    let mut summary = json!({
        "steps": traj.states.len() - 1,
        "stop": traj.stop,
        "final": traj.last(),
    });
    if params.fixed_point {
        let fp = dynamics::find_fixed_point(&h, traj.last(), FixedPointOptions::default())?;
        summary["fixed_point"] = serde_json::to_value(&fp)?;
    }
    Ok(vec![
        Artifact::csv("trajectory.csv", traj.to_csv()),
        Artifact::json("summary.json", &summary)?,
    ])
}

fn sample(config: &ExperimentConfig) -> Result<Vec<Artifact>> {
    let h = config.heuristic()?;
    let params = config.sample.clone().unwrap_or_default();
    let p0 = config.start(&params.start, "sample.start")?;
    let seeds: Vec<u64> = (0..params.runs as u64).map(|i| config.seed.wrapping_add(i)).collect();
    let stats = dynamics::model_vs_sample(&h, &p0, params.mu, params.steps, &seeds)?;
    let mut csv = String::from("step,median_linf,max_linf\n");
    for s in &stats {
        csv.push_str(&format!("{},{},{}\n", s.step, s.median, s.max));
    }
    Ok(vec![Artifact::csv("sample.csv", csv)])
}

fn required<'a, T>(value: &'a Option<T>, field: &str) -> Result<&'a T> {
    value
        .as_ref()
        .ok_or_else(|| Error::validation(field, "required for this flow system"))
}

fn flow(config: &ExperimentConfig) -> Result<Vec<Artifact>> {
    let p = config.flow_params()?;
    let cfg = &p.integrator;
    let constraint = || -> Result<PolynomialMap> { required(&p.constraint, "flow.constraint")?.build() };
    let objective = || required(&p.objective, "flow.objective")?.build();
    let x0 = || required(&p.x0, "flow.x0");
    let result = match p.system {
        FlowSystem::Gradient => flows::gradient_flow(&objective()?, x0()?, cfg)?,
        FlowSystem::Quotient => flows::quotient_gradient_flow(&constraint()?, x0()?, cfg)?,
        FlowSystem::Projected => flows::projected_gradient_flow(&objective()?, &constraint()?, x0()?, cfg)?,
        FlowSystem::Exit => {
            let obj = objective()?;
            let con = p.constraint.as_ref().map(|c| c.build()).transpose()?;
            let e = p.exit.unwrap_or_default();
            let exit_cfg = ExitConfig {
                step: e.step,
                horizon: e.horizon,
                tol: e.tol,
            };
            let dir = required(&p.direction, "flow.direction")?;
            let report = flows::exit_point_search(&obj, con.as_ref(), x0()?, dir, &exit_cfg)?;
            return Ok(vec![Artifact::json("exit.json", &report)?]);
        }
        FlowSystem::DoubleBracket => {
            let m = required(&p.matrix, "flow.matrix")?;
            let a = matrix_from_rows("flow.matrix.a", &m.a)?;
            let problem = match &m.n {
                Some(n) => MatrixFlowProblem::new(a, n.clone(), *cfg)?,
                None => MatrixFlowProblem::ascending(a, *cfg)?,
            };
            let r = flows::double_bracket_flow(&problem)?;
            return Ok(vec![
                Artifact::csv("trajectory.csv", r.to_csv()),
                Artifact::json("result.json", &r)?,
            ]);
        }
    };
    Ok(vec![
        Artifact::csv("trajectory.csv", result.to_csv()),
        Artifact::json("result.json", &result)?,
    ])
}

fn spectrum(config: &ExperimentConfig) -> Result<Vec<Artifact>> {
    let report = match config.spectrum_params()? {
        SpectrumParams::Mutation => serde_json::to_value(spectral::spectrum(&config.kernel()?.mutation_matrix()?)?)?,
        SpectrumParams::Mixing => {
            let h = crate::mixing::MixingMatrix::from_kernel(&config.kernel()?)?;
            serde_json::to_value(spectral::spectrum(h.entries())?)?
        }
        SpectrumParams::EaMap { start } => {
            let h = config.heuristic()?;
            let p0 = config.start(start, "spectrum.start")?;
            let fp = dynamics::find_fixed_point(&h, &p0, FixedPointOptions::default())?;
            let s = spectral::ea_map_spectrum(&h, &fp.point)?;
            let mut v = serde_json::to_value(&s)?;
            v["fixed_point"] = serde_json::to_value(&fp.point)?;
            v["classification"] = serde_json::to_value(fp.classification)?;
            v
        }
        SpectrumParams::Matrix { rows } => {
            serde_json::to_value(spectral::spectrum(&matrix_from_rows("spectrum.rows", rows)?)?)?
        }
        SpectrumParams::Dft { vector } => {
            let x: Vec<Complex64> = vector.iter().map(|&v| Complex64::new(v, 0.0)).collect();
            let xh = spectral::group_dft(&config.space()?, &x)?;
            json!({ "transform": xh.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>() })
        }
    };
    Ok(vec![Artifact::json("spectrum.json", &report)?])
}

fn jsr(config: &ExperimentConfig) -> Result<Vec<Artifact>> {
    let p = config.jsr_params()?;
    let set = jsr_matrices(p)?;
    let bounds = spectral::jsr_bounds(&set, p.depth)?;
    let mut csv = String::from("depth,lower,upper\n");
    for (j, (lo, up)) in bounds.by_depth.iter().enumerate() {
        csv.push_str(&format!("{},{lo},{up}\n", j + 1));
    }
    Ok(vec![Artifact::csv("jsr.csv", csv), Artifact::json("jsr.json", &bounds)?])
}
