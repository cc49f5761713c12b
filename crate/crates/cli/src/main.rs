mod config;

use std::fs::File;
use std::io::BufWriter;
use std::process::ExitCode;

use clap::Parser;

use config::{Cli, Command, Nodes, RunConfig};
use mzmesh_core::domain::GraphDomain;
use mzmesh_core::integrate::QuadratureSpec;
use mzmesh_core::mesh::{build_mesh, MeshParams, NodePolicy};
use mzmesh_core::Error;
use mzmesh_verify::common::model_domain;
use mzmesh_verify::*;

/// Exit 2: bad configuration. Exit 1: the run failed or its verdict is negative.
enum Failure {
    Config(String),
    Run(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parameter(_) | Error::Config(_) | Error::UnknownModel(_) => {
                Failure::Config(e.to_string())
            }
            _ => Failure::Run(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Run(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Config(m)) => {
            eprintln!("configuration error: {m}");
            ExitCode::from(2)
        }
    }
}

fn resolve(cli: &Cli) -> Result<RunConfig, Failure> {
    let file = match &cli.config {
        Some(p) => RunConfig::load(p).map_err(Failure::Config)?,
        None => RunConfig::default(),
    };
    let mut rc = RunConfig::merge(file, cli);
    if rc.seed.is_none() {
        let t = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_nanos() as u64)
            .unwrap_or(7);
        rc.seed = Some(t);
    }
    rc.validate().map_err(Failure::Config)?;
    Ok(rc)
}

fn run(cli: &Cli) -> Result<bool, Failure> {
    let rc = resolve(cli)?;
    if cli.print_config {
        println!(
            "{}",
            serde_json::to_string_pretty(&rc).map_err(|e| Failure::Run(e.to_string()))?
        );
        return Ok(true);
    }
    if let Some(t) = rc.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure::Run(e.to_string()))?;
    }
    let command = rc.command.expect("validated");
    if command == Command::BuildMesh {
        return build_mesh_cmd(&rc);
    }
    let report = dispatch(command, &rc)?;
    if let Some(p) = &rc.out_json {
        report
            .write_json(p)
            .map_err(|e| Failure::Run(format!("{}: {e}", p.display())))?;
    }
    if let Some(p) = &rc.out_csv {
        let f = File::create(p).map_err(|e| Failure::Run(format!("{}: {e}", p.display())))?;
        report
            .write_csv(BufWriter::new(f))
            .map_err(|e| Failure::Run(e.to_string()))?;
    }
    println!("{}", report.verdict_line());
    Ok(report.passed())
}

fn domain_id(rc: &RunConfig) -> Result<String, Failure> {
    match (&rc.domain, rc.alpha) {
        (Some(d), _) => Ok(d.clone()),
        (None, Some(a)) => Ok(format!("alpha:{a}")),
        (None, None) => Err(Failure::Config("--domain or --alpha is required".into())),
    }
}

fn quad(rc: &RunConfig, base: QuadratureSpec) -> QuadratureSpec {
    let mut q = base;
    if let Some(o) = rc.quad_order {
        q.outer_order = o;
        q.panel_order = o;
    }
    if let Some(t) = rc.rel_tol {
        q.rel_tol = t;
    }
    q
}

fn node_policy(rc: &RunConfig) -> NodePolicy {
    match rc.nodes.unwrap_or(Nodes::Center) {
        Nodes::Center => NodePolicy::Center,
        Nodes::Random => NodePolicy::Random {
            seed: rc.seed.unwrap_or(7),
        },
        Nodes::Corner => NodePolicy::Corner,
    }
}

fn n_list(rc: &RunConfig) -> Vec<usize> {
    rc.n_list.clone().unwrap_or_else(|| vec![4, 8, 16, 32])
}

fn build_mesh_cmd(rc: &RunConfig) -> Result<bool, Failure> {
    let id = domain_id(rc)?;
    let dom = model_domain(&id, rc.d.unwrap_or(2), GraphDomain::mesh_setting)?;
    let alpha = dom.g().alpha();
    if let Some(a) = rc.alpha {
        if rc.domain.is_some() && a != alpha {
            return Err(Failure::Config(format!(
                "--alpha {a} disagrees with domain {id} (alpha {alpha})"
            )));
        }
    }
    let n =
        rc.n.ok_or_else(|| Failure::Config("--n is required".into()))?;
    let mut params =
        MeshParams::new(n, rc.epsilon.unwrap_or(0.25), alpha).with_policy(node_policy(rc));
    if let Some(c0) = rc.c0 {
        params = params.with_c0(c0);
    }
    let mesh = build_mesh(&dom, params, rc.force)?;
    for w in mesh.warnings() {
        eprintln!("warning: {w}");
    }
    if let Some(p) = &rc.out_json {
        let f = File::create(p).map_err(|e| Failure::Run(format!("{}: {e}", p.display())))?;
        serde_json::to_writer_pretty(BufWriter::new(f), &mesh.to_json())
            .map_err(|e| Failure::Run(e.to_string()))?;
    }
    if let Some(p) = &rc.out_csv {
        let f = File::create(p).map_err(|e| Failure::Run(format!("{}: {e}", p.display())))?;
        mesh.write_csv(BufWriter::new(f))?;
    }
    println!(
        "build-mesh: domain {id}, d = {}, m = {}, gamma = {}, cells = {}, measure = {}",
        mesh.dim(),
        mesh.m(),
        mesh.params().gamma(),
        mesh.cell_count(),
        mesh.total_measure()
    );
    Ok(true)
}

fn dispatch(command: Command, rc: &RunConfig) -> Result<ExperimentReport, Failure> {
    let seed = rc.seed.unwrap_or(7);
    let d = rc.d.unwrap_or(2);
    let p = rc.p.unwrap_or(2.0);
    let report = match command {
        Command::BuildMesh => unreachable!("handled separately"),
        Command::Mz => {
            let n =
                rc.n.ok_or_else(|| Failure::Config("--n is required".into()))?;
            let mut cfg = MzConfig::new(&domain_id(rc)?, d, n, p, rc.epsilon.unwrap_or(0.25));
            cfg.seed = seed;
            cfg.node_policy = node_policy(rc);
            cfg.force = rc.force;
            if let Some(e) = rc.ensemble {
                cfg.ensemble_size = e;
            }
            if let Some(c0) = rc.c0 {
                cfg.c0 = c0;
            }
            cfg.quad = quad(rc, cfg.quad);
            mz_experiment(&cfg)?
        }
        Command::Bernstein => {
            let mut cfg = BernsteinConfig::new(&domain_id(rc)?, &n_list(rc), p);
            cfg.seed = seed;
            if let Some(e) = rc.ensemble {
                cfg.ensemble_size = e;
            }
            cfg.quad = quad(rc, cfg.quad);
            bernstein_experiment(&cfg)?
        }
        Command::Markov => {
            let mut cfg = MarkovConfig::new(&domain_id(rc)?, &n_list(rc), p, rc.mu.unwrap_or(2.0));
            cfg.seed = seed;
            if let Some(e) = rc.ensemble {
                cfg.ensemble_size = e;
            }
            cfg.quad = quad(rc, cfg.quad);
            markov_experiment(&cfg)?
        }
        Command::Sharpness => {
            let alpha = rc
                .alpha
                .ok_or_else(|| Failure::Config("--alpha is required".into()))?;
            let mut cfg = SharpnessConfig::new(
                alpha,
                d,
                &rc.n_list.clone().unwrap_or_else(|| vec![8, 16, 32, 64]),
                p,
            );
            cfg.beta = rc.beta;
            cfg.b = rc.b;
            cfg.quad = quad(rc, cfg.quad);
            sharpness_experiment(&cfg)?
        }
        Command::Lemma73 => {
            let mut cfg = Lemma73Config::new(&n_list(rc), rc.beta.unwrap_or(1.0), p);
            cfg.seed = seed;
            if let Some(e) = rc.ensemble {
                cfg.ensemble_size = e;
            }
            lemma73_experiment(&cfg)?
        }
        Command::OscCheck => {
            let eps = match rc.epsilon {
                Some(e) => vec![e],
                None => vec![0.5, 0.25, 0.125],
            };
            let mut cfg = OscConfig::new(&domain_id(rc)?, d, rc.n.unwrap_or(8), p, &eps);
            cfg.seed = seed;
            if let Some(e) = rc.ensemble {
                cfg.ensemble_size = e;
            }
            if let Some(c0) = rc.c0 {
                cfg.c0 = c0;
            }
            cfg.quad = quad(rc, cfg.quad);
            cell_oscillation_check(&cfg)?
        }
        Command::Steklov => {
            let mut cfg = SteklovConfig::default();
            if let Some(a) = rc.alpha {
                cfg.alphas = vec![a];
            }
            steklov_experiment(&cfg)?
        }
        Command::Sanity => {
            let mut cfg = SanityConfig {
                seed,
                ..SanityConfig::default()
            };
            if let Some(e) = rc.ensemble {
                cfg.ball_ensemble = e;
            }
            classical_sanity_suite(&cfg)?
        }
    };
    Ok(report)
}
