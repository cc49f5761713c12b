//! Flags, the JSON config file, and their merge into one resolved run configuration.

use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    BuildMesh,
    Mz,
    Bernstein,
    Markov,
    Sharpness,
    Lemma73,
    OscCheck,
    Steklov,
    Sanity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Nodes {
    Center,
    Random,
    Corner,
}

#[derive(Debug, Parser)]
#[command(
    name = "mzmesh",
    version,
    about = "Marcinkiewicz-Zygmund meshes and inequality experiments on C^alpha graph domains"
)]
pub struct Cli {
    /// what to run; may also come from the config file
    #[arg(value_enum)]
    pub command: Option<Command>,
    /// JSON file with the same keys as the flags (dashes become underscores)
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// model domain id: flat, quad, trig or alpha:<a>
    #[arg(long)]
    pub domain: Option<String>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    /// comma separated degrees
    #[arg(long, value_delimiter = ',')]
    pub n_list: Option<Vec<usize>>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub b: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub ensemble: Option<usize>,
    #[arg(long, value_enum)]
    pub nodes: Option<Nodes>,
    #[arg(long)]
    pub c0: Option<f64>,
    /// Gauss points per panel, base and vertical
    #[arg(long)]
    pub quad_order: Option<usize>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub out_json: Option<PathBuf>,
    #[arg(long)]
    pub out_csv: Option<PathBuf>,
    /// defaults to MZMESH_THREADS, then to all cores
    #[arg(long, env = "MZMESH_THREADS")]
    pub threads: Option<usize>,
    /// build meshes outside the proven parameter range
    #[arg(long)]
    pub force: bool,
    /// print the resolved configuration and exit
    #[arg(long)]
    pub print_config: bool,
}

/// The config file, and the resolved configuration after flags are applied.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes: Option<Nodes>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quad_order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_json: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_csv: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default)]
    pub force: bool,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    /// Flags win over the file.
    pub fn merge(file: RunConfig, cli: &Cli) -> RunConfig {
        RunConfig {
            command: cli.command.or(file.command),
            domain: cli.domain.clone().or(file.domain),
            d: cli.d.or(file.d),
            alpha: cli.alpha.or(file.alpha),
            n: cli.n.or(file.n),
            n_list: cli.n_list.clone().or(file.n_list),
            p: cli.p.or(file.p),
            epsilon: cli.epsilon.or(file.epsilon),
            mu: cli.mu.or(file.mu),
            beta: cli.beta.or(file.beta),
            b: cli.b.or(file.b),
            seed: cli.seed.or(file.seed),
            ensemble: cli.ensemble.or(file.ensemble),
            nodes: cli.nodes.or(file.nodes),
            c0: cli.c0.or(file.c0),
            quad_order: cli.quad_order.or(file.quad_order),
            rel_tol: cli.rel_tol.or(file.rel_tol),
            out_json: cli.out_json.clone().or(file.out_json),
            out_csv: cli.out_csv.clone().or(file.out_csv),
            threads: cli.threads.or(file.threads),
            force: cli.force || file.force,
        }
    }

    /// Range checks that do not depend on the command.
    pub fn validate(&self) -> Result<(), String> {
        let pos = |name: &str, v: Option<f64>| match v {
            Some(x) if !(x > 0.0 && x.is_finite()) => {
                Err(format!("--{name} must be positive and finite, got {x}"))
            }
            _ => Ok(()),
        };
        pos("p", self.p)?;
        pos("c0", self.c0)?;
        pos("rel-tol", self.rel_tol)?;
        if let Some(e) = self.epsilon {
            if !(e > 0.0 && e <= 1.0) {
                return Err(format!("--epsilon must lie in (0, 1], got {e}"));
            }
        }
        if let Some(a) = self.alpha {
            if !(a > 0.0 && a <= 2.0) {
                return Err(format!("--alpha must lie in (0, 2], got {a}"));
            }
        }
        if let Some(m) = self.mu {
            if !(m > 1.0 && m.is_finite()) {
                return Err(format!("--mu must exceed 1, got {m}"));
            }
        }
        if let Some(b) = self.beta {
            if !(b > -1.0 && b.is_finite()) {
                return Err(format!("--beta must exceed -1, got {b}"));
            }
        }
        if matches!(self.d, Some(d) if d < 2) {
            return Err("--d must be at least 2".into());
        }
        for (name, v) in [
            ("n", self.n),
            ("b", self.b),
            ("ensemble", self.ensemble),
            ("quad-order", self.quad_order),
            ("threads", self.threads),
        ] {
            if v == Some(0) {
                return Err(format!("--{name} must be positive"));
            }
        }
        if let Some(l) = &self.n_list {
            if l.is_empty() || l.contains(&0) {
                return Err("--n-list needs positive degrees".into());
            }
        }
        if self.command.is_none() {
            return Err("no command given".into());
        }
        Ok(())
    }
}
