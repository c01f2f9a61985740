use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use goi_core::compiler::{Threshold, DEFAULT_THRESHOLD};
use goi_core::ripper::RipperConfig;
use goi_core::script::RunConfig;
use goi_core::text::SerializationConfig;
use goi_core::visit::MatchPolicy;
use serde_json::json;

use crate::error::Error;
use crate::formats::{self, document, json_text, write_output, SCHEMAS};
use crate::pipeline::{self, View};

#[derive(Debug, Parser)]
#[command(
    name = "goi",
    about = "Rip, compile, serialize and drive GUI navigation topologies",
    disable_version_flag = true
)]
pub struct Cli {
    /// Print the crate and document schema versions.
    #[arg(long = "version", short = 'V')]
    pub version: bool,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Explore a simulated application into a navigation graph.
    Rip {
        #[arg(long)]
        app: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decycle and externalize a graph into a forest.
    Compile {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Externalization threshold: a number or `inf`.
        #[arg(long, default_value_t = Threshold::Finite(DEFAULT_THRESHOLD))]
        threshold: Threshold,
    },
    /// Render a forest as topology text.
    Serialize {
        #[arg(long)]
        forest: PathBuf,
        #[arg(long, conflicts_with = "expand")]
        core: bool,
        /// Comma-separated display ids, or -1 for everything.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        expand: Option<Vec<i64>>,
        #[arg(long, default_value = "-")]
        out: PathBuf,
        #[command(flatten)]
        view: ViewFlags,
    },
    /// Run a script against a simulated application and write the report.
    Exec {
        #[arg(long)]
        forest: PathBuf,
        #[arg(long)]
        app: PathBuf,
        #[arg(long)]
        script: PathBuf,
        #[arg(long)]
        report: PathBuf,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Run a script, check assertions and write metrics.
    Replay {
        #[arg(long)]
        forest: PathBuf,
        #[arg(long)]
        app: PathBuf,
        #[arg(long)]
        script: PathBuf,
        #[arg(long = "assert")]
        assertions: PathBuf,
        #[arg(long)]
        metrics: PathBuf,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Check that a forest's access specs biject with its graph's paths.
    Verify {
        #[arg(long)]
        forest: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Clone, Args)]
pub struct ViewFlags {
    #[arg(long)]
    pub core_depth: Option<usize>,
    #[arg(long)]
    pub description_limit: Option<usize>,
    #[arg(long)]
    pub collapse_threshold: Option<usize>,
}

impl ViewFlags {
    fn config(&self) -> SerializationConfig {
        let mut cfg = SerializationConfig::default();
        if let Some(d) = self.core_depth {
            cfg.core_depth = d;
        }
        if let Some(d) = self.description_limit {
            cfg.description_char_limit = d;
        }
        if let Some(c) = self.collapse_threshold {
            cfg.enumeration_collapse_threshold = c;
        }
        cfg
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunFlags {
    #[arg(long)]
    pub max_retries: Option<usize>,
    #[arg(long)]
    pub similarity_threshold: Option<f64>,
    #[command(flatten)]
    pub view: ViewFlags,
}

impl RunFlags {
    fn config(&self) -> Result<RunConfig, Error> {
        let mut policy = MatchPolicy::default();
        if let Some(r) = self.max_retries {
            policy.max_retries = r;
        }
        if let Some(t) = self.similarity_threshold {
            policy.name_similarity_threshold = t;
        }
        policy.validate().map_err(|m| Error::new("cli.invalid_flag", m))?;
        Ok(RunConfig {
            policy,
            serialization: self.view.config(),
            ..RunConfig::default()
        })
    }
}

pub fn version_text() -> String {
    let schemas: Vec<String> = SCHEMAS.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("goi {} (schemas: {})\n", env!("CARGO_PKG_VERSION"), schemas.join(", "))
}

/// Runs one invocation. Output files are written before any failure that
/// concerns their content is returned.
pub fn run(cli: Cli) -> Result<(), Error> {
    if cli.version {
        return write_output("-".as_ref(), version_text().as_bytes());
    }
    let Some(command) = cli.command else {
        return Err(Error::new("cli.usage", "no subcommand given; see --help"));
    };
    match command {
        Command::Rip { app, config, out } => {
            let spec = formats::load_app(&app)?;
            let cfg = match config {
                Some(p) => formats::load_rip_config(&p)?,
                None => RipperConfig::default(),
            };
            let doc = pipeline::rip_app(spec, &cfg)?;
            for w in &doc.warnings {
                eprintln!("{}", json!({ "warning": w }));
            }
            write_output(&out, json_text(&document("graph", &doc)?).as_bytes())
        }
        Command::Compile { input, out, threshold } => {
            let graph = formats::load_graph(&input)?;
            let doc = pipeline::compile_graph(&graph.graph, threshold)?;
            write_output(&out, json_text(&document("forest", &doc)?).as_bytes())
        }
        Command::Serialize {
            forest,
            core,
            expand,
            out,
            view,
        } => {
            let doc = formats::load_forest(&forest)?;
            let v = match (core, expand) {
                (_, Some(ids)) => View::Expand(ids),
                (true, None) => View::Core,
                (false, None) => View::Full,
            };
            let text = pipeline::render(&doc, &v, &view.config())?;
            write_output(&out, text.as_bytes())
        }
        Command::Exec {
            forest,
            app,
            script,
            report,
            run,
        } => {
            let doc = formats::load_forest(&forest)?;
            let spec = formats::load_app(&app)?;
            let turns = formats::load_script(&script)?;
            let (r, _) = pipeline::exec(&doc, spec, &turns, &run.config()?)?;
            write_output(&report, json_text(&document("exec_report", &r)?).as_bytes())?;
            if !r.script.metrics.success {
                let failed = r.script.turns.iter().find(|t| !t.succeeded).map_or(0, |t| t.turn);
                return Err(Error::new(
                    "script.turn_failed",
                    format!("turn {failed} failed; see {}", report.display()),
                ));
            }
            Ok(())
        }
        Command::Replay {
            forest,
            app,
            script,
            assertions,
            metrics,
            run,
        } => {
            let doc = formats::load_forest(&forest)?;
            let spec = formats::load_app(&app)?;
            let turns = formats::load_script(&script)?;
            let checks = formats::load_assertions(&assertions)?;
            let m = pipeline::replay(&doc, spec, &turns, &checks, &run.config()?)?;
            write_output(&metrics, json_text(&document("metrics", &m)?).as_bytes())?;
            if !m.script_success {
                return Err(Error::new(
                    "script.turn_failed",
                    format!("script stopped after turn {}", m.turns.saturating_sub(1)),
                ));
            }
            if !m.success {
                let n = m.assertions.results.len() - m.assertions.count(goi_core::sim::Verdict::Pass);
                return Err(Error::new(
                    "sim.assertion_failed",
                    format!("{n} assertion(s) did not pass"),
                ));
            }
            Ok(())
        }
        Command::Verify { forest, json } => {
            let doc = formats::load_forest(&forest)?;
            let report = pipeline::verify(&doc);
            let text = if json {
                json_text(&document("verification", &report)?)
            } else {
                report.to_string()
            };
            write_output("-".as_ref(), text.as_bytes())?;
            if !report.is_ok() {
                return Err(Error::new(
                    "compile.bijection_broken",
                    "forest access specs do not match graph paths",
                ));
            }
            Ok(())
        }
    }
}
