//! Run configuration: one JSON file plus command line overrides.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};
use techspace::corpus::{ColumnSchema, FieldConcordance, KeywordSet, WindowSpec};
use techspace::matrix::Counting;
use techspace::metrics::{Categories, CategoryPairs};
use techspace::space::GraphFormat;

use crate::analysis::GLOBAL_WINDOW;
use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub inputs: Vec<PathBuf>,
    /// Keyword file; the shipped list when absent.
    pub keywords: Option<PathBuf>,
    pub concordance: Option<PathBuf>,
    pub categories: Option<PathBuf>,
    pub windows: WindowSpec,
    pub counting: Counting,
    pub morc_steps: usize,
    pub mort_steps: usize,
    /// Extra edges kept on top of the spanning forest.
    pub backbone_k: usize,
    pub threshold: f64,
    pub countries: Vec<String>,
    pub category_pairs: CategoryPairs,
    pub positive_pairs_only: bool,
    pub formats: Vec<String>,
    pub out: PathBuf,
    pub columns: ColumnSchema,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            inputs: vec![],
            keywords: None,
            concordance: None,
            categories: None,
            windows: WindowSpec::default(),
            counting: Counting::Whole,
            morc_steps: 1,
            mort_steps: 2,
            backbone_k: 70,
            threshold: 1.0,
            countries: ["CN", "JP", "KR", "US"].map(String::from).to_vec(),
            category_pairs: CategoryPairs::Within,
            positive_pairs_only: false,
            formats: ["graphml", "json", "dot"].map(String::from).to_vec(),
            out: PathBuf::from("out"),
            columns: ColumnSchema::default(),
        }
    }
}

/// Flags shared by every subcommand. Each one overrides the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// JSON run configuration
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Input corpus file (repeatable)
    #[arg(long = "input", global = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, global = true)]
    pub keywords: Option<PathBuf>,
    #[arg(long, global = true)]
    pub concordance: Option<PathBuf>,
    #[arg(long, global = true)]
    pub categories: Option<PathBuf>,
    /// Windows as LABEL:START-END, comma separated
    #[arg(long, global = true)]
    pub windows: Option<String>,
    /// whole or fractional
    #[arg(long, global = true)]
    pub counting: Option<String>,
    #[arg(long, global = true)]
    pub morc_steps: Option<usize>,
    #[arg(long, global = true)]
    pub mort_steps: Option<usize>,
    #[arg(long, global = true)]
    pub backbone_k: Option<usize>,
    /// RCA specialisation threshold
    #[arg(long, global = true)]
    pub threshold: Option<f64>,
    /// Country codes for per-country scopes, comma separated
    #[arg(long, global = true)]
    pub countries: Option<String>,
    /// within or incident
    #[arg(long, global = true)]
    pub category_pairs: Option<String>,
    /// Average overall relatedness over co-occurring pairs only
    #[arg(long, global = true)]
    pub positive_pairs_only: bool,
    /// Graph formats, comma separated (graphml, dot, json)
    #[arg(long, global = true)]
    pub formats: Option<String>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

fn split_list(s: &str) -> Vec<String> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(String::from)
        .collect()
}

impl RunConfig {
    /// Reads a config file. Relative paths inside it resolve against the
    /// file's directory.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut cfg: RunConfig =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        cfg.inputs.iter_mut().for_each(rebase);
        for p in [&mut cfg.keywords, &mut cfg.concordance, &mut cfg.categories]
            .into_iter()
            .flatten()
        {
            rebase(p);
        }
        rebase(&mut cfg.out);
        Ok(cfg)
    }

    /// Builds the effective configuration; flags win over the file.
    pub fn resolve(flags: &Overrides) -> Result<Self> {
        let mut cfg = match &flags.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        if !flags.inputs.is_empty() {
            cfg.inputs = flags.inputs.clone();
        }
        if flags.keywords.is_some() {
            cfg.keywords = flags.keywords.clone();
        }
        if flags.concordance.is_some() {
            cfg.concordance = flags.concordance.clone();
        }
        if flags.categories.is_some() {
            cfg.categories = flags.categories.clone();
        }
        if let Some(w) = &flags.windows {
            cfg.windows = WindowSpec::parse(w)?;
        }
        if let Some(c) = &flags.counting {
            cfg.counting = c.parse()?;
        }
        if let Some(n) = flags.morc_steps {
            cfg.morc_steps = n;
        }
        if let Some(n) = flags.mort_steps {
            cfg.mort_steps = n;
        }
        if let Some(k) = flags.backbone_k {
            cfg.backbone_k = k;
        }
        if let Some(t) = flags.threshold {
            cfg.threshold = t;
        }
        if let Some(c) = &flags.countries {
            cfg.countries = split_list(c);
        }
        if let Some(p) = &flags.category_pairs {
            cfg.category_pairs = match p.as_str() {
                "within" => CategoryPairs::Within,
                "incident" => CategoryPairs::Incident,
                other => return Err(CliError::Config(format!("unknown category pairing {other:?}"))),
            };
        }
        if flags.positive_pairs_only {
            cfg.positive_pairs_only = true;
        }
        if let Some(f) = &flags.formats {
            cfg.formats = split_list(f);
        }
        if let Some(o) = &flags.out {
            cfg.out = o.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&mut self) -> Result<()> {
        if self.inputs.is_empty() {
            return Err(CliError::Config("no input files given".into()));
        }
        let files = self
            .inputs
            .iter()
            .chain(&self.keywords)
            .chain(&self.concordance)
            .chain(&self.categories);
        for p in files {
            if !p.is_file() {
                return Err(CliError::Config(format!("{}: no such file", p.display())));
            }
        }
        if let Some(w) = self.windows.windows().iter().find(|w| w.label == GLOBAL_WINDOW) {
            return Err(CliError::Config(format!("window label {:?} is reserved", w.label)));
        }
        for c in &mut self.countries {
            if c.len() != 2 || !c.bytes().all(|b| b.is_ascii_alphabetic()) {
                return Err(CliError::Config(format!("{c:?} is not an ISO alpha-2 country code")));
            }
            c.make_ascii_uppercase();
        }
        self.countries.sort();
        self.countries.dedup();
        if !(self.threshold > 0.0 && self.threshold.is_finite()) {
            return Err(CliError::Config("threshold must be positive".into()));
        }
        self.graph_formats()?;
        Ok(())
    }

    pub fn graph_formats(&self) -> Result<Vec<GraphFormat>> {
        let mut v = self
            .formats
            .iter()
            .map(|f| f.parse::<GraphFormat>())
            .collect::<Result<Vec<_>, _>>()?;
        v.dedup();
        Ok(v)
    }
}

/// Rule, concordance and category tables for a run.
#[derive(Debug, Clone)]
pub struct Resources {
    pub keywords: KeywordSet,
    pub concordance: FieldConcordance,
    pub categories: Categories,
}

impl Resources {
    pub fn load(cfg: &RunConfig) -> Result<Self> {
        Ok(Resources {
            keywords: match &cfg.keywords {
                Some(p) => KeywordSet::load(p)?,
                None => KeywordSet::default(),
            },
            concordance: match &cfg.concordance {
                Some(p) => FieldConcordance::load(p)?,
                None => FieldConcordance::default(),
            },
            categories: match &cfg.categories {
                Some(p) => Categories::load(p)?,
                None => Categories::default(),
            },
        })
    }
}
