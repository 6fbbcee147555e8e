use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use chimera_core::gadget::VertexGadget;
use chimera_core::instance::{parse_instance, EmbedBudget, RepresentationJson};
use chimera_core::oracle::SearchBudget;
use chimera_core::pipeline::{build_from_representation, embed, Built};
use chimera_core::{InstanceGraph, TentaclePatterns};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub const SCHEMA_VERSION: u32 = 1;
pub const FIXTURE_DIR_ENV: &str = "CHIMERA_FIXTURE_DIR";

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Budgets {
    pub embed_node_limit: u64,
    pub embed_seconds: u64,
    pub search_node_limit: u64,
    pub search_seconds: u64,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets { embed_node_limit: 2_000_000, embed_seconds: 30, search_node_limit: 50_000_000, search_seconds: 60 }
    }
}

impl Budgets {
    pub fn embed(&self) -> EmbedBudget {
        EmbedBudget {
            node_limit: self.embed_node_limit,
            time_limit: Duration::from_secs(self.embed_seconds),
            ..EmbedBudget::default()
        }
    }

    pub fn search(&self) -> SearchBudget {
        SearchBudget::new(self.search_node_limit, Duration::from_secs(self.search_seconds))
    }
}

/// Pipeline inputs. Relative paths resolve against the manifest's directory.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Manifest {
    pub instance: PathBuf,
    #[serde(default)]
    pub representation: Option<PathBuf>,
    #[serde(default)]
    pub gadget: Option<PathBuf>,
    #[serde(default)]
    pub patterns: Option<PathBuf>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub pegasus: bool,
    #[serde(default)]
    pub side_bound: Option<usize>,
    #[serde(default = "default_depth")]
    pub depth: usize,
    #[serde(default)]
    pub budgets: Budgets,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_depth() -> usize {
    4
}

pub struct Fixtures {
    pub gadget: VertexGadget,
    pub patterns: TentaclePatterns,
}

impl Fixtures {
    pub fn hashes(&self) -> Value {
        json!({"gadget": self.gadget.sha256(), "patterns": self.patterns.sha256()})
    }
}

pub fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn load_instance(path: &Path) -> Result<InstanceGraph> {
    parse_instance(&read(path)?).with_context(|| format!("instance {}", path.display()))
}

/// Explicit path first, then the fixture directory from the environment,
/// then the fixtures compiled into the binary.
fn fixture_text(explicit: Option<&Path>, file: &str) -> Result<Option<String>> {
    if let Some(p) = explicit {
        return Ok(Some(read(p)?));
    }
    if let Some(dir) = std::env::var_os(FIXTURE_DIR_ENV) {
        return Ok(Some(read(&PathBuf::from(dir).join(file))?));
    }
    Ok(None)
}

pub fn load_fixtures(gadget: Option<&Path>, patterns: Option<&Path>) -> Result<Fixtures> {
    let gadget = match fixture_text(gadget, "gadget.json").context("stage fixtures")? {
        Some(s) => VertexGadget::from_json(&s)?,
        None => VertexGadget::shipped(),
    };
    gadget.verify_witnesses().context("stage fixtures: gadget")?;
    let patterns = match fixture_text(patterns, "patterns.json").context("stage fixtures")? {
        Some(s) => TentaclePatterns::from_json(&s)?,
        None => TentaclePatterns::shipped(),
    };
    Ok(Fixtures { gadget, patterns })
}

pub struct Loaded {
    pub manifest: Manifest,
    pub instance: InstanceGraph,
    pub fixtures: Fixtures,
}

impl Loaded {
    pub fn open(path: &Path) -> Result<Self> {
        let mut manifest: Manifest =
            serde_json::from_str(&read(path)?).with_context(|| format!("manifest {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        resolve(&mut manifest.instance);
        resolve(&mut manifest.output_dir);
        for p in [&mut manifest.representation, &mut manifest.gadget, &mut manifest.patterns].into_iter().flatten() {
            resolve(p);
        }
        chimera_core::compose::require_depth(manifest.depth)?;
        let instance = load_instance(&manifest.instance).context("stage instance")?;
        let fixtures = load_fixtures(manifest.gadget.as_deref(), manifest.patterns.as_deref())?;
        Ok(Loaded { manifest, instance, fixtures })
    }

    pub fn build(&self) -> Result<Built> {
        let r = match &self.manifest.representation {
            Some(p) => {
                let j: RepresentationJson = serde_json::from_str(&read(p)?).context("stage representation")?;
                j.to_representation(&self.instance)?
            }
            None => embed(&self.instance, self.manifest.side_bound, self.manifest.budgets.embed(), self.manifest.seed)
                .context("stage embed")?
                .normalized(),
        };
        build_from_representation(&self.instance, r, &self.fixtures.gadget, &self.fixtures.patterns)
            .context("stage build")
    }

    pub fn header(&self, kind: &str) -> Value {
        header(kind, self.manifest.seed, &self.fixtures)
    }
}

pub fn header(kind: &str, seed: u64, fixtures: &Fixtures) -> Value {
    json!({"schemaVersion": SCHEMA_VERSION, "kind": kind, "seed": seed, "fixtures": fixtures.hashes()})
}

/// Rejects an artifact produced with a different schema or fixture set.
pub fn check_header(artifact: &Value, fixtures: &Fixtures) -> Result<()> {
    if artifact["schemaVersion"] != json!(SCHEMA_VERSION) {
        bail!(crate::Refused(format!("schema version {} is not {SCHEMA_VERSION}", artifact["schemaVersion"])));
    }
    if artifact["fixtures"] != fixtures.hashes() {
        bail!(crate::Refused("artifact was produced with different gadget or pattern fixtures".into()));
    }
    Ok(())
}

pub fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    write_text(path, &s)
}

pub fn write_text(path: &Path, s: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, s).with_context(|| format!("writing {}", path.display()))
}
