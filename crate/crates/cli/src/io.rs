use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use rrk::hk::{HKEnsemble, HkFile};
use rrk::prob::schema::{parse_ensemble, parse_json, parse_network};
use rrk::prob::{InputEnsemble, NetworkSpec};
use serde_json::Value;

use crate::Input;

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn load_network(input: &Input) -> Result<(NetworkSpec, InputEnsemble)> {
    let (spec, embedded) =
        parse_network(&read(&input.spec)?).with_context(|| format!("in {}", input.spec.display()))?;
    let ens = match &input.ensemble {
        Some(p) => parse_ensemble(&read(p)?).with_context(|| format!("in {}", p.display()))?,
        None => embedded.ok_or_else(|| {
            rrk::Error::Usage(format!("{} has no ensemble; pass --ensemble", input.spec.display()))
        })?,
    };
    Ok((spec, ens))
}

pub fn load_hk(path: &Path) -> Result<HKEnsemble> {
    let file: HkFile = parse_json(&read(path)?).with_context(|| format!("in {}", path.display()))?;
    file.to_ensemble().with_context(|| format!("in {}", path.display()))
}

/// Write through a temporary file in the target directory, then rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating a temporary file in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// JSON result to `out`, or to stdout when no path is given.
pub fn emit(out: Option<&Path>, value: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match out {
        Some(p) => write_atomic(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
