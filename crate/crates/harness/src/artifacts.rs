//! On-disk learn outputs: `data.txt`, `hypothesis.txt`, `aux.bin`,
//! `tickets/<i>.bin` and `manifest.json` with the exact bit lengths.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use tilu_core::scheme::{build_scheme, Deletion, Outcome, UnlearnRequest};
use tilu_core::{BitString, Dataset, Error};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub scheme: String,
    pub class: String,
    pub n: usize,
    pub outcome: String,
    pub aux_bits: usize,
    pub ticket_bits: Vec<usize>,
    pub consumed: bool,
    pub deleted: Option<Vec<usize>>,
    pub unlearned: Option<String>,
}

fn ticket_path(dir: &Path, i: usize) -> PathBuf {
    dir.join("tickets").join(format!("{i}.bin"))
}

fn read_bits(path: &Path, len: usize) -> Result<BitString> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(BitString::from_bytes(bytes, len)?)
}

fn save_manifest(dir: &Path, m: &Manifest) -> Result<()> {
    fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(m)? + "\n")?;
    Ok(())
}

pub fn load_manifest(dir: &Path) -> Result<Manifest> {
    let path = dir.join("manifest.json");
    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    Ok(serde_json::from_str(&text)?)
}

pub fn learn_to_dir(scheme: &str, data: &Dataset, dir: &Path) -> Result<Manifest> {
    let out = build_scheme(scheme, &data.class)?.learn(data)?;
    fs::create_dir_all(dir.join("tickets"))?;
    fs::write(dir.join("data.txt"), data.to_string())?;
    fs::write(dir.join("hypothesis.txt"), format!("{}\n", out.outcome))?;
    fs::write(dir.join("aux.bin"), out.aux.as_bytes())?;
    for (i, t) in out.tickets.iter().enumerate() {
        fs::write(ticket_path(dir, i), t.as_bytes())?;
    }
    let m = Manifest {
        scheme: scheme.into(),
        class: data.class.header(),
        n: data.len(),
        outcome: out.outcome.to_string(),
        aux_bits: out.aux_bits(),
        ticket_bits: out.tickets.iter().map(BitString::len).collect(),
        consumed: false,
        deleted: None,
        unlearned: None,
    };
    save_manifest(dir, &m)?;
    Ok(m)
}

/// Runs the single permitted unlearn of a learn directory and records it.
pub fn unlearn_from_dir(dir: &Path, indices: &[usize]) -> Result<Outcome> {
    let mut m = load_manifest(dir)?;
    if m.consumed {
        return Err(Error::AlreadyUnlearned.into());
    }
    let text = fs::read_to_string(dir.join("data.txt")).context("reading data.txt")?;
    let data: Dataset = text.parse()?;
    if data.len() != m.n || data.class.header() != m.class {
        bail!("data.txt does not match the manifest");
    }
    let mut items = Vec::with_capacity(indices.len());
    for &i in indices {
        if i >= m.n {
            bail!("index {i} out of range for {} items", m.n);
        }
        items.push(Deletion {
            index: i,
            example: data.items[i].clone(),
            ticket: read_bits(&ticket_path(dir, i), m.ticket_bits[i])?,
        });
    }
    let aux = read_bits(&dir.join("aux.bin"), m.aux_bits)?;
    let outcome = build_scheme(&m.scheme, &data.class)?.unlearn(&UnlearnRequest { items }, Some(&aux))?;
    fs::write(dir.join("unlearned.txt"), format!("{outcome}\n"))?;
    m.consumed = true;
    m.deleted = Some(indices.to_vec());
    m.unlearned = Some(outcome.to_string());
    save_manifest(dir, &m)?;
    Ok(outcome)
}
