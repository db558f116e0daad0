//! File emission: CSV tables, JSON documents and plot scripts.
//!
//! Floats are written with 17 significant digits (`{:.16e}`), which
//! round-trips every `f64` exactly and keeps the bytes independent of the
//! platform's shortest-representation algorithm.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// `<prefix><suffix>`, creating the parent directory if needed.
pub fn path_for(prefix: &str, suffix: &str) -> Result<PathBuf> {
    let path = PathBuf::from(format!("{prefix}{suffix}"));
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(path)
}

pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Csv { text: header.join(",") + "\n" }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, &self.text).with_context(|| format!("writing {}", path.display()))
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn file_name(path: &Path) -> String {
    path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}

fn script(csv: &Path, body: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "#!/usr/bin/env python3");
    let _ = writeln!(s, "\"\"\"Generated by kharper; reads {} from this directory.\"\"\"", file_name(csv));
    let _ = writeln!(s, "import os");
    let _ = writeln!(s, "import numpy as np");
    let _ = writeln!(s, "import matplotlib.pyplot as plt");
    let _ = writeln!(s);
    let _ = writeln!(s, "HERE = os.path.dirname(os.path.abspath(__file__))");
    let _ = writeln!(
        s,
        "data = np.genfromtxt(os.path.join(HERE, {:?}), delimiter=\",\", names=True)",
        file_name(csv)
    );
    s.push_str(body);
    s
}

pub fn butterfly_script(csv: &Path, png: &Path, title: &str) -> String {
    script(
        csv,
        &format!(
            "fig, ax = plt.subplots(figsize=(7, 6))
ax.scatter(data[\"hbar\"], data[\"quasienergy\"], s=0.2, c=\"k\", linewidths=0)
ax.set_xlabel(r\"$\\tilde\\hbar$\")
ax.set_ylabel(r\"quasi-energy $\\epsilon$\")
ax.set_ylim(-np.pi, np.pi)
ax.set_title({title:?})
fig.tight_layout()
fig.savefig(os.path.join(HERE, {:?}), dpi=200)
",
            file_name(png)
        ),
    )
}

pub fn diffusion_script(csv: &Path, png: &Path, title: &str) -> String {
    script(
        csv,
        &format!(
            "fig, ax = plt.subplots(figsize=(6, 4.5))
mask = data[\"variance\"] > 0
ax.loglog(data[\"step\"][mask], data[\"variance\"][mask], \"k-\", lw=1)
ax.set_xlabel(\"kicks\")
ax.set_ylabel(r\"$\\sigma^2$\")
ax.set_title({title:?})
fig.tight_layout()
fig.savefig(os.path.join(HERE, {:?}), dpi=200)
",
            file_name(png)
        ),
    )
}

pub fn orbits_script(csv: &Path, png: &Path, title: &str) -> String {
    script(
        csv,
        &format!(
            "fig, ax = plt.subplots(figsize=(6, 6))
ax.scatter(data[\"q\"], data[\"p\"], s=0.3, c=data[\"orbit\"], cmap=\"viridis\", linewidths=0)
ax.set_xlim(0, 2 * np.pi)
ax.set_xlabel(\"q\")
ax.set_ylabel(\"p\")
ax.set_title({title:?})
fig.tight_layout()
fig.savefig(os.path.join(HERE, {:?}), dpi=200)
",
            file_name(png)
        ),
    )
}

pub fn boxcount_script(csv: &Path, png: &Path, title: &str) -> String {
    script(
        csv,
        &format!(
            "fig, ax = plt.subplots(figsize=(5, 4))
ax.loglog(data[\"boxes\"], data[\"occupied\"], \"ko\")
fit = data[\"fitted\"] > 0
ax.loglog(data[\"boxes\"][fit], data[\"occupied\"][fit], \"r-\")
ax.set_xlabel(\"boxes\")
ax.set_ylabel(\"occupied boxes\")
ax.set_title({title:?})
fig.tight_layout()
fig.savefig(os.path.join(HERE, {:?}), dpi=200)
",
            file_name(png)
        ),
    )
}
