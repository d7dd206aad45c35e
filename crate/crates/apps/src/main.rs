use std::fs;
use std::io::Write;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;
use diskspec::config::{Cli, RunConfig};
use diskspec::run::execute;

fn main() -> Result<ExitCode> {
    let cfg = RunConfig::from_cli(Cli::parse())?;
    let out = execute(&cfg)?;

    match &cfg.out {
        Some(path) => {
            fs::write(path, &out.document).with_context(|| format!("writing {}", path.display()))?
        }
        None => std::io::stdout().write_all(out.document.as_bytes())?,
    }
    if let Some(dir) = &cfg.fields {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for f in &out.fields {
            let path = dir.join(format!("{}.csv", f.name));
            fs::write(&path, f.to_csv()).with_context(|| format!("writing {}", path.display()))?;
        }
    }
    eprintln!("{}", out.summary);
    Ok(if out.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}
