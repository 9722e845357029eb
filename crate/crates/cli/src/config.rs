//! Defaults from a TOML key = value file, merged into the argument list
//! before parsing so that explicit flags win.

use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::Command;

fn config_path(argv: &[String]) -> Option<String> {
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

/// The subcommand reached by the non-flag tokens of argv.
fn leaf(root: &Command, argv: &[String]) -> Command {
    let mut cmd = root.clone();
    for tok in argv.iter().skip(1) {
        if tok.starts_with('-') {
            continue;
        }
        match cmd.find_subcommand(tok) {
            Some(sub) => cmd = sub.clone(),
            None => continue,
        }
    }
    cmd
}

fn known_longs(cmd: &Command, out: &mut Vec<String>) {
    out.extend(cmd.get_arguments().filter_map(|a| a.get_long().map(str::to_string)));
    for sub in cmd.get_subcommands() {
        known_longs(sub, out);
    }
}

fn render(value: &toml::Value, key: &str) -> Result<Option<String>> {
    Ok(match value {
        toml::Value::String(s) => Some(s.clone()),
        toml::Value::Integer(i) => Some(i.to_string()),
        toml::Value::Float(f) => Some(f.to_string()),
        toml::Value::Boolean(_) => None,
        toml::Value::Array(items) => Some(
            items
                .iter()
                .map(|v| render(v, key).map(|s| s.unwrap_or_default()))
                .collect::<Result<Vec<_>>>()?
                .join(","),
        ),
        _ => bail!("config key {key}: unsupported value"),
    })
}

/// argv with config defaults appended for every applicable option not
/// already given on the command line.
pub fn merge(root: &Command, argv: Vec<String>) -> Result<Vec<String>> {
    let Some(path) = config_path(&argv) else { return Ok(argv) };
    let text = std::fs::read_to_string(Path::new(&path)).with_context(|| format!("cannot read config {path}"))?;
    let table: toml::Table = text.parse().with_context(|| format!("config {path} is not key = value TOML"))?;
    let cmd = leaf(root, &argv);
    let mut known = Vec::new();
    known_longs(root, &mut known);
    let mut out = argv.clone();
    for (key, value) in &table {
        let long = key.replace('_', "-");
        if !known.contains(&long) {
            bail!("config {path}: unknown key {key}");
        }
        let Some(arg) = cmd.get_arguments().find(|a| a.get_long() == Some(long.as_str())) else { continue };
        let flag = format!("--{long}");
        if argv.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}="))) {
            continue;
        }
        let takes_value = arg.get_num_args().is_none_or(|n| n.takes_values());
        match (render(value, key)?, takes_value) {
            (Some(v), true) => out.push(format!("{flag}={v}")),
            (None, false) => {
                if value.as_bool() == Some(true) {
                    out.push(flag);
                }
            }
            _ => bail!("config {path}: key {key} has the wrong type"),
        }
    }
    Ok(out)
}
