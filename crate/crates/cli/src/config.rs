//! Config-file loading and merging. A config file is TOML with optional
//! top-level `seed`, `jobs` and `out_dir`, one table per subcommand, and the
//! image-pipeline tables used by `preprocess`.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{CliError, Result};

const GLOBAL_KEYS: [&str; 3] = ["seed", "jobs", "out_dir"];
const COMMANDS: [&str; 6] = [
    "preprocess",
    "train",
    "predict",
    "eval",
    "gridsearch",
    "benchmark",
];
pub const PIPELINE_TABLES: [&str; 7] = [
    "pipeline", "mask", "inpaint", "tv", "ace", "resize", "noise",
];

pub fn load(path: &Path) -> Result<toml::Table> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let table: toml::Table = toml::from_str(&text)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    for key in table.keys() {
        let k = key.as_str();
        if !(GLOBAL_KEYS.contains(&k) || COMMANDS.contains(&k) || PIPELINE_TABLES.contains(&k)) {
            return Err(CliError::Validation(format!(
                "{}: unknown key `{key}`",
                path.display()
            )));
        }
    }
    Ok(table)
}

fn to_table<T: Serialize>(v: &T) -> Result<toml::Table> {
    match toml::Value::try_from(v) {
        Ok(toml::Value::Table(t)) => Ok(t),
        Ok(_) => unreachable!("argument structs serialize to tables"),
        Err(e) => Err(CliError::Validation(format!(
            "cannot represent arguments: {e}"
        ))),
    }
}

/// Fills every argument not given on the command line from `section`.
/// Keys must name an argument of this command.
pub fn merge<T: Serialize + DeserializeOwned>(
    args: &T,
    given: &dyn Fn(&str) -> bool,
    section: Option<&toml::Table>,
    keys: &[String],
    what: &str,
) -> Result<T> {
    let Some(section) = section else {
        return from_table(to_table(args)?, what);
    };
    let mut table = to_table(args)?;
    for (k, v) in section {
        if !keys.iter().any(|x| x == k) {
            return Err(CliError::Validation(format!(
                "config [{what}]: unknown key `{k}`"
            )));
        }
        if !given(k) {
            table.insert(k.clone(), v.clone());
        }
    }
    from_table(table, what)
}

fn from_table<T: DeserializeOwned>(table: toml::Table, what: &str) -> Result<T> {
    toml::Value::Table(table)
        .try_into()
        .map_err(|e| CliError::Validation(format!("config [{what}]: {e}")))
}

/// Argument ids of a subcommand, excluding the global ones.
pub fn command_keys(cmd: &clap::Command) -> Vec<String> {
    cmd.get_arguments()
        .map(|a| a.get_id().as_str().to_string())
        .filter(|id| !GLOBAL_KEYS.contains(&id.as_str()) && id != "config" && id != "help")
        .collect()
}

/// Sub-table `name` of the config, if any.
pub fn section<'a>(config: Option<&'a toml::Table>, name: &str) -> Result<Option<&'a toml::Table>> {
    match config.and_then(|c| c.get(name)) {
        None => Ok(None),
        Some(toml::Value::Table(t)) => Ok(Some(t)),
        Some(_) => Err(CliError::Validation(format!(
            "config: `{name}` must be a table"
        ))),
    }
}

/// The global keys present at the top level of the config.
pub fn globals(config: Option<&toml::Table>) -> toml::Table {
    config
        .map(|c| {
            c.iter()
                .filter(|(k, _)| GLOBAL_KEYS.contains(&k.as_str()))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect()
        })
        .unwrap_or_default()
}

pub fn global_keys() -> Vec<String> {
    GLOBAL_KEYS.iter().map(|k| k.to_string()).collect()
}
