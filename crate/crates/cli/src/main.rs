mod args;
mod config;
mod data;
mod error;
mod model_cmds;
mod preprocess;
mod search_cmds;

use clap::parser::ValueSource;
use clap::{ArgMatches, CommandFactory, FromArgMatches};

use crate::args::{Cli, Command, GlobalArgs};
use crate::error::{CliError, Result};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("OCC_LOG", "warn"))
        .format_timestamp(None)
        .init();
    let cmd = Cli::command();
    let matches = cmd.clone().get_matches();
    let code = match run(&cmd, &matches) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}

fn on_command_line(matches: &[&ArgMatches], id: &str) -> bool {
    matches.iter().any(|m| {
        m.try_get_raw(id).ok().flatten().is_some()
            && m.value_source(id) == Some(ValueSource::CommandLine)
    })
}

fn run(cmd: &clap::Command, matches: &ArgMatches) -> Result<()> {
    let cli = Cli::from_arg_matches(matches).map_err(|e| CliError::Validation(e.to_string()))?;
    let config = match &cli.global.config {
        Some(p) => Some(config::load(p)?),
        None => None,
    };
    let (name, sub) = matches.subcommand().expect("a subcommand is required");
    let given = |id: &str| on_command_line(&[matches, sub], id);

    let mut global: GlobalArgs = config::merge(
        &cli.global,
        &given,
        Some(&config::globals(config.as_ref())),
        &config::global_keys(),
        "top level",
    )?;
    global.config = cli.global.config.clone();
    if let Some(jobs) = global.jobs {
        if jobs == 0 {
            return Err(CliError::Validation("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Validation(format!("cannot size the thread pool: {e}")))?;
    }
    log::info!("seed {}", global.seed);

    let keys = config::command_keys(cmd.find_subcommand(name).expect("known subcommand"));
    let section = config::section(config.as_ref(), name)?;
    match &cli.command {
        Command::Preprocess(a) => {
            let a = config::merge(a, &given, section, &keys, name)?;
            let pipeline = preprocess::pipeline_config(config.as_ref())?;
            preprocess::cmd_preprocess(&global, &a, &pipeline)
        }
        Command::Train(a) => {
            model_cmds::cmd_train(&global, &config::merge(a, &given, section, &keys, name)?)
        }
        Command::Predict(a) => {
            model_cmds::cmd_predict(&global, &config::merge(a, &given, section, &keys, name)?)
        }
        Command::Eval(a) => {
            model_cmds::cmd_eval(&global, &config::merge(a, &given, section, &keys, name)?)
        }
        Command::Gridsearch(a) => {
            search_cmds::cmd_gridsearch(&global, &config::merge(a, &given, section, &keys, name)?)
        }
        Command::Benchmark(a) => {
            search_cmds::cmd_benchmark(&global, &config::merge(a, &given, section, &keys, name)?)
        }
    }
}
