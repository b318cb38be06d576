mod args;
mod commands;
mod output;
mod verify;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command, Format};
use commands::{cmd_bound, cmd_oracle, cmd_p0, cmd_sweep, CliError, CliResult, SWEEP_HEADER};
use output::{csv_table, emit, json_to_csv, to_json};

fn render(cli: &Cli) -> CliResult<String> {
    match &cli.command {
        Command::P0 { target } => {
            let out = cmd_p0(*target)?;
            Ok(match cli.format.unwrap_or(Format::Json) {
                Format::Json => to_json(&out),
                Format::Csv => json_to_csv(&serde_json::to_value(&out).expect("serializable")),
            })
        }
        Command::Bound(args) => {
            let out = cmd_bound(args)?.to_value();
            Ok(match cli.format.unwrap_or(Format::Json) {
                Format::Json => to_json(&out),
                Format::Csv => json_to_csv(&out),
            })
        }
        Command::Sweep(args) => {
            let out = cmd_sweep(args)?;
            let rows: Vec<Vec<String>> = out.rows.iter().map(|r| r.cells()).collect();
            Ok(match cli.format.unwrap_or(Format::Csv) {
                Format::Csv => csv_table(&out.metadata, &SWEEP_HEADER, &rows),
                Format::Json => {
                    let objects: Vec<serde_json::Value> = rows
                        .iter()
                        .map(|r| serde_json::Value::Object(SWEEP_HEADER.iter().map(|h| h.to_string()).zip(r.iter().map(|c| cell_json(c))).collect()))
                        .collect();
                    let meta: serde_json::Map<String, serde_json::Value> =
                        out.metadata.iter().map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone()))).collect();
                    to_json(&serde_json::json!({"metadata": meta, "rows": objects}))
                }
            })
        }
        Command::Verify(args) => {
            let checks = verify::run(args.suite, args.samples, cli.seed)?;
            let failed = checks.iter().filter(|c| !c.passed).count();
            let text = match cli.format {
                Some(Format::Json) => to_json(&checks),
                _ => {
                    let mut s: String = checks.iter().map(|c| c.line() + "\n").collect();
                    s.push_str(&format!("{} checks, {} failed\n", checks.len(), failed));
                    s
                }
            };
            if failed > 0 {
                emit(&text, cli.output.as_deref())?;
                return Err(CliError::Verification(format!("{failed} of {} checks failed", checks.len())));
            }
            Ok(text)
        }
        Command::Oracle(args) => {
            let out = cmd_oracle(args, cli.seed)?;
            match cli.format.unwrap_or(Format::Csv) {
                Format::Csv => {
                    let meta: Vec<(&str, String)> = out.metadata.iter().map(|(k, v)| (k.as_str(), v.clone())).collect();
                    let mut buf = Vec::new();
                    out.profile.write_csv(&mut buf, &meta)?;
                    Ok(String::from_utf8(buf).expect("CSV is UTF-8"))
                }
                Format::Json => {
                    let meta: serde_json::Map<String, serde_json::Value> =
                        out.metadata.iter().map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone()))).collect();
                    Ok(to_json(&serde_json::json!({"metadata": meta, "profile": out.profile})))
                }
            }
        }
    }
}

fn cell_json(c: &str) -> serde_json::Value {
    if c.is_empty() {
        return serde_json::Value::Null;
    }
    if let Ok(i) = c.parse::<u64>() {
        return i.into();
    }
    match c.parse::<f64>() {
        Ok(x) => x.into(),
        Err(_) => c.into(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match render(&cli).and_then(|text| emit(&text, cli.output.as_deref()).map_err(CliError::from)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("radmax: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
