use std::process::ExitCode;

use clap::Parser;
use yeecache_bench::table::{predictions_markdown, write_text};
use yeecache_bench::{emit_tables, energy_report, predict, run_bench, to_markdown, verify_equivalence, BenchConfig, Mode};

fn main() -> ExitCode {
    let cfg = BenchConfig::parse().resolved();
    match run(&cfg) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("fdtd-bench: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cfg: &BenchConfig) -> yeecache_bench::Result<bool> {
    match cfg.mode {
        Mode::Measure => {
            let records = run_bench(cfg)?;
            print!("{}", to_markdown(&records));
            if let Some(out) = &cfg.out {
                let md = emit_tables(&records, out)?;
                eprintln!("wrote {} and {}", out.display(), md.display());
            }
            Ok(true)
        }
        Mode::Verify => {
            let report = verify_equivalence(cfg)?;
            let text = report.to_string();
            print!("{text}");
            if let Some(out) = &cfg.out {
                write_text(out, &text)?;
            }
            Ok(report.pass())
        }
        Mode::Predict => {
            let text = predictions_markdown(&predict(cfg)?);
            print!("{text}");
            if let Some(out) = &cfg.out {
                write_text(out, &text)?;
            }
            Ok(true)
        }
        Mode::Energy => {
            let mut text = String::new();
            for r in energy_report(cfg)? {
                text.push_str(&format!("{r}\n"));
            }
            print!("{text}");
            if let Some(out) = &cfg.out {
                write_text(out, &text)?;
            }
            Ok(true)
        }
    }
}
