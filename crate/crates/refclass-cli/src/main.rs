use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use refclass::kb::ValidateOptions;
use refclass::{
    parse_kb_with, parse_sentence, prob, ClassTerm, Diagnostic, KnowledgeBase, QueryConfig,
    SubsetClosure,
};

#[derive(Parser)]
#[command(name = "refclass", version, about = "Evidential probability over interval-valued frequency knowledge")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TraceFormat {
    Human,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the probability interval for a sentence
    Query {
        /// Knowledge base file
        file: PathBuf,
        /// A sentence name or a literal such as "(member m V)"
        sentence: String,
        /// Print the evaluation trace before the result
        #[arg(long, value_enum)]
        trace: Option<TraceFormat>,
        /// Reject subset assertions and foreign intersection statistics
        #[arg(long)]
        minimal: bool,
        /// Disable derived combination-class candidates
        #[arg(long)]
        no_constructions: bool,
        /// Derive statistics for intersection classes that lack them
        #[arg(long)]
        bounds: bool,
        /// Partition size limit for combination classes (above 2 only
        /// honored for subjects with at most 8 membership names)
        #[arg(long, default_value_t = 2, value_name = "N")]
        max_bracket_blocks: usize,
    },
    /// Parse and validate a knowledge base
    Check {
        /// Knowledge base file
        file: PathBuf,
        /// Reject subset assertions and foreign intersection statistics
        #[arg(long)]
        minimal: bool,
    },
    /// List every class an individual is known to belong to
    Classes {
        /// Knowledge base file
        file: PathBuf,
        /// Individual name
        individual: String,
        /// Reject subset assertions and foreign intersection statistics
        #[arg(long)]
        minimal: bool,
    },
}

fn report(file: &Path, diagnostics: &[Diagnostic]) {
    for d in diagnostics {
        eprintln!("{}:{}:{}: error: {}", file.display(), d.span.line, d.span.col, d.message);
    }
}

fn load(file: &Path, minimal: bool) -> Result<KnowledgeBase, ExitCode> {
    let text = fs::read_to_string(file).map_err(|e| {
        eprintln!("{}: error: {e}", file.display());
        ExitCode::from(1)
    })?;
    parse_kb_with(&text, ValidateOptions { minimal }).map_err(|diagnostics| {
        report(file, &diagnostics);
        ExitCode::from(1)
    })
}

fn run_query(
    file: &Path,
    sentence: &str,
    trace: Option<TraceFormat>,
    minimal: bool,
    config: &QueryConfig,
) -> ExitCode {
    let kb = match load(file, minimal) {
        Ok(kb) => kb,
        Err(code) => return code,
    };
    let sentence = match parse_sentence(sentence) {
        Ok(s) => s,
        Err(d) => {
            eprintln!("error: {}", d.message);
            return ExitCode::from(2);
        }
    };
    match prob(&kb, &sentence, config) {
        Ok((interval, record)) => {
            match trace {
                Some(TraceFormat::Human) => print!("{}", record.to_human()),
                Some(TraceFormat::Json) => println!("{}", record.to_json()),
                None => {}
            }
            println!("Prob = {interval}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run_check(file: &Path, minimal: bool) -> ExitCode {
    match load(file, minimal) {
        Ok(kb) => {
            println!(
                "ok: {} classes, {} individuals, {} statistics",
                kb.classes().len(),
                kb.individuals().len(),
                kb.stats().count()
            );
            ExitCode::SUCCESS
        }
        Err(code) => code,
    }
}

fn run_classes(file: &Path, individual: &str, minimal: bool) -> ExitCode {
    let kb = match load(file, minimal) {
        Ok(kb) => kb,
        Err(code) => return code,
    };
    let closure = SubsetClosure::build(&kb);
    let classes = match closure.classes_of(&kb, individual, 12) {
        Ok(classes) => classes,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    for (class, origin) in classes {
        println!("{class}  ({})", origin.label());
        for target in kb.classes() {
            let target = ClassTerm::prim(target);
            if let Some(interval) = kb.stat(&class, &target) {
                println!("  stat {class} {target} = {interval}");
            }
        }
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Query {
            file,
            sentence,
            trace,
            minimal,
            no_constructions,
            bounds,
            max_bracket_blocks,
        } => {
            let config = QueryConfig {
                constructions: !no_constructions,
                products: !no_constructions,
                bounds,
                max_bracket_blocks,
                ..QueryConfig::default()
            };
            run_query(&file, &sentence, trace, minimal, &config)
        }
        Command::Check { file, minimal } => run_check(&file, minimal),
        Command::Classes { file, individual, minimal } => {
            run_classes(&file, &individual, minimal)
        }
    }
}
