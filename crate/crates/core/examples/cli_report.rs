//! Drive the command-line front end in-process and print its JSON report.
//!
//! ```bash
//! cargo run --example cli_report
//! ```

use rrqc::cli::{execute, Cli};
use clap::Parser;

fn main() {
    let cli = Cli::parse_from(["rrqc", "--seed", "3", "protocol", "--variant", "switch", "--n", "2", "--x", "1", "--message", "HAAR(2)"]);
    match execute(&cli) {
        Ok(outcome) => println!("{}", serde_json::to_string_pretty(&outcome.json).unwrap()),
        Err(f) => eprintln!("exit {}: {}", f.code, f.message),
    }
}
