//! Rewrites the replay cassette from the fixture scripts.
//!
//! Usage: `author_cassette [FIXTURES_DIR]`

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use chatfsm_eval::script::{author, CASSETTE_FILE};
use chatfsm_eval::{fixtures_dir, report};

fn main() -> ExitCode {
    let fixtures = std::env::args_os().nth(1).map(PathBuf::from).unwrap_or_else(fixtures_dir);
    let authored = match author(&fixtures) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    let path = fixtures.join(CASSETTE_FILE);
    if let Some(parent) = path.parent() {
        if let Err(e) = fs::create_dir_all(parent) {
            eprintln!("error: {}: {e}", parent.display());
            return ExitCode::FAILURE;
        }
    }
    if let Err(e) = fs::write(&path, authored.render()) {
        eprintln!("error: {}: {e}", path.display());
        return ExitCode::FAILURE;
    }
    println!("wrote {} entries to {}", authored.entries.len(), path.display());
    print!("{}", report(&authored.records).render_text());
    ExitCode::SUCCESS
}
