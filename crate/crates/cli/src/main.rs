use clap::Parser;
use ecs_cli::{execute, Cli};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help / --version
            let _ = e.print();
            return;
        }
        Err(e) => {
            let first = e.to_string().lines().next().unwrap_or("").trim_start_matches("error: ").to_string();
            eprintln!("error: kind=usage_error msg={first}");
            std::process::exit(2);
        }
    };
    if let Err(e) = execute(&cli) {
        eprintln!("{}", e.line());
        std::process::exit(1);
    }
}
