use std::io::IsTerminal;

use dicenote_cli::{run, CliConfig, EXIT_USER_ERROR};

fn main() {
    let mut config = match CliConfig::from_args(std::env::args_os()) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USER_ERROR } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    config.interactive = std::io::stdin().is_terminal();
    let stdin = std::io::stdin();
    let code = run(
        &config,
        &mut stdin.lock(),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    );
    std::process::exit(code);
}
