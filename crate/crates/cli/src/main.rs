use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let outcome = luce_cli::run(std::env::args_os());
    if outcome.to_stdout && !outcome.output.is_empty() {
        let mut stdout = std::io::stdout().lock();
        if stdout.write_all(outcome.output.as_bytes()).is_err() {
            return ExitCode::from(luce_cli::EXIT_USAGE as u8);
        }
    }
    if !outcome.message.is_empty() {
        eprint!("{}", outcome.message);
    }
    ExitCode::from(outcome.code as u8)
}
