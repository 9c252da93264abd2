use std::process::ExitCode;

fn main() -> ExitCode {
    sparsity_monitor_cli::run_from(std::env::args_os())
}
