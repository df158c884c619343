fn main() -> std::process::ExitCode {
    geodiscover_cli::cli::run(std::env::args_os())
}
