fn main() -> std::process::ExitCode {
    molmask::cli::run(std::env::args_os())
}
