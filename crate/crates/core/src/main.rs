fn main() -> std::process::ExitCode {
    lingsel::cli::dispatch(std::env::args_os())
}
