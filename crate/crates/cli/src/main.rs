fn main() {
    std::process::exit(aperiodic_cli::dispatch(std::env::args_os()));
}
