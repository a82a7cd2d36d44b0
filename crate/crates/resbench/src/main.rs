fn main() {
    std::process::exit(resbench::cli::run_command(std::env::args()));
}
