fn main() {
    std::process::exit(endure::cli::run(std::env::args_os()));
}
