fn main() {
    std::process::exit(detbell::cli::run(std::env::args()));
}
