fn main() {
    std::process::exit(hierarchia::cli::run());
}
