fn main() {
    std::process::exit(temporal_butterfly::cli::main());
}
