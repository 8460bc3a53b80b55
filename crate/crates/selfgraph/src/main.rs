fn main() {
    std::process::exit(selfgraph::cli::main());
}
