fn main() {
    std::process::exit(clawdom::cli::main());
}
