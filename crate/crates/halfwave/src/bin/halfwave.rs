fn main() {
    std::process::exit(halfwave::cli::main());
}
