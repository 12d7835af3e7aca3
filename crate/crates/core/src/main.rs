fn main() {
    std::process::exit(batopt::cli::main());
}
