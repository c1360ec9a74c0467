fn main() {
    std::process::exit(m3_core::cli::main());
}
