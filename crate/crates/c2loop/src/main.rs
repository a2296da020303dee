fn main() {
    std::process::exit(c2loop::cli::main_entry());
}
