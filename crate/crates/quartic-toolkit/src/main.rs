fn main() {
    std::process::exit(quartic_toolkit::cli::main_entry());
}
