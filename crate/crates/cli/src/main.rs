fn main() {
    std::process::exit(shg_cli::main_entry());
}
