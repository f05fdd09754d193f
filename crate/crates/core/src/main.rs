fn main() {
    std::process::exit(nonherm_core::cli::main_with_args(std::env::args_os()));
}
