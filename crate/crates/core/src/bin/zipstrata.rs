fn main() {
    std::process::exit(zipstrata::cli::main_with(std::env::args_os()));
}
