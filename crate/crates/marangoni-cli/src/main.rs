fn main() {
    std::process::exit(marangoni_cli::main_with(std::env::args_os()));
}
