fn main() {
    std::process::exit(modelsets::cli::main_with_args(std::env::args_os()));
}
