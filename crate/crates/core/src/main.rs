fn main() {
    std::process::exit(ensaudit::cli::main_with_args(std::env::args_os()));
}
