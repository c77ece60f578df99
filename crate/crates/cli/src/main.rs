fn main() {
    std::process::exit(qtag_cli::main_with_args(std::env::args_os()));
}
