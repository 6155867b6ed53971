fn main() {
    std::process::exit(greatroot_cli::main_with_args(std::env::args_os()));
}
