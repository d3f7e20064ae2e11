fn main() {
    std::process::exit(obsassign_cli::main_with_args(std::env::args_os()));
}
