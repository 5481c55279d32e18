fn main() {
    std::process::exit(specshare::cli::main_with_args(std::env::args_os()));
}
