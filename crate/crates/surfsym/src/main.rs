fn main() {
    std::process::exit(surfsym::cli::main_with_args(std::env::args_os()));
}
