fn main() {
    std::process::exit(hardy_trace::cli::main_with_args(std::env::args_os()));
}
