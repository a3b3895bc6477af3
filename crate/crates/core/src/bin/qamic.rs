fn main() {
    std::process::exit(qamic::cli::main_with(std::env::args_os()));
}
