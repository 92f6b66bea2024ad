fn main() {
    std::process::exit(weldlab::cli::run(std::env::args_os()));
}
