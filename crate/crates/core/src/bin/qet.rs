fn main() {
    std::process::exit(qet::cli::run(std::env::args_os()));
}
