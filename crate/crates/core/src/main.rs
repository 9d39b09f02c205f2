fn main() {
    std::process::exit(edchase::cli::run(std::env::args_os()));
}
