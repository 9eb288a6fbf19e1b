fn main() {
    std::process::exit(forestnull::cli::run(std::env::args_os()));
}
