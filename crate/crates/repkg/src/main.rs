fn main() {
    std::process::exit(repkg::cli::run(std::env::args_os()));
}
