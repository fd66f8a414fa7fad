fn main() {
    std::process::exit(coherent_pair::cli::run(std::env::args_os()));
}
