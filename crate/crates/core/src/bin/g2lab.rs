fn main() {
    std::process::exit(g2lab::cli::run(std::env::args_os()));
}
