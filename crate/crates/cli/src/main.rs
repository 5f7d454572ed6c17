fn main() {
    std::process::exit(widthslab_cli::run(std::env::args_os()));
}
