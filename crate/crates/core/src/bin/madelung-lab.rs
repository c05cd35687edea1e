fn main() {
    std::process::exit(madelung_lab::cli::run(std::env::args_os()));
}
