fn main() {
    std::process::exit(unitom::cli::run(std::env::args_os()));
}
