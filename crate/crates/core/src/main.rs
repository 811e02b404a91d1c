fn main() {
    std::process::exit(kinetic::cli::run(std::env::args_os()));
}
