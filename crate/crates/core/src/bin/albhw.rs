fn main() {
    std::process::exit(albhw::cli::run(std::env::args_os()));
}
