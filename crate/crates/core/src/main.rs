fn main() {
    std::process::exit(divstab::cli::run(std::env::args_os()));
}
