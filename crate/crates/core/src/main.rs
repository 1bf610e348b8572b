fn main() {
    std::process::exit(kcontract::cli::run(std::env::args_os()));
}
