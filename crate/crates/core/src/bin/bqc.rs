fn main() {
    std::process::exit(bqc::cli::main_entry(std::env::args_os()));
}
