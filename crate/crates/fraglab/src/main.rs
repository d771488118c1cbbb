fn main() {
    std::process::exit(fraglab::run(std::env::args_os()));
}
