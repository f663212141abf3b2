fn main() {
    std::process::exit(lglab::app::run(std::env::args_os()));
}
