fn main() {
    std::process::exit(mhs::run(std::env::args_os()));
}
