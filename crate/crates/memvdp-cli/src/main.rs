fn main() {
    std::process::exit(memvdp::run());
}
