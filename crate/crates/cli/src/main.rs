use clap::Parser;
use warpgeo_cli::{main_with, Options};

fn main() {
    let opts = Options::parse();
    std::process::exit(main_with(&opts));
}
