//! Writes a synthetic corpus: `synth_corpus <records> <seed> <out.csv>`.

use std::fs::File;
use std::io::BufWriter;

use techspace_cli::synth::{write_synthetic, SynthConfig};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    if args.len() != 4 {
        eprintln!("usage: synth_corpus <records> <seed> <out.csv>");
        std::process::exit(2);
    }
    let cfg = SynthConfig {
        records: args[1].parse().expect("record count"),
        seed: args[2].parse().expect("seed"),
        ..Default::default()
    };
    let out = BufWriter::new(File::create(&args[3]).expect("output file"));
    write_synthetic(cfg, out).expect("write corpus");
}
