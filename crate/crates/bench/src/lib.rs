//! Seeded instances shared by the benchmarks.

use quadcert_core::random::{random_hqpb, random_rank3_set, random_slemma, random_symmetric};
use quadcert_core::{HqpbInstance, MatrixSet, SLemmaInstance, SeedStream, SymMatrix};

fn stream(name: &str, n: usize) -> SeedStream {
    SeedStream::new(0x5eed).split(name).split_index(n as u64)
}

pub fn symmetric(n: usize) -> SymMatrix {
    random_symmetric(&mut stream("symmetric", n).rng(), n)
}

pub fn rank3_set(n: usize, m: usize) -> MatrixSet {
    random_rank3_set(&mut stream("rank3", n * 16 + m).rng(), n, m)
}

pub fn hqpb(n: usize) -> HqpbInstance {
    random_hqpb(&mut stream("hqpb", n).rng(), n)
}

pub fn slemma(n: usize, m: usize) -> SLemmaInstance {
    random_slemma(&mut stream("slemma", n * 16 + m).rng(), n, m)
}
