// profile a single heavy type
use ascheme::enumerate::{enumerate_schemes, EnumOptions};
fn main() {
    let t = std::time::Instant::now();
    let opts = EnumOptions { thin_count: Some(1), verbose: true, ..Default::default() };
    let s = enumerate_schemes(13, &opts);
    println!("{} classes in {:?}", s.len(), t.elapsed());
}
