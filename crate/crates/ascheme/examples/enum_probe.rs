use ascheme::enumerate::{enumerate_schemes, EnumOptions};
fn main() {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args[1].parse().unwrap();
    let t = std::time::Instant::now();
    let opts = EnumOptions { verbose: true, ..Default::default() };
    let schemes = enumerate_schemes(n, &opts);
    println!("n={n}: {} classes in {:?}", schemes.len(), t.elapsed());
}
