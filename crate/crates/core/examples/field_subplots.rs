//! Circular subplots from a rectangular stem map, written as a plot file.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use occlusion_ht::detect::Tree;
use occlusion_ht::harness::{extract_subplots, write_plots_to, PlotGroup};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let trees: Vec<Tree> = (0..90)
        .map(|_| Tree::new(rng.random_range(0.0..30.0), rng.random_range(0.0..30.0), rng.random_range(8.0..45.0)))
        .collect();
    let subs = extract_subplots("stand1", &trees, 30.0, 30.0, 10.0)?;
    let sizes: Vec<usize> = subs.iter().map(|s| s.plot.len()).collect();
    println!(
        "{} subplots, {} to {} trees each",
        subs.len(),
        sizes.iter().min().unwrap(),
        sizes.iter().max().unwrap()
    );
    let groups: Vec<PlotGroup> = subs
        .iter()
        .take(2)
        .map(|s| PlotGroup { plot_id: s.plot_id(), trees: s.plot.trees().to_vec() })
        .collect();
    let mut csv = Vec::new();
    write_plots_to(&mut csv, &groups)?;
    print!("{}", String::from_utf8(csv)?);
    Ok(())
}
