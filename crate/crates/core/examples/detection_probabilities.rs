//! Detection, probabilities and benchmark weights on one small plot.

use occlusion_ht::detect::{detect_plot, order_trees, AreaMethod, DetectionCondition, Tree, WeightRequest};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let trees = vec![
        Tree::new(2.0, 0.3, 28.0),
        Tree::new(4.5, 0.5, 22.0),
        Tree::new(6.0, 0.9, 18.0),
        Tree::new(-3.0, 5.0, 35.0),
        Tree::new(-6.0, 10.0, 15.0),
        Tree::new(0.5, -8.0, 40.0),
        Tree::new(1.0, -9.5, 12.0),
    ];
    let plot = order_trees(trees, 10.0)?;
    for cond in [DetectionCondition::FULL, DetectionCondition::CENTRE, DetectionCondition::ANY] {
        println!("condition {}", cond.name());
        let records = detect_plot(&plot, cond, AreaMethod::Exact, WeightRequest::ALL)?;
        for (tree, rec) in plot.trees().iter().zip(&records) {
            println!(
                "  ({:>5.1}, {:>5.1}) dbh {:>4.1}: detected {:<5} p = {:.4} kuronen = {:.4}",
                tree.location.x, tree.location.y, tree.dbh, rec.detected, rec.probability, rec.kuronen
            );
        }
        println!("  O&O plot weight {:.4}", records[0].oo);
    }
    Ok(())
}
