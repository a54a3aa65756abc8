//! Shadows of stems seen from the plot centre, probe-circle arcs and areas.

use occlusion_ht::geom::{shadow_of, MorphTransform, PlanePoint, ShadowUnion, StemDisc};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let stems = [(3.0, 1.0, 0.15), (5.0, -2.0, 0.25), (-4.0, 4.0, 0.2), (7.5, 0.5, 0.3)];
    let mut union = ShadowUnion::new();
    for &(x, y, rho) in &stems {
        let shadow = shadow_of(StemDisc::new(PlanePoint::new(x, y), rho)?)?;
        println!(
            "stem at ({x}, {y}) r={rho}: direction {:.4} rad, half opening {:.4} rad, bark distance {:.3} m",
            shadow.central_angle(),
            shadow.half_angle(),
            shadow.near_distance()
        );
        union.push(shadow);
    }

    for r in [2.0, 6.0, 9.5] {
        for t in [MorphTransform::Erode(0.1), MorphTransform::Identity, MorphTransform::Dilate(0.1)] {
            let arcs = union.occluded_arcs(r, t)?;
            println!("r = {r:>4}: {t:?} hides {:.4} of the circle in {} arcs", arcs.measure() / std::f64::consts::TAU, arcs.intervals().len());
        }
    }

    let p = PlanePoint::new(9.0, 3.0);
    println!("point {p:?} hidden: {}", union.contains(p));
    for t in [MorphTransform::Erode(0.1), MorphTransform::Identity, MorphTransform::Dilate(0.1)] {
        println!(
            "{t:?}: shadow area within 10 m {:.4} m^2 (quadrature {:.4})",
            union.morph_area_exact(t, 10.0)?,
            union.morph_area(t, 10.0)?
        );
    }
    Ok(())
}
