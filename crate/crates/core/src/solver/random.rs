use std::sync::Arc;

use rand::Rng;

use crate::discretization::{Field, Grid, GridKind};
use crate::real::{lit, to_f64, Real};

/// Positive smooth random field: one to four Gaussian bumps with centers inside `B_reach`,
/// amplitudes in `[0.5, 3]` and widths in `[0.3, 1.5]`. Zero on the Dirichlet layer.
pub fn random_field<T: Real, R: Rng + ?Sized>(grid: &Arc<Grid<T>>, reach: f64, rng: &mut R) -> Field<T> {
    let reach = reach.min(0.5 * to_f64(grid.k())).max(0.0);
    let count = rng.gen_range(1..=4);
    let bumps: Vec<([f64; 3], f64, f64)> = (0..count)
        .map(|_| {
            let c = match grid.kind() {
                GridKind::Radial => [rng.gen_range(0.0..=reach), 0.0, 0.0],
                GridKind::Box3d => loop {
                    let c = [0; 3].map(|_| rng.gen_range(-reach..=reach));
                    if c.iter().map(|x| x * x).sum::<f64>() <= reach * reach {
                        break c;
                    }
                },
            };
            (c, rng.gen_range(0.5..=3.0), rng.gen_range(0.3..=1.5))
        })
        .collect();
    let kind = grid.kind();
    Field::from_fn(grid.clone(), |x, r| {
        let v: f64 = bumps
            .iter()
            .map(|&(c, amp, width)| {
                let d2 = match kind {
                    GridKind::Radial => (to_f64(r) - c[0]).powi(2),
                    GridKind::Box3d => (0..3).map(|i| (to_f64(x[i]) - c[i]).powi(2)).sum(),
                };
                amp * (-d2 / (width * width)).exp()
            })
            .sum();
        lit(v)
    })
    .with_dirichlet()
}
