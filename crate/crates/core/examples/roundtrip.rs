//! Forward-project a phantom, reconstruct it, and report the error.
//!
//! ```text
//! cargo run --release --example roundtrip -- radon:support=1 gauss:0,0,0.15,1 [n_lambda n_phi n_grid]
//! ```

use std::time::Instant;

use funkradon::inversion::{reconstruct, rel_l2, Grid};
use funkradon::transform::{forward, SinogramSpec};
use funkradon::{Geometry, Phantom};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.len() < 2 {
        eprintln!("usage: roundtrip GEOMETRY PHANTOM [N_LAMBDA N_PHI N_GRID]");
        std::process::exit(2);
    }
    let geo = Geometry::parse(&args[0])?;
    let ph = Phantom::parse(&args[1])?;
    let num = |i: usize, d: usize| args.get(i).map_or(Ok(d), |s| s.parse());
    let (nl, np, ng) = (num(2, 513)?, num(3, 360)?, num(4, 129)?);

    let t = Instant::now();
    let sino = forward(&geo, &ph, &SinogramSpec::new(nl, np))?;
    let t_fwd = t.elapsed();
    let grid = Grid::square(ng, geo.support_radius());
    let rec = reconstruct(&sino, &grid)?;
    let err = rel_l2(&rec, &ph.sample(&grid));
    println!(
        "{geo}  rel_l2 = {err:.4e}  forward {:.2}s  total {:.2}s",
        t_fwd.as_secs_f64(),
        t.elapsed().as_secs_f64()
    );
    Ok(())
}
