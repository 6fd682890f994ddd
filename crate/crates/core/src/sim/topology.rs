//! Topology generation: macro cell at the center, small cells uniform with a
//! minimum pairwise separation, users uniform.

use rand::Rng;

use crate::error::{Error, Result};

pub type Point = (f64, f64);

#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    pub macro_pos: Point,
    pub cells: Vec<Point>,
    pub users: Vec<Point>,
}

const MAX_PLACEMENT_ATTEMPTS: usize = 10_000;

pub fn generate_topology(
    width: f64,
    height: f64,
    n_cells: usize,
    n_users: usize,
    min_separation: f64,
    rng: &mut impl Rng,
) -> Result<Topology> {
    let mut cells: Vec<Point> = Vec::with_capacity(n_cells);
    let mut attempts = 0;
    while cells.len() < n_cells {
        attempts += 1;
        if attempts > MAX_PLACEMENT_ATTEMPTS {
            return Err(Error::config(format!(
                "could not place {n_cells} cells with separation {min_separation} m \
                 in {width}x{height} m after {MAX_PLACEMENT_ATTEMPTS} attempts"
            )));
        }
        let p = (rng.gen::<f64>() * width, rng.gen::<f64>() * height);
        if cells.iter().all(|c| dist(*c, p) >= min_separation) {
            cells.push(p);
        }
    }
    let users: Vec<Point> =
        (0..n_users).map(|_| (rng.gen::<f64>() * width, rng.gen::<f64>() * height)).collect();
    Ok(Topology { macro_pos: (width / 2.0, height / 2.0), cells, users })
}

pub fn dist(a: Point, b: Point) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}
