//! Random-walk mobility with boundary reflection.
//!
//! Every interval each user redraws a heading and a speed, moves for the
//! interval, and reflects off the area edges (angle of incidence equals angle
//! of reflection). The realized speed is kept so channel models can scale
//! temporal decorrelation with movement.

use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserMotion {
    pub pos: (f64, f64),
    pub velocity: (f64, f64),
    pub speed: f64,
}

impl UserMotion {
    pub fn at(pos: (f64, f64)) -> Self {
        UserMotion { pos, velocity: (0.0, 0.0), speed: 0.0 }
    }
}

/// Advance all users by `dt`, redrawing heading and speed.
pub fn step_mobility(
    users: &mut [UserMotion],
    dt: f64,
    speed_range: (f64, f64),
    width: f64,
    height: f64,
    rng: &mut impl Rng,
) {
    for u in users.iter_mut() {
        let heading = rng.gen::<f64>() * std::f64::consts::TAU;
        let speed = rng.gen_range(speed_range.0..=speed_range.1);
        let mut vx = speed * heading.cos();
        let mut vy = speed * heading.sin();
        let mut x = u.pos.0 + vx * dt;
        let mut y = u.pos.1 + vy * dt;
        // fold back into the area, flipping the offending velocity component
        loop {
            if x < 0.0 {
                x = -x;
                vx = -vx;
            } else if x > width {
                x = 2.0 * width - x;
                vx = -vx;
            } else if y < 0.0 {
                y = -y;
                vy = -vy;
            } else if y > height {
                y = 2.0 * height - y;
                vy = -vy;
            } else {
                break;
            }
        }
        u.pos = (x, y);
        u.velocity = (vx, vy);
        u.speed = speed;
    }
}
