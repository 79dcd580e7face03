//! Exact solution of the 1D Euler Riemann problem (ideal gas), after Toro, ch. 4.

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Primitive {
    pub rho: f64,
    pub u: f64,
    pub p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Wave {
    Shock { speed: f64 },
    Rarefaction { head: f64, tail: f64 },
}

#[derive(Debug, Clone)]
pub struct RiemannSolution {
    pub left: Primitive,
    pub right: Primitive,
    pub gamma: f64,
    pub p_star: f64,
    pub u_star: f64,
    pub rho_star_left: f64,
    pub rho_star_right: f64,
    pub left_wave: Wave,
    pub right_wave: Wave,
    pub iterations: usize,
}

fn sound(s: &Primitive, g: f64) -> f64 {
    (g * s.p / s.rho).sqrt()
}

/// Pressure function `f_K(p)` and its derivative.
fn pressure_function(p: f64, s: &Primitive, g: f64) -> (f64, f64) {
    let c = sound(s, g);
    if p > s.p {
        let a = 2.0 / ((g + 1.0) * s.rho);
        let b = (g - 1.0) / (g + 1.0) * s.p;
        let q = (a / (p + b)).sqrt();
        ((p - s.p) * q, q * (1.0 - 0.5 * (p - s.p) / (b + p)))
    } else {
        let r = p / s.p;
        let e = (g - 1.0) / (2.0 * g);
        (
            2.0 * c / (g - 1.0) * (r.powf(e) - 1.0),
            r.powf(-(g + 1.0) / (2.0 * g)) / (s.rho * c),
        )
    }
}

/// Star-region solution by Newton iteration on `f_L(p) + f_R(p) + Δu = 0`.
pub fn exact_riemann(left: Primitive, right: Primitive, gamma: f64) -> Result<RiemannSolution> {
    let g = gamma;
    for s in [&left, &right] {
        if !(s.rho > 0.0 && s.p > 0.0) {
            return Err(Error::Domain(format!("Riemann data needs positive density and pressure: {s:?}")));
        }
    }
    let (cl, cr) = (sound(&left, g), sound(&right, g));
    let du = right.u - left.u;
    if 2.0 * (cl + cr) / (g - 1.0) <= du {
        return Err(Error::Unsupported("Riemann data generates vacuum".into()));
    }
    // two-rarefaction guess, bounded below
    let e = (g - 1.0) / (2.0 * g);
    let guess = ((cl + cr - 0.5 * (g - 1.0) * du) / (cl / left.p.powf(e) + cr / right.p.powf(e))).powf(1.0 / e);
    let mut p = guess.max(1e-10 * left.p.min(right.p));
    let mut iterations = 0;
    loop {
        let (fl, dl) = pressure_function(p, &left, g);
        let (fr, dr) = pressure_function(p, &right, g);
        let residual = fl + fr + du;
        let scale = cl + cr + du.abs();
        if residual.abs() <= 1e-12 * scale {
            break;
        }
        iterations += 1;
        if iterations > 100 {
            return Err(Error::Numerical(format!("Riemann Newton iteration stalled at p={p}, residual {residual}")));
        }
        let next = p - residual / (dl + dr);
        p = if next <= 0.0 { 0.5 * p } else { next };
    }
    let (fl, _) = pressure_function(p, &left, g);
    let (fr, _) = pressure_function(p, &right, g);
    let u_star = 0.5 * (left.u + right.u) + 0.5 * (fr - fl);
    let gm = (g - 1.0) / (g + 1.0);

    let (rho_star_left, left_wave) = if p > left.p {
        let r = p / left.p;
        let rho = left.rho * (r + gm) / (gm * r + 1.0);
        let speed = left.u - cl * ((g + 1.0) / (2.0 * g) * r + (g - 1.0) / (2.0 * g)).sqrt();
        (rho, Wave::Shock { speed })
    } else {
        let rho = left.rho * (p / left.p).powf(1.0 / g);
        let c_star = cl * (p / left.p).powf(e);
        (
            rho,
            Wave::Rarefaction {
                head: left.u - cl,
                tail: u_star - c_star,
            },
        )
    };
    let (rho_star_right, right_wave) = if p > right.p {
        let r = p / right.p;
        let rho = right.rho * (r + gm) / (gm * r + 1.0);
        let speed = right.u + cr * ((g + 1.0) / (2.0 * g) * r + (g - 1.0) / (2.0 * g)).sqrt();
        (rho, Wave::Shock { speed })
    } else {
        let rho = right.rho * (p / right.p).powf(1.0 / g);
        let c_star = cr * (p / right.p).powf(e);
        (
            rho,
            Wave::Rarefaction {
                head: right.u + cr,
                tail: u_star + c_star,
            },
        )
    };
    Ok(RiemannSolution {
        left,
        right,
        gamma,
        p_star: p,
        u_star,
        rho_star_left,
        rho_star_right,
        left_wave,
        right_wave,
        iterations,
    })
}

impl RiemannSolution {
    /// Self-similar solution at `s = (x - x0)/t`.
    pub fn sample(&self, s: f64) -> Primitive {
        let g = self.gamma;
        if s <= self.u_star {
            match self.left_wave {
                Wave::Shock { speed } => {
                    if s <= speed {
                        self.left
                    } else {
                        self.star_left()
                    }
                }
                Wave::Rarefaction { head, tail } => {
                    if s <= head {
                        self.left
                    } else if s >= tail {
                        self.star_left()
                    } else {
                        let cl = sound(&self.left, g);
                        let f = 2.0 / (g + 1.0) + (g - 1.0) / ((g + 1.0) * cl) * (self.left.u - s);
                        Primitive {
                            rho: self.left.rho * f.powf(2.0 / (g - 1.0)),
                            u: 2.0 / (g + 1.0) * (cl + 0.5 * (g - 1.0) * self.left.u + s),
                            p: self.left.p * f.powf(2.0 * g / (g - 1.0)),
                        }
                    }
                }
            }
        } else {
            match self.right_wave {
                Wave::Shock { speed } => {
                    if s >= speed {
                        self.right
                    } else {
                        self.star_right()
                    }
                }
                Wave::Rarefaction { head, tail } => {
                    if s >= head {
                        self.right
                    } else if s <= tail {
                        self.star_right()
                    } else {
                        let cr = sound(&self.right, g);
                        let f = 2.0 / (g + 1.0) - (g - 1.0) / ((g + 1.0) * cr) * (self.right.u - s);
                        Primitive {
                            rho: self.right.rho * f.powf(2.0 / (g - 1.0)),
                            u: 2.0 / (g + 1.0) * (-cr + 0.5 * (g - 1.0) * self.right.u + s),
                            p: self.right.p * f.powf(2.0 * g / (g - 1.0)),
                        }
                    }
                }
            }
        }
    }

    fn star_left(&self) -> Primitive {
        Primitive {
            rho: self.rho_star_left,
            u: self.u_star,
            p: self.p_star,
        }
    }

    fn star_right(&self) -> Primitive {
        Primitive {
            rho: self.rho_star_right,
            u: self.u_star,
            p: self.p_star,
        }
    }
}
