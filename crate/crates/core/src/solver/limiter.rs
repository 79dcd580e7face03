use crate::element::{ElementField, ElementOperators};
use crate::physics::{pressure_unchecked, State};
use crate::{Error, Result};

fn state_at(cell: &[f64], ncomp: usize, nodes: usize, weights: &[f64]) -> State {
    let mut s = [0.0; 4];
    for c in 0..ncomp {
        s[c] = weights.iter().zip(&cell[c * nodes..(c + 1) * nodes]).map(|(a, b)| a * b).sum();
    }
    s
}

fn check_points(ops: &ElementOperators) -> Vec<Vec<f64>> {
    let nd = ops.ndofs;
    let mut pts: Vec<Vec<f64>> = (0..nd)
        .map(|i| {
            let mut e = vec![0.0; nd];
            e[i] = 1.0;
            e
        })
        .collect();
    pts.extend((0..ops.quad.len()).map(|q| ops.basis.row(q).to_vec()));
    pts.extend((0..ops.flux_quad.len()).map(|q| ops.flux_basis.row(q).to_vec()));
    for trace in &ops.face_traces {
        pts.extend((0..trace.rows()).map(|k| trace.row(k).to_vec()));
    }
    pts
}

/// Zhang-Shu positivity limiter for DG Euler fields.
///
/// Deviations from the cell average are scaled first for density and then, by
/// bisection, for pressure, so that both are at least `eps` at every nodal point and
/// every volume, flux and face quadrature point. Returns the number of modified cells.
pub fn zhang_shu_limit(field: &mut ElementField, ops: &ElementOperators, dim: usize, gamma: f64, eps: f64) -> Result<usize> {
    let m = field.num_components();
    let nd = ops.ndofs;
    let points = check_points(ops);
    let mut limited = 0;
    for e in 0..field.num_cells() {
        let cell = field.cell(e).to_vec();
        let mut mean = [0.0; 4];
        for c in 0..m {
            mean[c] = ops.average(&cell[c * nd..(c + 1) * nd]);
        }
        let p_mean = pressure_unchecked(&mean, dim, gamma);
        if !(mean[0] > eps && p_mean > eps) {
            return Err(Error::State {
                cell: e,
                point: [f64::NAN; 2],
                reason: format!("cell average not admissible (density {}, pressure {p_mean})", mean[0]),
            });
        }
        let states: Vec<State> = points.iter().map(|w| state_at(&cell, m, nd, w)).collect();
        let rho_min = states.iter().map(|s| s[0]).fold(f64::INFINITY, f64::min);
        let theta1 = if rho_min < eps {
            ((mean[0] - eps) / (mean[0] - rho_min)).min(1.0)
        } else {
            1.0
        };
        let blend = |s: &State, t: f64| -> State {
            let mut out = *s;
            for c in 0..m {
                out[c] = mean[c] + t * (s[c] - mean[c]);
            }
            out
        };
        let mut theta2: f64 = 1.0;
        for s in &states {
            let mut s1 = *s;
            s1[0] = mean[0] + theta1 * (s[0] - mean[0]);
            if pressure_unchecked(&s1, dim, gamma) >= eps {
                continue;
            }
            let (mut lo, mut hi) = (0.0, 1.0);
            for _ in 0..40 {
                let mid = 0.5 * (lo + hi);
                let probe = blend(&s1, mid);
                if probe[0] > 0.0 && pressure_unchecked(&probe, dim, gamma) >= eps {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            theta2 = theta2.min(lo);
        }
        if theta1 < 1.0 || theta2 < 1.0 {
            limited += 1;
            let block = field.cell_mut(e);
            for i in 0..nd {
                block[i] = mean[0] + theta2 * theta1 * (cell[i] - mean[0]);
            }
            for c in 1..m {
                for i in 0..nd {
                    let j = c * nd + i;
                    block[j] = mean[c] + theta2 * (cell[j] - mean[c]);
                }
            }
        }
    }
    Ok(limited)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::ReferenceElement;
    use crate::physics::conserved_from_primitive;

    fn one_cell(p: usize, f: impl Fn(f64) -> State) -> (ElementOperators, ElementField) {
        let elem = ReferenceElement::new(1, p).unwrap();
        let ops = ElementOperators::new(&elem, [0.1, 1.0], false).unwrap();
        let mut data = vec![0.0; 3 * ops.ndofs];
        for (i, x) in ops.node_points.iter().enumerate() {
            let s = f(x[0]);
            for c in 0..3 {
                data[c * ops.ndofs + i] = s[c];
            }
        }
        let field = ElementField::from_vec(1, 3, ops.ndofs, data);
        (ops, field)
    }

    fn means(ops: &ElementOperators, f: &ElementField) -> Vec<f64> {
        (0..3).map(|c| ops.average(f.block(0, c))).collect()
    }

    #[test]
    fn positive_field_is_untouched() {
        let (ops, mut f) = one_cell(3, |x| conserved_from_primitive(1.0 + x, [0.3, 0.0], 1.0 + x * x, 1, 1.4));
        let before = f.clone();
        assert_eq!(zhang_shu_limit(&mut f, &ops, 1, 1.4, 1e-8).unwrap(), 0);
        assert_eq!(f.as_slice(), before.as_slice());
    }

    #[test]
    fn density_scaling_example() {
        // p = 1 nodes at 0 and 1: density -0.5 and 2.5, mean 1
        let (ops, mut f) = one_cell(1, |x| conserved_from_primitive(-0.5 + 3.0 * x, [0.0, 0.0], 1.0, 1, 1.4));
        let m0 = means(&ops, &f);
        assert!((m0[0] - 1.0).abs() < 1e-15);
        zhang_shu_limit(&mut f, &ops, 1, 1.4, 1e-8).unwrap();
        let theta = (1.0 - 1e-8) / 1.5;
        assert!((theta - 0.66666666f64).abs() < 1e-15);
        assert!((f.block(0, 0)[0] - (1.0 - theta * 1.5)).abs() < 1e-14);
        let m1 = means(&ops, &f);
        for c in 0..3 {
            assert!((m0[c] - m1[c]).abs() <= 1e-14 * m0[c].abs().max(1.0));
        }
    }

    #[test]
    fn pressure_is_restored_at_all_check_points() {
        let g = 1.4;
        let (ops, mut f) = one_cell(4, |x| {
            let p = if x < 0.5 { 1e-4 } else { 1.0 };
            let mut u = conserved_from_primitive(1.0, [if x < 0.5 { 3.0 } else { 0.0 }, 0.0], p, 1, g);
            u[2] -= if x < 0.2 { 0.1 } else { 0.0 };
            u
        });
        let m0 = means(&ops, &f);
        assert_eq!(zhang_shu_limit(&mut f, &ops, 1, g, 1e-8).unwrap(), 1);
        let cell = f.cell(0).to_vec();
        for w in check_points(&ops) {
            let s = state_at(&cell, 3, ops.ndofs, &w);
            assert!(s[0] >= 1e-8 && pressure_unchecked(&s, 1, g) >= 1e-8 * (1.0 - 1e-6));
        }
        let m1 = means(&ops, &f);
        for c in 0..3 {
            assert!((m0[c] - m1[c]).abs() <= 1e-14 * m0[c].abs().max(1.0));
        }
    }

    #[test]
    fn inadmissible_average_aborts() {
        let (ops, mut f) = one_cell(1, |_| [-1.0, 0.0, 1.0, 0.0]);
        assert!(matches!(zhang_shu_limit(&mut f, &ops, 1, 1.4, 1e-8), Err(Error::State { .. })));
    }
}
