//! Derivative-free local refinement (Nelder–Mead on the plane).

/// Stopping rules: the simplex diameter falls below `step_tolerance`, or
/// `max_iterations` is reached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescentOptions {
    pub step_tolerance: f64,
    pub max_iterations: usize,
}

impl Default for DescentOptions {
    fn default() -> Self {
        Self { step_tolerance: 1e-10, max_iterations: 10_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescentResult {
    pub point: [f64; 2],
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn lerp(a: [f64; 2], b: [f64; 2], t: f64) -> [f64; 2] {
    [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
}

/// Minimise `f` from `start` with an initial right-angled simplex of edge
/// `step`, using the standard coefficients (reflection 1, expansion 2,
/// contraction ½, shrink ½).
pub fn nelder_mead(f: impl Fn([f64; 2]) -> f64, start: [f64; 2], step: f64, opts: &DescentOptions) -> DescentResult {
    let mut simplex = [start, [start[0] + step, start[1]], [start[0], start[1] + step]];
    let mut values = simplex.map(&f);
    let mut iterations = 0;
    let diameter = |s: &[[f64; 2]; 3]| {
        let d = |a: [f64; 2], b: [f64; 2]| (a[0] - b[0]).hypot(a[1] - b[1]);
        d(s[0], s[1]).max(d(s[0], s[2])).max(d(s[1], s[2]))
    };
    let mut converged = false;
    while iterations < opts.max_iterations {
        // Order best → worst (stable, so ties keep their positions).
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = idx.map(|k| simplex[k]);
        values = idx.map(|k| values[k]);
        if diameter(&simplex) < opts.step_tolerance {
            converged = true;
            break;
        }
        iterations += 1;
        let centroid = lerp(simplex[0], simplex[1], 0.5);
        let reflected = lerp(centroid, simplex[2], -1.0);
        let fr = f(reflected);
        if fr < values[0] {
            let expanded = lerp(centroid, simplex[2], -2.0);
            let fe = f(expanded);
            if fe < fr {
                simplex[2] = expanded;
                values[2] = fe;
            } else {
                simplex[2] = reflected;
                values[2] = fr;
            }
            continue;
        }
        if fr < values[1] {
            simplex[2] = reflected;
            values[2] = fr;
            continue;
        }
        let (contracted, fc) = if fr < values[2] {
            let c = lerp(centroid, reflected, 0.5);
            (c, f(c))
        } else {
            let c = lerp(centroid, simplex[2], 0.5);
            (c, f(c))
        };
        if fc < values[2].min(fr) {
            simplex[2] = contracted;
            values[2] = fc;
            continue;
        }
        for k in 1..3 {
            simplex[k] = lerp(simplex[0], simplex[k], 0.5);
            values[k] = f(simplex[k]);
        }
    }
    let best = (0..3).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap_or(0);
    DescentResult { point: simplex[best], value: values[best], iterations, converged }
}
