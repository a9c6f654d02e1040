//! Marching-squares extraction of level sets from rectangular fields.

/// A level-crossing segment in physical coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: [f64; 2],
    pub b: [f64; 2],
}

/// A rectangular scalar field on the tensor grid `xs x ys`, values indexed
/// `values[ix * ys.len() + iy]`.
#[derive(Debug, Clone)]
pub struct Field2 {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub values: Vec<f64>,
}

impl Field2 {
    pub fn value(&self, ix: usize, iy: usize) -> f64 {
        self.values[ix * self.ys.len() + iy]
    }

    /// Bilinear interpolation (clamped to the grid).
    pub fn interpolate(&self, x: f64, y: f64) -> f64 {
        let hx = self.xs[1] - self.xs[0];
        let hy = self.ys[1] - self.ys[0];
        let fx = ((x - self.xs[0]) / hx).clamp(0.0, (self.xs.len() - 1) as f64 - 1e-12);
        let fy = ((y - self.ys[0]) / hy).clamp(0.0, (self.ys.len() - 1) as f64 - 1e-12);
        let (ix, iy) = (fx as usize, fy as usize);
        let (tx, ty) = (fx - ix as f64, fy - iy as f64);
        self.value(ix, iy) * (1.0 - tx) * (1.0 - ty)
            + self.value(ix + 1, iy) * tx * (1.0 - ty)
            + self.value(ix, iy + 1) * (1.0 - tx) * ty
            + self.value(ix + 1, iy + 1) * tx * ty
    }
}

fn interp(level: f64, va: f64, vb: f64, a: f64, b: f64) -> f64 {
    // va and vb straddle the level by construction
    a + (level - va) / (vb - va) * (b - a)
}

/// Marching squares with linear edge interpolation. Saddle cells (both
/// diagonals crossing) are disambiguated by the sign of the cell-center
/// average. Output segments carry physical coordinates; fields with no
/// crossing yield an empty list.
pub fn extract_zero_level(field: &Field2, level: f64) -> Vec<Segment> {
    let mut segments = Vec::new();
    let (nx, ny) = (field.xs.len(), field.ys.len());
    for ix in 0..nx.saturating_sub(1) {
        for iy in 0..ny.saturating_sub(1) {
            let (x0, x1) = (field.xs[ix], field.xs[ix + 1]);
            let (y0, y1) = (field.ys[iy], field.ys[iy + 1]);
            // corner values: sw, se, nw, ne
            let vsw = field.value(ix, iy);
            let vse = field.value(ix + 1, iy);
            let vnw = field.value(ix, iy + 1);
            let vne = field.value(ix + 1, iy + 1);

            let mut case = 0u8;
            if vsw > level {
                case |= 1;
            }
            if vse > level {
                case |= 2;
            }
            if vne > level {
                case |= 4;
            }
            if vnw > level {
                case |= 8;
            }
            if case == 0 || case == 15 {
                continue;
            }

            // edge crossing points
            let south = || [interp(level, vsw, vse, x0, x1), y0];
            let north = || [interp(level, vnw, vne, x0, x1), y1];
            let west = || [x0, interp(level, vsw, vnw, y0, y1)];
            let east = || [x1, interp(level, vse, vne, y0, y1)];

            let mut push = |a: [f64; 2], b: [f64; 2]| segments.push(Segment { a, b });
            match case {
                1 | 14 => push(south(), west()),
                2 | 13 => push(south(), east()),
                3 | 12 => push(west(), east()),
                4 | 11 => push(east(), north()),
                6 | 9 => push(south(), north()),
                7 | 8 => push(west(), north()),
                5 | 10 => {
                    let center = 0.25 * (vsw + vse + vnw + vne);
                    let center_high = center > level;
                    // connect the high corners around the saddle
                    if (case == 5) == center_high {
                        push(south(), west());
                        push(east(), north());
                    } else {
                        push(south(), east());
                        push(west(), north());
                    }
                }
                _ => unreachable!(),
            }
        }
    }
    segments
}

/// Points sampled along segments (endpoints and midpoints), for distance
/// computations.
pub fn sample_points(segments: &[Segment]) -> Vec<[f64; 2]> {
    let mut pts = Vec::with_capacity(segments.len() * 3);
    for s in segments {
        pts.push(s.a);
        pts.push(s.b);
        pts.push([0.5 * (s.a[0] + s.b[0]), 0.5 * (s.a[1] + s.b[1])]);
    }
    pts
}

fn point_segment_distance(p: [f64; 2], s: &Segment) -> f64 {
    let d = [s.b[0] - s.a[0], s.b[1] - s.a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p[0] - s.a[0]) * d[0] + (p[1] - s.a[1]) * d[1]) / len2).clamp(0.0, 1.0)
    };
    let c = [s.a[0] + t * d[0], s.a[1] + t * d[1]];
    ((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2)).sqrt()
}

/// Distance from a point to the nearest segment.
pub fn distance_to_segments(p: [f64; 2], segments: &[Segment]) -> f64 {
    segments
        .iter()
        .map(|s| point_segment_distance(p, s))
        .fold(f64::INFINITY, f64::min)
}

/// Symmetric Hausdorff distance between two segment sets, with points
/// inside the exclusion mask ignored. Empty sets (after masking) give 0
/// against empty and infinity against nonempty.
pub fn hausdorff_distance(
    a: &[Segment],
    b: &[Segment],
    exclude: impl Fn(&[f64; 2]) -> bool,
) -> f64 {
    let dir = |from: &[Segment], to: &[Segment]| -> f64 {
        let mut worst = 0.0f64;
        let mut any = false;
        for p in sample_points(from) {
            if exclude(&p) {
                continue;
            }
            any = true;
            worst = worst.max(distance_to_segments(p, to));
        }
        if any {
            worst
        } else {
            0.0
        }
    };
    let empty_a = sample_points(a).iter().all(|p| exclude(p));
    let empty_b = sample_points(b).iter().all(|p| exclude(p));
    match (empty_a, empty_b) {
        (true, true) => 0.0,
        (true, false) | (false, true) => f64::INFINITY,
        (false, false) => dir(a, b).max(dir(b, a)),
    }
}

/// How far the `inner` level set pokes outside the subzero region of
/// `outer_field`: the largest distance from an inner sample point with a
/// positive outer value to the outer zero set (0 when nested).
pub fn containment_slack(inner: &[Segment], outer_field: &Field2, outer: &[Segment]) -> f64 {
    let mut worst = 0.0f64;
    for p in sample_points(inner) {
        if outer_field.interpolate(p[0], p[1]) > 0.0 {
            worst = worst.max(distance_to_segments(p, outer));
        }
    }
    worst
}
