use crate::mesh::Point2;

/// Rule on a triangle in barycentric coordinates; weights sum to one and
/// are multiplied by the triangle area.
#[derive(Clone, Debug, PartialEq)]
pub struct TriangleRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub degree: u32,
}

impl TriangleRule {
    pub fn centroid() -> Self {
        TriangleRule {
            points: vec![[1.0 / 3.0; 3]],
            weights: vec![1.0],
            degree: 1,
        }
    }

    /// Three interior points, exact for quadratics.
    pub fn degree2() -> Self {
        let (a, b) = (2.0 / 3.0, 1.0 / 6.0);
        TriangleRule {
            points: vec![[a, b, b], [b, a, b], [b, b, a]],
            weights: vec![1.0 / 3.0; 3],
            degree: 2,
        }
    }

    /// Six-point Dunavant rule, exact for quartics.
    pub fn degree4() -> Self {
        let (a1, b1, w1) = (0.108_103_018_168_070, 0.445_948_490_915_965, 0.223_381_589_678_011);
        let (a2, b2, w2) = (0.816_847_572_980_459, 0.091_576_213_509_771, 0.109_951_743_655_322);
        TriangleRule {
            points: vec![
                [a1, b1, b1],
                [b1, a1, b1],
                [b1, b1, a1],
                [a2, b2, b2],
                [b2, a2, b2],
                [b2, b2, a2],
            ],
            weights: vec![w1, w1, w1, w2, w2, w2],
            degree: 4,
        }
    }

    /// Composite rule: `self` applied on each of the `4^levels` triangles of
    /// uniform midpoint refinement. Keeps the polynomial degree and resolves
    /// coefficients that oscillate within an element.
    pub fn refined(&self, levels: u32) -> Self {
        let mut cells: Vec<[[f64; 3]; 3]> = vec![[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]];
        for _ in 0..levels {
            let mid = |a: [f64; 3], b: [f64; 3]| [0, 1, 2].map(|i| 0.5 * (a[i] + b[i]));
            cells = cells
                .iter()
                .flat_map(|&[a, b, c]| {
                    let (ab, bc, ca) = (mid(a, b), mid(b, c), mid(c, a));
                    [[a, ab, ca], [ab, b, bc], [ca, bc, c], [bc, ca, ab]]
                })
                .collect();
        }
        let scale = 1.0 / cells.len() as f64;
        let mut points = Vec::with_capacity(cells.len() * self.points.len());
        let mut weights = Vec::with_capacity(points.capacity());
        for cell in &cells {
            for (lam, w) in self.points.iter().zip(&self.weights) {
                points.push([0, 1, 2].map(|i| (0..3).map(|j| lam[j] * cell[j][i]).sum()));
                weights.push(w * scale);
            }
        }
        TriangleRule { points, weights, degree: self.degree }
    }

    /// `∫_K f` for the triangle with the given corners and signed-positive area.
    pub fn integrate(&self, corners: &[Point2; 3], area: f64, mut f: impl FnMut(Point2, &[f64; 3]) -> f64) -> f64 {
        let mut s = 0.0;
        for (lam, w) in self.points.iter().zip(&self.weights) {
            s += w * f(Point2::combine(corners, lam), lam);
        }
        area * s
    }
}

/// Gauss–Legendre rule on `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SegmentRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl SegmentRule {
    /// `n`-point Gauss rule, exact for degree `2n - 1`.
    pub fn gauss(n: usize) -> Self {
        assert!(n > 0, "Gauss rule needs at least one point");
        let mut points = vec![0.0; n];
        let mut weights = vec![0.0; n];
        // Newton on the Legendre polynomial P_n from the Chebyshev-like guess.
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    (p0, p1) = (p1, p2);
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // Nodes are mapped from [-1, 1] to [0, 1].
            points[i] = 0.5 * (1.0 - x);
            points[n - 1 - i] = 0.5 * (1.0 + x);
            weights[i] = 0.5 * w;
            weights[n - 1 - i] = 0.5 * w;
        }
        SegmentRule { points, weights }
    }

    /// `∫_{[a,b]} f ds`.
    pub fn integrate(&self, a: Point2, b: Point2, mut f: impl FnMut(Point2) -> f64) -> f64 {
        let len = a.distance(b);
        let mut s = 0.0;
        for (t, w) in self.points.iter().zip(&self.weights) {
            s += w * f(Point2::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)));
        }
        len * s
    }
}

/// Rules used by assembly: triangles for FE terms and loads, segments for
/// FVE fluxes.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub triangle: TriangleRule,
    pub segment: SegmentRule,
}

impl QuadratureRule {
    /// Composite rules whose sub-elements and segment spacing are no wider
    /// than `width` on a mesh of size `h`; integrates coefficients that vary
    /// on a scale of `width` accurately however coarse the mesh is.
    pub fn resolving(h: f64, width: f64) -> Self {
        let ratio = (h / width).max(1.0);
        let levels = ratio.log2().ceil().min(8.0) as u32;
        let points = ((2.0 * ratio).ceil() as usize + 2).min(256);
        QuadratureRule {
            triangle: TriangleRule::degree4().refined(levels),
            segment: SegmentRule::gauss(points),
        }
    }
}

impl Default for QuadratureRule {
    fn default() -> Self {
        QuadratureRule {
            triangle: TriangleRule::degree2(),
            segment: SegmentRule::gauss(2),
        }
    }
}
