//! Globally adaptive 1-D quadrature on a Gauss–Kronrod 7/15 pair.
//!
//! The rate integrands mix smooth power-law spectra with oscillatory
//! decoherence and form factors whose scales span many orders of magnitude,
//! so the driver is a QUADPACK-style worst-interval-first bisector: evaluate
//! G7/K15 on every interval, keep a priority queue ordered by the local
//! error estimate, and split the worst interval until the summed error meets
//! the tolerance. Callers seed the queue with breakpoints at known feature
//! scales (oscillation periods, form-factor zeros) via
//! [`QuadOptions::initial_points`].
//!
//! Results are deterministic: the bisection sequence is a pure function of
//! the inputs, and the final value is summed over intervals sorted by left
//! endpoint, independent of the order the queue happened to produce them.

use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Kronrod-15 abscissae (positive half, descending); odd indices together
/// with the midpoint form the embedded Gauss-7 rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

/// Gauss-7 weights (positive half).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Kronrod-15 weights (positive half, matching `XGK`).
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Tuning knobs for one integration.
#[derive(Debug, Clone)]
pub struct QuadOptions {
    /// Target relative error on the integral.
    pub rel_tol: f64,
    /// Absolute error floor; convergence requires
    /// `Σ err ≤ max(abs_tol, rel_tol·|Σ value|)`.
    pub abs_tol: f64,
    /// Maximum number of interval bisections before giving up.
    pub max_subdivisions: usize,
    /// Interior breakpoints seeding the initial interval set (values outside
    /// the integration range are ignored; duplicates are merged).
    pub initial_points: Vec<f64>,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            rel_tol: 1e-8,
            abs_tol: 0.0,
            max_subdivisions: 4000,
            initial_points: Vec::new(),
        }
    }
}

impl QuadOptions {
    /// Options with the given relative tolerance and defaults elsewhere.
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        QuadOptions {
            rel_tol,
            ..QuadOptions::default()
        }
    }
}

/// Outcome of one integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    /// Estimate of the integral.
    pub value: f64,
    /// Estimated absolute error.
    pub error: f64,
    /// Number of integrand evaluations performed.
    pub evaluations: usize,
    /// Number of interval bisections performed.
    pub subdivisions: usize,
    /// Whether the error target was met within the subdivision budget.
    pub converged: bool,
}

impl QuadResult {
    /// Relative error estimate (0 when the value itself is 0).
    pub fn rel_error(&self) -> f64 {
        if self.value == 0.0 {
            0.0
        } else {
            self.error.abs() / self.value.abs()
        }
    }
}

/// One evaluated interval in the worst-first queue.
#[derive(Debug, Clone, Copy)]
struct Interval {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error && self.a == other.a
    }
}
impl Eq for Interval {}
impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Interval {
    /// Max-heap on local error; ties broken by left endpoint so the pop
    /// order (and hence the bisection sequence) is a total order.
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.a.partial_cmp(&self.a).unwrap_or(Ordering::Equal))
    }
}

/// Gauss–Kronrod 7/15 evaluation on `[a, b]`, returning the Kronrod value,
/// a rescaled error estimate, and the count of integrand evaluations.
#[allow(clippy::needless_range_loop)] // index couples WG/XGK/fv stencils
fn qk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<(f64, f64)> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let abs_h = h.abs();

    let fc = f(c);
    let mut fv1 = [0.0_f64; 7];
    let mut fv2 = [0.0_f64; 7];

    let mut resg = fc * WG[3];
    let mut resk = fc * WGK[7];
    let mut resabs = fc.abs() * WGK[7];

    for j in 0..3 {
        let jtw = j * 2 + 1;
        let absc = h * XGK[jtw];
        let f1 = f(c - absc);
        let f2 = f(c + absc);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        let fsum = f1 + f2;
        resg += WG[j] * fsum;
        resk += WGK[jtw] * fsum;
        resabs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..4 {
        let jtwm1 = j * 2;
        let absc = h * XGK[jtwm1];
        let f1 = f(c - absc);
        let f2 = f(c + absc);
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        resk += WGK[jtwm1] * (f1 + f2);
        resabs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }

    let reskh = resk * 0.5;
    let mut resasc = WGK[7] * (fc - reskh).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }

    let value = resk * h;
    if !value.is_finite() {
        return Err(Error::Quadrature {
            what: format!("non-finite integrand on [{a:e}, {b:e}]"),
            value,
            error: f64::INFINITY,
        });
    }
    let resabs = resabs * abs_h;
    let resasc = resasc * abs_h;
    let mut err = ((resk - resg) * h).abs();

    // QUADPACK error rescaling: sharpen the raw G-K difference when the
    // integrand is smooth and floor it at machine-precision times |∫|f||.
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    let tiny = f64::MIN_POSITIVE / (50.0 * f64::EPSILON);
    if resabs > tiny {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }

    Ok((value, err))
}

/// Integrate `f` over `[a, b]` adaptively.
///
/// Returns 0 immediately for an empty or inverted range. Non-finite
/// integrand values are an [`Error::Quadrature`]; running out of the
/// subdivision budget is *not* an error — the result carries
/// `converged = false` together with the partial value and error.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    opts: &QuadOptions,
) -> Result<QuadResult> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain(format!(
            "non-finite integration range [{a}, {b}]"
        )));
    }
    if b <= a {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
            subdivisions: 0,
            converged: true,
        });
    }

    // Assemble initial edges: range ends plus any interior breakpoints.
    let mut edges: Vec<f64> = Vec::with_capacity(opts.initial_points.len() + 2);
    edges.push(a);
    for &p in &opts.initial_points {
        if p > a && p < b {
            edges.push(p);
        }
    }
    edges.push(b);
    edges.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let min_sep = (b - a) * 1e-14;
    edges.dedup_by(|x, y| (*x - *y).abs() <= min_sep);

    let mut heap: BinaryHeap<Interval> = BinaryHeap::new();
    let mut evaluations = 0usize;
    for w in edges.windows(2) {
        let (va, vb) = (w[0], w[1]);
        let (value, error) = qk15(&f, va, vb)?;
        evaluations += 15;
        heap.push(Interval {
            a: va,
            b: vb,
            value,
            error,
        });
    }

    let mut subdivisions = 0usize;
    loop {
        let total_value: f64 = heap.iter().map(|iv| iv.value).sum();
        let total_error: f64 = heap.iter().map(|iv| iv.error).sum();
        let target = opts.abs_tol.max(opts.rel_tol * total_value.abs());
        let converged = total_error <= target;
        if converged || subdivisions >= opts.max_subdivisions {
            // Deterministic final summation in left-endpoint order.
            let mut intervals: Vec<Interval> = heap.into_vec();
            intervals.sort_by(|x, y| x.a.partial_cmp(&y.a).unwrap());
            let value: f64 = intervals.iter().map(|iv| iv.value).sum();
            let error: f64 = intervals.iter().map(|iv| iv.error).sum();
            return Ok(QuadResult {
                value,
                error,
                evaluations,
                subdivisions,
                converged,
            });
        }

        let worst = heap.pop().expect("heap non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval at floating-point resolution; freeze it as-is.
            let mut frozen = worst;
            frozen.error = 0.0;
            heap.push(frozen);
            subdivisions += 1;
            continue;
        }
        let (v1, e1) = qk15(&f, worst.a, mid)?;
        let (v2, e2) = qk15(&f, mid, worst.b)?;
        evaluations += 30;
        subdivisions += 1;
        heap.push(Interval {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Interval {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }
}

/// Integrate `f` over `[a, b]` after the substitution u = ln x, which
/// resolves power-law integrands spanning many decades. Requires `a > 0`.
/// `initial_points` in the options are understood in x and mapped to u.
pub fn integrate_log<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    opts: &QuadOptions,
) -> Result<QuadResult> {
    if b <= a {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
            subdivisions: 0,
            converged: true,
        });
    }
    if a <= 0.0 {
        return Err(Error::domain(format!(
            "log-transformed integration requires a positive lower limit, got {a:e}"
        )));
    }
    let mut log_opts = opts.clone();
    log_opts.initial_points = opts
        .initial_points
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p.ln())
        .collect();
    integrate(
        |u| {
            let x = u.exp();
            f(x) * x
        },
        a.ln(),
        b.ln(),
        &log_opts,
    )
}

/// Integrate choosing the plain or log-transformed variable automatically:
/// log when the range spans more than two decades and is positive.
pub fn integrate_auto<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    opts: &QuadOptions,
) -> Result<QuadResult> {
    if a > 0.0 && b / a > 100.0 {
        integrate_log(f, a, b, opts)
    } else {
        integrate(f, a, b, opts)
    }
}
