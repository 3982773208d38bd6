//! The smooth plateau window Φ and its oscillatory transform Φ̃.
//!
//! Φ(t) = r(U(t−1))·r(U(2−t)) with the mollifier quotient
//! r(t) = s(t)/(s(t)+s(1−t)), s(t) = exp(−1/t) for t > 0.  Then Φ vanishes
//! outside (1, 2), equals 1 on [1+1/U, 2−1/U], and |Φ^{(j)}| ≤ C_j·U^j with
//! C_j = max |r^{(j)}| independent of U.
//!
//! The transform Φ̃(ξ) = ∫ (cos 2πξx + sin 2πξx)·Φ(x) dx reduces, after
//! substituting into each edge, to the two universal Fourier integrals
//! ∫₀¹ r(t)·cos(θt) dt and ∫₀¹ r(t)·sin(θt) dt at θ = 2πξ/U, plus a closed
//! form over the plateau.  The edge integrals are evaluated by composite
//! Filon quadrature on a fixed node grid, which stays accurate for
//! arbitrarily large ξ where plain Simpson panels would have to chase the
//! oscillation.  Tail estimates use ∫|Φ^{(j)}| up to order 8, giving
//! |Φ̃(ξ)| ≤ √2·∫|Φ^{(j)}|/(2π|ξ|)^j; the constants are certified on a
//! dense grid at construction of the shared edge profile.

use std::sync::OnceLock;

use crate::jet::{Jet, JET_ORDER};
use crate::{Error, Result};

/// Highest derivative order exposed by [`SmoothWindow::derivative`].
pub const J_MAX: usize = 4;

const TAU: f64 = std::f64::consts::TAU;
const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Filon panels per edge (node count 2·N_PANELS + 1).
const N_PANELS: usize = 512;

/// Dense-grid resolution for the certified profile constants.
const CERT_GRID: usize = 1 << 15;

/// Safety margin applied to numerically certified suprema and variations.
const CERT_MARGIN: f64 = 1.02;

/// s(t) = exp(−1/t) for t > 0, else 0.
fn mollifier(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

/// Edge profile r(t) = s(t)/(s(t)+s(1−t)): 0 for t ≤ 0, 1 for t ≥ 1.
pub fn edge_profile(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let s = mollifier(t);
    let s1 = mollifier(1.0 - t);
    s / (s + s1)
}

/// Jet of the edge profile at t (zero/one jets outside the transition).
fn edge_profile_jet(t: f64) -> Jet {
    if t <= 0.0 {
        return Jet::zero();
    }
    if t >= 1.0 {
        return Jet::constant(1.0);
    }
    // exp(−1/t) underflows to zero below ~1/745; the quotient jet is then
    // identically zero like the function itself.
    if t < 2.0e-3 {
        return Jet::zero();
    }
    if t > 1.0 - 2.0e-3 {
        return Jet::constant(1.0);
    }
    let s = (Jet::var(t).recip() * Jet::constant(-1.0)).exp();
    let s1 = (Jet::affine(1.0 - t, -1.0).recip() * Jet::constant(-1.0)).exp();
    s / (s + s1)
}

/// U-independent constants of the edge profile, shared by every window.
struct EdgeData {
    /// Certified max |r^{(j)}| for j ≤ JET_ORDER.
    sup: [f64; JET_ORDER + 1],
    /// Certified ∫₀¹ |r^{(j)}| for j ≤ JET_ORDER.
    tv: [f64; JET_ORDER + 1],
    /// ∫₀¹ r.
    mass: f64,
}

static EDGE: OnceLock<EdgeData> = OnceLock::new();

fn edge_data() -> &'static EdgeData {
    EDGE.get_or_init(|| {
        let h = 1.0 / CERT_GRID as f64;
        let mut sup = [0.0f64; JET_ORDER + 1];
        let mut tv = [0.0f64; JET_ORDER + 1];
        let mut prev = edge_profile_jet(0.0);
        let mut mass = 0.0f64;
        for i in 1..=CERT_GRID {
            let t = i as f64 * h;
            let cur = edge_profile_jet(t);
            for j in 0..=JET_ORDER {
                let a = prev.derivative(j).abs();
                let b = cur.derivative(j).abs();
                sup[j] = sup[j].max(b);
                tv[j] += h * a.max(b);
            }
            mass += 0.5 * h * (prev.value() + cur.value());
            prev = cur;
        }
        for j in 0..=JET_ORDER {
            sup[j] *= CERT_MARGIN;
            tv[j] = tv[j] * CERT_MARGIN + 1e-12;
        }
        EdgeData { sup, tv, mass }
    })
}

/// Node grids for the edge Fourier integrals.  The grid keeps the per-panel
/// phase θ/(2·panels) at or below 1.5, clear of the Filon resonance at π
/// where the even/odd node split degenerates; measured error on the profile
/// is ≤ 3e−12 per integral in that regime.
const GRID_LEVELS: usize = 4;
static EDGE_GRIDS: [OnceLock<Vec<f64>>; GRID_LEVELS] = [
    OnceLock::new(),
    OnceLock::new(),
    OnceLock::new(),
    OnceLock::new(),
];

fn edge_nodes(level: usize) -> &'static [f64] {
    EDGE_GRIDS[level].get_or_init(|| {
        let panels = N_PANELS << (2 * level);
        (0..=2 * panels)
            .map(|i| edge_profile(i as f64 / (2 * panels) as f64))
            .collect()
    })
}

/// Largest |θ| the finest grid handles at per-panel phase ≤ 1.5.
#[cfg(test)]
fn theta_grid_limit() -> f64 {
    3.0 * (N_PANELS << (2 * (GRID_LEVELS - 1))) as f64
}

fn grid_for_theta(theta: f64) -> Option<&'static [f64]> {
    let need = theta.abs() / 3.0;
    let mut panels = N_PANELS;
    for level in 0..GRID_LEVELS {
        if need <= panels as f64 {
            return Some(edge_nodes(level));
        }
        panels <<= 2;
    }
    None
}

/// Plateau bump on (1, 2), parameterized by the edge steepness U.
#[derive(Debug, Clone, Copy)]
pub struct SmoothWindow {
    u: f64,
    /// C_j with |Φ^{(j)}(t)| ≤ C_j·U^j, j ≤ [`J_MAX`] (certified numerically).
    pub derivative_bound_consts: [f64; J_MAX + 1],
}

/// Build the window; requires U ≥ 4 so the plateau is nonempty.
pub fn make_window(u: f64) -> Result<SmoothWindow> {
    if u.is_nan() || u < 4.0 {
        return Err(Error::WindowTooNarrow(u));
    }
    let edge = edge_data();
    let mut consts = [0.0f64; J_MAX + 1];
    consts.copy_from_slice(&edge.sup[..=J_MAX]);
    Ok(SmoothWindow {
        u,
        derivative_bound_consts: consts,
    })
}

impl SmoothWindow {
    pub fn u(&self) -> f64 {
        self.u
    }

    /// Φ(t) = r(U(t−1))·r(U(2−t)).
    pub fn eval(&self, t: f64) -> f64 {
        edge_profile(self.u * (t - 1.0)) * edge_profile(self.u * (2.0 - t))
    }

    /// Φ^{(j)}(t) for j ≤ [`J_MAX`], by jet differentiation of the closed form.
    pub fn derivative(&self, t: f64, j: usize) -> Result<f64> {
        if j > J_MAX {
            return Err(Error::Domain("derivative order exceeds J_MAX"));
        }
        Ok(self.derivative_any(t, j))
    }

    fn derivative_any(&self, t: f64, j: usize) -> f64 {
        let left = scale_jet(edge_profile_jet(self.u * (t - 1.0)), self.u);
        let right = scale_jet(edge_profile_jet(self.u * (2.0 - t)), -self.u);
        (left * right).derivative(j)
    }

    /// ∫Φ = (plateau length) + 2·(edge mass)/U.
    pub fn mass(&self) -> f64 {
        1.0 - 2.0 / self.u + 2.0 * edge_data().mass / self.u
    }

    /// ∫ |Φ^{(j)}|: 2·U^{j−1}·∫|r^{(j)}| for j ≥ 1 and the mass for j = 0.
    pub fn total_variation(&self, j: usize) -> f64 {
        debug_assert!(j <= JET_ORDER);
        if j == 0 {
            self.mass()
        } else {
            2.0 * self.u.powi(j as i32 - 1) * edge_data().tv[j]
        }
    }

    /// Certified bound on |Φ̃(ξ)|: min over j of √2·∫|Φ^{(j)}|/(2π|ξ|)^j.
    pub fn tilde_bound(&self, xi: f64) -> f64 {
        let axi = xi.abs();
        let mut best = SQRT2 * self.mass();
        if axi > 0.0 {
            for j in 1..=JET_ORDER {
                best = best.min(SQRT2 * self.total_variation(j) / (TAU * axi).powi(j as i32));
            }
        }
        best
    }

    /// Certified bound on Σ_{m ≥ m_from} |Φ̃(m·step)| for one sign of m.
    pub fn tilde_tail_bound(&self, step: f64, m_from: f64) -> f64 {
        debug_assert!(step > 0.0 && m_from >= 1.0);
        let mut best = f64::INFINITY;
        for j in 2..=JET_ORDER {
            let b_j = SQRT2 * self.total_variation(j) / (TAU * step).powi(j as i32);
            // Σ_{m ≥ M} m^{−j} ≤ M^{1−j}/(j−1) + M^{−j}
            let tail =
                b_j * (m_from.powi(1 - j as i32) / (j as f64 - 1.0) + m_from.powi(-(j as i32)));
            best = best.min(tail);
        }
        best
    }

    /// Φ̃(ξ) = ∫ (cos 2πξx + sin 2πξx)·Φ(x) dx.
    pub fn tilde(&self, xi: f64) -> f64 {
        let u = self.u;
        let omega = TAU * xi;
        let theta = omega / u;
        let Some(nodes) = grid_for_theta(theta) else {
            // Past the finest grid the certified bound is far below any
            // tolerance in use; 0 is within it.
            debug_assert!(self.tilde_bound(xi) < 1e-20);
            return 0.0;
        };
        let (a_pl, b_pl) = (1.0 + 1.0 / u, 2.0 - 1.0 / u);
        let plateau = integral_cos_plus_sin(omega, a_pl, b_pl);
        let (cr, sr) = filon_cos_sin(nodes, theta);
        let (ca, sa) = ((omega).cos(), (omega).sin());
        let (cb, sb) = ((2.0 * omega).cos(), (2.0 * omega).sin());
        let edges = ((ca + sa + cb + sb) * cr + (ca - sa - cb + sb) * sr) / u;
        plateau + edges
    }
}

fn scale_jet(mut jet: Jet, slope: f64) -> Jet {
    // r(c + slope·t) as a jet in t from the jet of r at the inner point.
    let mut pow = 1.0;
    for k in 0..=JET_ORDER {
        jet.c[k] *= pow;
        pow *= slope;
    }
    jet
}

/// ∫_a^b (cos ωx + sin ωx) dx, stable through ω = 0.
fn integral_cos_plus_sin(omega: f64, a: f64, b: f64) -> f64 {
    if omega.abs() < 1e-3 {
        // Σ_k (−ω²)^k [(b−a)-type odd terms] + sin-part even terms.
        let mut total = 0.0;
        let mut pow_a = a;
        let mut pow_b = b;
        let mut fact = 1.0f64;
        let mut omega_pow = 1.0f64;
        for k in 1..=8u32 {
            // k-th antiderivative term: ω^{k−1}·(b^k − a^k)/k! with the
            // cos/sin alternation cos: +,0,−,0 and sin: 0,+,0,−.
            let coeff = match k % 4 {
                1 => 1.0,
                2 => 1.0,
                3 => -1.0,
                _ => -1.0,
            };
            total += coeff * omega_pow * (pow_b - pow_a) / (fact * k as f64);
            pow_a *= a;
            pow_b *= b;
            fact *= k as f64;
            omega_pow *= omega;
        }
        total
    } else {
        let anti = |x: f64| ((omega * x).sin() - (omega * x).cos()) / omega;
        anti(b) - anti(a)
    }
}

/// Filon coefficients (α, β, γ) at θ = frequency × panel half-width.
fn filon_coeffs(theta: f64) -> (f64, f64, f64) {
    let t = theta;
    if t.abs() < 0.04 {
        let t2 = t * t;
        let alpha = t * t2 * (2.0 / 45.0 + t2 * (-2.0 / 315.0 + t2 * (2.0 / 4725.0)));
        let beta = 2.0 / 3.0 + t2 * (2.0 / 15.0 + t2 * (-4.0 / 105.0 + t2 * (2.0 / 567.0)));
        let gamma = 4.0 / 3.0 + t2 * (-2.0 / 15.0 + t2 * (1.0 / 210.0 + t2 * (-1.0 / 11340.0)));
        (alpha, beta, gamma)
    } else {
        let (s, c) = t.sin_cos();
        let t2 = t * t;
        let t3 = t2 * t;
        let alpha = 1.0 / t + s * c / t2 - 2.0 * s * s / t3;
        let beta = 2.0 * ((1.0 + c * c) / t2 - 2.0 * s * c / t3);
        let gamma = 4.0 * (s / t3 - c / t2);
        (alpha, beta, gamma)
    }
}

/// (∫₀¹ f cos(θt) dt, ∫₀¹ f sin(θt) dt) by composite Filon–Simpson over the
/// tabulated nodes; exact trig via one rotation recurrence per node.
fn filon_cos_sin(nodes: &[f64], theta: f64) -> (f64, f64) {
    let two_n = nodes.len() - 1;
    let h = 1.0 / two_n as f64;
    let (alpha, beta, gamma) = filon_coeffs(theta * h);

    let (sd, cd) = (theta * h).sin_cos();
    let mut c = 1.0f64;
    let mut s = 0.0f64;
    let (mut ce, mut co, mut se, mut so) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (i, &f) in nodes.iter().enumerate() {
        if i % 2 == 0 {
            ce += f * c;
            se += f * s;
        } else {
            co += f * c;
            so += f * s;
        }
        let c2 = c * cd - s * sd;
        s = s * cd + c * sd;
        c = c2;
    }
    let (s_end, c_end) = theta.sin_cos();
    let f0 = nodes[0];
    let f1 = nodes[two_n];
    ce -= 0.5 * (f0 + f1 * c_end);
    se -= 0.5 * (f1 * s_end);
    let fc = h * (alpha * (f1 * s_end) + beta * ce + gamma * co);
    let fs = h * (alpha * (f0 - f1 * c_end) + beta * se + gamma * so);
    (fc, fs)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Gauss–Legendre 10-point panel oracle, with panel count scaled to the
    /// oscillation so it stays trustworthy at every tested frequency.
    fn oracle_tilde(w: &SmoothWindow, xi: f64) -> f64 {
        gauss_legendre_tilde(w, xi, (64.0 + 8.0 * xi.abs()) as usize)
    }

    fn gauss_legendre_tilde(w: &SmoothWindow, xi: f64, panels: usize) -> f64 {
        const GL_X: [f64; 5] = [
            0.1488743389816312,
            0.4333953941292472,
            0.6794095682990244,
            0.8650633666889845,
            0.9739065285171717,
        ];
        const GL_W: [f64; 5] = [
            0.2955242247147529,
            0.2692667193099963,
            0.219_086_362_515_982,
            0.1494513491505806,
            0.0666713443086881,
        ];
        let mut total = 0.0;
        let h = 1.0 / panels as f64;
        for i in 0..panels {
            let a = 1.0 + i as f64 * h;
            let b = a + h;
            let mid = 0.5 * (a + b);
            let half = 0.5 * (b - a);
            for k in 0..5 {
                for sign in [-1.0, 1.0] {
                    let x = mid + sign * half * GL_X[k];
                    let phase = TAU * xi * x;
                    total += half * GL_W[k] * w.eval(x) * (phase.cos() + phase.sin());
                }
            }
        }
        total
    }

    #[test]
    fn rejects_narrow_window() {
        assert!(make_window(3.9).is_err());
        assert!(make_window(f64::NAN).is_err());
    }

    #[test]
    fn plateau_support_and_half_height() {
        for u in [4.0f64, 8.0, 32.0, 128.0] {
            let w = make_window(u).unwrap();
            assert_eq!(w.eval(1.5), 1.0, "plateau value");
            assert_eq!(w.eval(1.0 + 1.0 / u), 1.0, "plateau edge");
            assert_eq!(w.eval(2.0 - 1.0 / u), 1.0);
            assert_eq!(w.eval(1.0), 0.0);
            assert_eq!(w.eval(2.0), 0.0);
            assert_eq!(w.eval(0.5), 0.0);
            assert_eq!(w.eval(2.5), 0.0);
            // Midpoint of the left transition: r(1/2) = 1/2 exactly.
            let half = w.eval(1.0 + 0.5 / u);
            assert!((half - 0.5).abs() < 1e-14, "u={u}: {half}");
            for t in [1.1f64, 1.33, 1.8, 1.97] {
                let v = w.eval(t);
                assert!((0.0..=1.0).contains(&v));
            }
        }
    }

    #[test]
    fn edge_profile_slope_is_two_at_center() {
        // r'(1/2) = 2 analytically (the denominator is flat there).
        let j = edge_profile_jet(0.5);
        assert!((j.value() - 0.5).abs() < 1e-14);
        assert!((j.derivative(1) - 2.0).abs() < 1e-10);
    }

    #[test]
    fn derivative_bounds_scale_like_u_powers() {
        // max |Φ^{(j)}|/U^j over a dense grid stays below the certified C_j
        // for every U, because the profile constants are U-independent.
        for u in [8.0f64, 32.0, 128.0] {
            let w = make_window(u).unwrap();
            for j in 0..=J_MAX {
                let c_j = w.derivative_bound_consts[j];
                let mut worst: f64 = 0.0;
                for i in 0..=4000 {
                    let t = 1.0 + i as f64 / 4000.0;
                    worst = worst.max(w.derivative(t, j).unwrap().abs() / u.powi(j as i32));
                }
                assert!(
                    worst <= c_j,
                    "u={u} j={j}: grid max {worst} exceeds certified {c_j}"
                );
                assert!(c_j.is_finite() && c_j > 0.0);
            }
        }
    }

    #[test]
    fn derivative_zero_order_is_value() {
        let w = make_window(8.0).unwrap();
        for t in [1.02f64, 1.2, 1.5, 1.93] {
            assert!((w.derivative(t, 0).unwrap() - w.eval(t)).abs() < 1e-13);
        }
        assert!(w.derivative(1.5, 5).is_err());
    }

    #[test]
    fn mass_brackets() {
        // 1 − 2/U ≤ ∫Φ ≤ 1, and Φ̃(0) = ∫Φ.
        for u in [4.0f64, 8.0, 64.0] {
            let w = make_window(u).unwrap();
            let m = w.mass();
            assert!(m >= 1.0 - 2.0 / u - 1e-12 && m <= 1.0 + 1e-12, "u={u}: {m}");
            assert!((w.tilde(0.0) - m).abs() < 1e-10);
        }
    }

    #[test]
    fn tilde_matches_gauss_legendre_oracle() {
        for (u, xi) in [
            (8.0f64, 0.0f64),
            (8.0, 1.0),
            (8.0, -1.0),
            (8.0, 0.37),
            (8.0, 5.5),
            (32.0, 1.0),
            (32.0, 30.0),
            (128.0, 12.25),
            (8.0, 300.0),
        ] {
            let w = make_window(u).unwrap();
            let fast = w.tilde(xi);
            let slow = oracle_tilde(&w, xi);
            assert!(
                (fast - slow).abs() < 1e-8,
                "u={u} xi={xi}: filon {fast} vs oracle {slow}"
            );
        }
    }

    #[test]
    fn tilde_decay_and_bounds() {
        let w = make_window(8.0).unwrap();
        for xi in [0.5f64, 1.0, 3.0, 10.0, 100.0, 1000.0, 1e6] {
            let v = w.tilde(xi).abs();
            let b = w.tilde_bound(xi);
            assert!(v <= b + 1e-9, "xi={xi}: |Φ̃|={v} bound={b}");
            // |ξ·Φ̃(ξ)| stays bounded.
            assert!(xi * v <= SQRT2 * w.total_variation(1) / TAU + 1e-6);
        }
    }

    #[test]
    fn tilde_tail_bound_dominates_sampled_tail() {
        let w = make_window(8.0).unwrap();
        let step = 0.7;
        let from = 40.0;
        let mut sampled = 0.0;
        for m in 40..4000 {
            sampled += w.tilde(m as f64 * step).abs();
        }
        assert!(sampled <= w.tilde_tail_bound(step, from));
    }

    #[test]
    fn filon_engine_on_polynomial_against_exact_moments() {
        // f(t) = t: ∫₀¹ t cos θt dt = (cos θ + θ sin θ − 1)/θ²,
        //          ∫₀¹ t sin θt dt = (sin θ − θ cos θ)/θ².
        let nodes: Vec<f64> = (0..=1024).map(|i| i as f64 / 1024.0).collect();
        for theta in [0.01f64, 0.5, 3.0, 50.0, 999.0, 20_000.0] {
            let (fc, fs) = filon_cos_sin(&nodes, theta);
            let exact_c = (theta.cos() + theta * theta.sin() - 1.0) / (theta * theta);
            let exact_s = (theta.sin() - theta * theta.cos()) / (theta * theta);
            assert!(
                (fc - exact_c).abs() < 1e-10,
                "theta={theta}: {fc} vs {exact_c}"
            );
            assert!(
                (fs - exact_s).abs() < 1e-10,
                "theta={theta}: {fs} vs {exact_s}"
            );
        }
    }

    #[test]
    fn filon_self_consistency_on_refinement() {
        // Each grid level against a 4x-refined reference, inside the phase
        // range the ladder routes to it.
        let fine: Vec<f64> = (0..=16384)
            .map(|i| edge_profile(i as f64 / 16384.0))
            .collect();
        for theta in [0.0f64, 2.0, 77.7, 900.0, 1500.0, 3141.6, 6000.0] {
            let nodes = grid_for_theta(theta).unwrap();
            let (c1, s1) = filon_cos_sin(nodes, theta);
            let (c2, s2) = filon_cos_sin(&fine, theta);
            assert!((c1 - c2).abs() < 1e-11, "theta={theta}: {c1} vs {c2}");
            assert!((s1 - s2).abs() < 1e-11, "theta={theta}: {s1} vs {s2}");
        }
    }

    #[test]
    fn grid_ladder_covers_resonance_and_cuts_off() {
        // θ near π·panels sat on the Filon resonance of the base grid; the
        // ladder must route it to a finer grid.
        assert_eq!(
            grid_for_theta(3200.0).unwrap().len(),
            2 * (N_PANELS << 2) + 1
        );
        assert!(grid_for_theta(theta_grid_limit()).is_some());
        assert!(grid_for_theta(theta_grid_limit() * 1.01).is_none());
        // Beyond the ladder the transform is certified below 1e−20.
        let w = make_window(8.0).unwrap();
        let xi = theta_grid_limit() * 1.5 * w.u() / TAU;
        assert_eq!(w.tilde(xi), 0.0);
        assert!(w.tilde_bound(xi) < 1e-20);
    }
}
