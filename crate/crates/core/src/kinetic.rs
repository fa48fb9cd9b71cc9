//! Explicit solution of the limiting kinetic equations.
//!
//! The removal rate solves the renewal equation
//! `a(t) = f1bar(t) + (a * f2hat)(t)` with `f2hat = f2bar / N2(0)`, and is
//! computed as the truncated series of self-convolutions
//! `a = Σ_j (f2hat)^{*(j)} * f1bar`. The truncation depth is chosen a priori
//! from the geometric tail bound `e^{t_max} ρ^{K+1} / (1-ρ) · sup f1bar` with
//! `ρ = ∫ e^{-x} f2hat(x) dx < 1`. Everything downstream (total loss, N2,
//! the species densities, the blow-up time) is derived from that series.

use crate::error::{Error, Result};
use crate::measures::GridDensity;
use rustfft::{num_complex::Complex, FftPlanner};

/// Hard cap on the series depth; reached only for kernels within a whisker
/// of the degenerate-mass-at-zero case.
const MAX_SERIES_TERMS: usize = 1_000_000;

fn require_equal_steps(f: &GridDensity, g: &GridDensity) -> Result<f64> {
    if f.step() != g.step() {
        return Err(Error::Config(format!(
            "convolution inputs must share a grid step, got {} and {}",
            f.step(),
            g.step()
        )));
    }
    Ok(f.step())
}

/// Trapezoid weights: interior terms full, the two endpoints halved.
/// `out[i] = h * Σ_{j=0..=i} w_j f[i-j] g[j]`, with `out[0] = 0`.
fn convolve_raw(f: &[f64], g: &[f64], h: f64, n_out: usize) -> Vec<f64> {
    let mut out = vec![0.0; n_out];
    for (i, slot) in out.iter_mut().enumerate().skip(1) {
        let j_lo = i.saturating_sub(f.len() - 1);
        let j_hi = i.min(g.len() - 1);
        if j_lo > j_hi {
            continue;
        }
        let mut acc = 0.0;
        for j in j_lo..=j_hi {
            acc += f[i - j] * g[j];
        }
        // Halve the endpoint contributions that the plain sum counted fully.
        if j_lo == 0 {
            acc -= 0.5 * f[i] * g[0];
        }
        if j_hi == i {
            acc -= 0.5 * f[0] * g[i];
        }
        *slot = h * acc;
    }
    out
}

/// Causal trapezoid convolution `(f*g)(t) = ∫_0^t f(t-s) g(s) ds` on the
/// shared grid; the output extends over the full support of the product.
pub fn convolve(f: &GridDensity, g: &GridDensity) -> Result<GridDensity> {
    let h = require_equal_steps(f, g)?;
    let n_out = f.len() + g.len() - 1;
    let vals = convolve_raw(f.values(), g.values(), h, n_out);
    GridDensity::new(h, vals.into_iter().map(|v| v.max(0.0)).collect())
}

/// FFT-backed variant of [`convolve`]; agrees with the direct path to
/// 1e-10 on bounded inputs and exists as the fast option for long grids.
pub fn convolve_fft(f: &GridDensity, g: &GridDensity) -> Result<GridDensity> {
    let h = require_equal_steps(f, g)?;
    let n_out = f.len() + g.len() - 1;
    let size = n_out.next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(size);
    let ifft = planner.plan_fft_inverse(size);

    let mut fa: Vec<Complex<f64>> = f
        .values()
        .iter()
        .map(|&v| Complex::new(v, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(size)
        .collect();
    let mut gb: Vec<Complex<f64>> = g
        .values()
        .iter()
        .map(|&v| Complex::new(v, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(size)
        .collect();
    fft.process(&mut fa);
    fft.process(&mut gb);
    for (a, b) in fa.iter_mut().zip(gb.iter()) {
        *a *= *b;
    }
    ifft.process(&mut fa);

    let scale = h / size as f64;
    let fv = f.values();
    let gv = g.values();
    let vals: Vec<f64> = (0..n_out)
        .map(|i| {
            if i == 0 {
                return 0.0;
            }
            let mut v = fa[i].re * scale;
            // Endpoint corrections turn the circular full sum into the
            // trapezoid rule.
            if i < fv.len() {
                v -= 0.5 * h * fv[i] * gv[0];
            }
            if i < gv.len() {
                v -= 0.5 * h * fv[0] * gv[i];
            }
            v.max(0.0)
        })
        .collect();
    GridDensity::new(h, vals)
}

/// Composite Simpson evaluation of `∫_0^{t_i} f(t_i - s) g(s) ds` for every
/// grid index, falling back to a 3/8 panel on odd tails. Used as the
/// independent quadrature inside [`KineticSolution::renewal_residual`]; with
/// the trapezoid rule the residual would telescope to the series tail and
/// hide quadrature error entirely.
fn convolve_simpson(f: &[f64], g: &[f64], h: f64, n_out: usize) -> Vec<f64> {
    let fv = |idx: usize| if idx < f.len() { f[idx] } else { 0.0 };
    let gv = |idx: usize| if idx < g.len() { g[idx] } else { 0.0 };
    let mut out = vec![0.0; n_out];
    for (i, slot) in out.iter_mut().enumerate().skip(1) {
        let term = |j: usize| fv(i - j) * gv(j);
        let mut acc = 0.0;
        if i == 1 {
            acc = 0.5 * (term(0) + term(1));
        } else {
            // Even prefix handled by Simpson panels, odd remainder by 3/8.
            let m = if i % 2 == 0 { i } else { i - 3 };
            if m >= 2 {
                let mut s = term(0) + term(m);
                let mut j = 1;
                while j < m {
                    s += 4.0 * term(j);
                    if j + 1 < m {
                        s += 2.0 * term(j + 1);
                    }
                    j += 2;
                }
                acc += s / 3.0;
            }
            if i % 2 == 1 {
                let b = i - 3;
                acc += 0.375 * (term(b) + 3.0 * term(b + 1) + 3.0 * term(b + 2) + term(i));
            }
        }
        *slot = h * acc;
    }
    out
}

/// `ρ = ∫ e^{-x} f2hat(x) dx`, the geometric ratio of the series tail.
fn kernel_contraction(f2hat: &GridDensity) -> f64 {
    let h = f2hat.step();
    let n = f2hat.len();
    let mut acc = 0.0;
    for (i, &v) in f2hat.values().iter().enumerate() {
        let w = if i == 0 || i + 1 == n { 0.5 } else { 1.0 };
        acc += w * (-(i as f64) * h).exp() * v;
    }
    acc * h
}

/// Removal rate `a(t)` on `[0, t_max]` as the truncated renewal series.
///
/// `f2hat` must be a probability density (mass `1 ± 1e-8`). The series is
/// truncated at the first `K` with
/// `e^{t_max} ρ^{K+1} / (1-ρ) · sup f1bar < tol`; the `j = 0` term is
/// `f1bar` itself.
pub fn renewal_density(
    f1bar: &GridDensity,
    f2hat: &GridDensity,
    t_max: f64,
    tol: f64,
) -> Result<GridDensity> {
    let h = require_equal_steps(f1bar, f2hat)?;
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::Domain(format!(
            "series tolerance must be positive, got {tol}"
        )));
    }
    if !t_max.is_finite() || t_max <= 0.0 {
        return Err(Error::Domain(format!(
            "t_max must be positive, got {t_max}"
        )));
    }
    if (f2hat.mass() - 1.0).abs() > 1e-8 {
        return Err(Error::Config(format!(
            "renewal kernel must have unit mass, got {}",
            f2hat.mass()
        )));
    }
    let rho = kernel_contraction(f2hat);
    if rho >= 1.0 - 1e-12 {
        return Err(Error::Degenerate(format!(
            "renewal kernel mass concentrates at the origin (rho = {rho})"
        )));
    }

    let n_out = (t_max / h).ceil() as usize + 1;
    let sup_f1 = f1bar.max_value();
    let mut acc: Vec<f64> = (0..n_out)
        .map(|i| f1bar.values().get(i).copied().unwrap_or(0.0))
        .collect();
    if sup_f1 == 0.0 {
        return GridDensity::new(h, acc);
    }

    // Smallest K with e^{t_max} rho^{K+1} / (1-rho) * sup_f1 < tol.
    let rhs = tol * (1.0 - rho) / (t_max.exp() * sup_f1);
    let k_terms = if rhs >= rho {
        1
    } else {
        (rhs.ln() / rho.ln()).ceil() as usize
    };
    if k_terms > MAX_SERIES_TERMS {
        return Err(Error::Degenerate(format!(
            "series needs {k_terms} terms; kernel is too close to degenerate"
        )));
    }

    let kernel = f2hat.values();
    let mut current = acc.clone();
    for _ in 0..k_terms {
        current = convolve_raw(&current, kernel, h, n_out);
        for (a, c) in acc.iter_mut().zip(current.iter()) {
            *a += c;
        }
    }
    GridDensity::new(h, acc.into_iter().map(|v| v.max(0.0)).collect())
}

/// Running trapezoid integral `L(t) = ∫_0^t a(s) ds`; nondecreasing with
/// `L(0) = 0`.
pub fn total_loss(a: &GridDensity) -> GridDensity {
    let h = a.step();
    let v = a.values();
    let mut out = Vec::with_capacity(v.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in v.windows(2) {
        acc += h * 0.5 * (w[0] + w[1]);
        out.push(acc);
    }
    GridDensity::new(h, out).expect("loss values are nonnegative by construction")
}

/// Bundled explicit solution: removal rate, total loss, species-2 bookkeeping
/// and evaluators for both species densities.
#[derive(Debug, Clone)]
pub struct KineticSolution {
    a: GridDensity,
    loss: GridDensity,
    f1bar: GridDensity,
    f2bar: GridDensity,
    f2hat: GridDensity,
    n2_zero: f64,
    n2_floor: f64,
    horizon: f64,
    tol: f64,
}

impl KineticSolution {
    /// Solves on `[0, t_max]` with series tolerance `tol`. The stored grids
    /// are truncated at the first node where `N2 <= n2_floor`
    /// (`n2_floor = 1e-3 * N2(0)` when `None`), and the evaluators are valid
    /// strictly before the resulting horizon.
    pub fn solve(
        f1bar: &GridDensity,
        f2bar: &GridDensity,
        t_max: f64,
        tol: f64,
        n2_floor: Option<f64>,
    ) -> Result<Self> {
        require_equal_steps(f1bar, f2bar)?;
        let n2_zero = f2bar.mass();
        if n2_zero <= 0.0 {
            return Err(Error::Degenerate(
                "species 2 must carry positive initial mass".into(),
            ));
        }
        let n2_floor = n2_floor.unwrap_or(1e-3 * n2_zero);
        if !(0.0..n2_zero).contains(&n2_floor) {
            return Err(Error::Domain(format!(
                "n2_floor {n2_floor} must lie in [0, N2(0) = {n2_zero})"
            )));
        }
        let f2hat = f2bar.scaled(1.0 / n2_zero)?;
        let a = renewal_density(f1bar, &f2hat, t_max, tol)?;
        let loss = total_loss(&a);

        // Cap the grids at the first node where N2 dips to the floor.
        let cap = loss
            .values()
            .iter()
            .position(|&l| n2_zero - l <= n2_floor)
            .unwrap_or(loss.len());
        let keep = cap.min(loss.len() - 1) + 1;
        let h = a.step();
        let a = GridDensity::new(h, a.values()[..keep].to_vec())?;
        let loss_vals = loss.values()[..keep].to_vec();
        let n2_end = n2_zero - loss_vals.last().unwrap();
        let loss = GridDensity::new(h, loss_vals)?;

        let horizon = if n2_end <= n2_floor {
            // Interpolate the crossing inside the last grid cell.
            let i = loss.len() - 1;
            let prev = n2_zero - loss.values()[i - 1];
            let t_prev = (i - 1) as f64 * h;
            t_prev + h * (prev - n2_floor) / (prev - n2_end)
        } else {
            loss.support_bound()
        };

        Ok(Self {
            a,
            loss,
            f1bar: f1bar.clone(),
            f2bar: f2bar.clone(),
            f2hat,
            n2_zero,
            n2_floor,
            horizon,
            tol,
        })
    }

    pub fn removal_rate(&self) -> &GridDensity {
        &self.a
    }

    pub fn loss(&self) -> &GridDensity {
        &self.loss
    }

    pub fn initial(&self) -> (&GridDensity, &GridDensity) {
        (&self.f1bar, &self.f2bar)
    }

    pub fn n2_zero(&self) -> f64 {
        self.n2_zero
    }

    pub fn n2_floor(&self) -> f64 {
        self.n2_floor
    }

    /// Largest time at which the evaluators remain valid.
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    fn loss_at(&self, t: f64) -> f64 {
        let h = self.loss.step();
        let end = self.loss.support_bound();
        if t <= 0.0 {
            return 0.0;
        }
        if t >= end {
            return *self.loss.values().last().unwrap();
        }
        let pos = t / h;
        let i = (pos.floor() as usize).min(self.loss.len() - 2);
        let frac = pos - i as f64;
        self.loss.values()[i] * (1.0 - frac) + self.loss.values()[i + 1] * frac
    }

    /// `N2(t) = N2(0) - L(t)`, linearly interpolated between grid nodes.
    pub fn n2_at(&self, t: f64) -> f64 {
        self.n2_zero - self.loss_at(t)
    }

    /// First time at which `N2` reaches `floor`, linearly interpolated;
    /// returns the end of the stored grid when never reached.
    pub fn blowup_time(&self, floor: f64) -> f64 {
        let h = self.loss.step();
        let vals = self.loss.values();
        if self.n2_zero - vals[0] <= floor {
            return 0.0;
        }
        for i in 1..vals.len() {
            let n2 = self.n2_zero - vals[i];
            if n2 <= floor {
                let prev = self.n2_zero - vals[i - 1];
                return (i - 1) as f64 * h + h * (prev - floor) / (prev - n2);
            }
        }
        self.loss.support_bound()
    }

    fn check_horizon(&self, t: f64) -> Result<()> {
        if !t.is_finite() || t < 0.0 || t >= self.horizon {
            return Err(Error::OutOfHorizon {
                t,
                horizon: self.horizon,
            });
        }
        Ok(())
    }

    /// `f2(x, t) = N2(t)/N2(0) * f2bar(x)`: the species-2 profile only ever
    /// rescales.
    pub fn f2_eval(&self, t: f64) -> Result<GridDensity> {
        self.check_horizon(t)?;
        self.f2bar.scaled(self.n2_at(t) / self.n2_zero)
    }

    /// `f1(x, t) = f1bar(x + t) + ∫_0^t f2hat(x + t - s) a(s) ds`, evaluated
    /// by trapezoid on the shared grid (with an endpoint correction when `t`
    /// falls between nodes).
    pub fn f1_eval(&self, t: f64) -> Result<GridDensity> {
        self.check_horizon(t)?;
        let h = self.f1bar.step();
        let n_x = self.f1bar.len().max(self.f2bar.len());
        let a = self.a.values();
        let j_full = ((t / h) + 1e-12).floor() as usize;
        let j_full = j_full.min(a.len() - 1);
        let t_full = j_full as f64 * h;
        let a_at_t = self.a.eval(t.min(self.a.support_bound()));

        let values = (0..n_x)
            .map(|ix| {
                let x = ix as f64 * h;
                let mut v = self.f1bar.eval(x + t);
                if j_full > 0 {
                    let mut acc = 0.0;
                    for (j, &aj) in a.iter().enumerate().take(j_full + 1) {
                        let w = if j == 0 || j == j_full { 0.5 } else { 1.0 };
                        acc += w * self.f2hat.eval(x + t - j as f64 * h) * aj;
                    }
                    v += h * acc;
                }
                if t > t_full {
                    // Partial last interval [t_full, t].
                    let d = t - t_full;
                    v += 0.5
                        * d
                        * (self.f2hat.eval(x + t - t_full) * a[j_full]
                            + self.f2hat.eval(x) * a_at_t);
                }
                v.max(0.0)
            })
            .collect();
        GridDensity::new(h, values)
    }

    /// Max over grid times `t <= horizon` of
    /// `|a(t) - f1bar(t) - (a * f2hat)(t)|`, with the convolution evaluated
    /// by Simpson quadrature so the check is independent of the series path.
    pub fn renewal_residual(&self) -> f64 {
        let h = self.a.step();
        let conv = convolve_simpson(self.a.values(), self.f2hat.values(), h, self.a.len());
        let mut worst = 0.0f64;
        for (i, (&ai, ci)) in self.a.values().iter().zip(conv.iter()).enumerate() {
            let t = i as f64 * h;
            if t > self.horizon {
                break;
            }
            let f1 = self.f1bar.values().get(i).copied().unwrap_or(0.0);
            worst = worst.max((ai - f1 - ci).abs());
        }
        worst
    }
}
