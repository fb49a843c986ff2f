use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::calogero::ParticleState;
use crate::error::{Error, Result};
use crate::fields::{Dual, Expr, Jet, Polynomial, Scalar, NAN};
use crate::fpcore::{LaxPoint, LaxSlice};

type C = Complex64;
type Poly = Polynomial<C>;

/// Relative division remainder above which `L₋`/`B₋` are not polynomial.
pub const POLYNOMIALITY_TOLERANCE: f64 = 1e-6;
/// Relative tolerance of the `B_d` consistency certificate.
const BD_TOLERANCE: f64 = 1e-8;

/// Gauge function `φ(t)` of `L₊ = φ Π (x - Q_k)`; only `φ` and `φ'/φ` enter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BuilderConfig {
    pub phi: Expr,
}

impl Default for BuilderConfig {
    fn default() -> Self {
        Self { phi: Expr::constant(1.0) }
    }
}

/// `φ`, `ψ = φ'/φ` and `ψ'` at one time.
#[derive(Clone, Copy, Debug)]
struct PhiValues {
    phi: C,
    psi: C,
    psi_dot: C,
}

impl BuilderConfig {
    pub fn with_phi(src: &str) -> Result<Self> {
        let cfg = Self { phi: Expr::parse(src)? };
        let j = cfg.phi.jet(0.3, 0.0);
        if j.x.norm() != 0.0 || cfg.phi.jet(0.3, 1.7).v != j.v {
            return Err(Error::InvalidInput(format!("phi must depend on t only, got {src:?}")));
        }
        Ok(cfg)
    }

    fn phi_at(&self, t: f64) -> Result<PhiValues> {
        let j = self.phi.jet(t, 0.0);
        if !(j.v.norm() > 0.0) || !j.v.is_finite() {
            return Err(Error::InvalidInput(format!("phi vanishes at t={t}")));
        }
        let psi = j.t / j.v;
        Ok(PhiValues { phi: j.v, psi, psi_dot: j.tt / j.v - psi * psi })
    }
}

fn coulomb<T: Scalar>(q: &[T]) -> Vec<T> {
    (0..q.len())
        .map(|k| {
            let mut r = T::zero();
            for j in (0..q.len()).filter(|&j| j != k) {
                r += T::one() / (q[k] - q[j]);
            }
            r
        })
        .collect()
}

/// `ℓ_k(x) = Π_{j≠k} (x - Q_j)/(Q_k - Q_j)`.
fn lagrange_basis<T: Scalar>(q: &[T]) -> Vec<Polynomial<T>> {
    (0..q.len())
        .map(|k| {
            let others: Vec<T> = (0..q.len()).filter(|&j| j != k).map(|j| q[j]).collect();
            let mut den = T::one();
            for &o in &others {
                den *= q[k] - o;
            }
            Polynomial::from_roots(&others).scale(T::one() / den)
        })
        .collect()
}

/// `L_d = -Σ_k (P_k - 2R_k) ℓ_k(x)`.
fn ld_generic<T: Scalar>(q: &[T], p: &[T]) -> Polynomial<T> {
    let r = coulomb(q);
    lagrange_basis(q)
        .iter()
        .enumerate()
        .fold(Polynomial::zero(), |acc, (k, l)| acc - l.scale(p[k] - r[k] * T::from_f64(2.0)))
}

/// `κB_d = κψ + Σ_k y_k (D(x) - D(Q_k))/((x - Q_k) D(Q_k))` with
/// `y_k = P_k - 2R_k`, `D = (Π (x - Q_j))'`. Each pole is cancelled by an
/// exact synthetic division; the largest relative remainder is returned.
fn kappa_bd_generic<T: Scalar>(q: &[T], p: &[T], psi: T, kappa: f64) -> (Polynomial<T>, f64) {
    let r = coulomb(q);
    let d = Polynomial::from_roots(q).derivative();
    let mut acc = Polynomial::constant(psi * T::from_f64(kappa));
    let mut worst = 0.0_f64;
    for k in 0..q.len() {
        let dk = d.eval(q[k]);
        let num = &d - &Polynomial::constant(dk);
        let lin = Polynomial::from_roots(&[q[k]]);
        let (quot, rem) = num.div_rem(&lin).expect("linear divisor");
        worst = worst.max(rem.norm_inf() / num.norm_inf().max(f64::MIN_POSITIVE));
        acc = acc + quot.scale((p[k] - r[k] * T::from_f64(2.0)) / dk);
    }
    (acc, worst)
}

/// `V = -(x⁴/2 - t x² + (κ-2) x - U + κψ)`.
fn vpart_generic<T: Scalar>(t: T, u: T, psi: T, kappa: f64) -> Polynomial<T> {
    let f = T::from_f64;
    Polynomial::new(vec![u - psi * f(kappa), -f(kappa - 2.0), t, T::zero(), f(-0.5)])
}

fn relative(rem: &Poly, num: &Poly) -> f64 {
    if rem.is_zero() {
        0.0
    } else {
        rem.norm_inf() / num.norm_inf()
    }
}

/// `L₊ = φ Π (x - Q_k)` and `B₊ = -∂ₓL₊/κ`.
pub fn build_lplus(s: &ParticleState, cfg: &BuilderConfig) -> Result<(Poly, Poly)> {
    s.validate()?;
    let ph = cfg.phi_at(s.t)?;
    let lp = Polynomial::from_roots(&s.q).scale(ph.phi);
    let bp = lp.derivative().scale(C::new(-1.0 / s.kappa_f(), 0.0));
    Ok((lp, bp))
}

/// `L_d`, the Lagrange interpolant with `L_d(Q_k) = -(P_k - 2R_k)`.
pub fn build_ld(s: &ParticleState, _cfg: &BuilderConfig) -> Result<Poly> {
    s.validate()?;
    Ok(ld_generic(&s.q, &s.p))
}

fn dual_inputs(s: &ParticleState) -> Result<(Vec<Dual>, Vec<Dual>, Dual)> {
    let rates = s.eom_rhs()?;
    let q = s.q.iter().zip(&rates.qdot).map(|(&v, &d)| Dual::new(v, d)).collect();
    let p = s.p.iter().zip(&rates.pdot).map(|(&v, &d)| Dual::new(v, d)).collect();
    Ok((q, p, Dual::new(s.u, rates.udot)))
}

/// `∂_t L_d` by the chain rule through the Lagrange coefficients along the
/// equations of motion.
pub fn build_ld_rate(s: &ParticleState) -> Result<Poly> {
    let (q, p, _) = dual_inputs(s)?;
    Ok(ld_generic(&q, &p).rate_part())
}

/// `B_d` from its Lagrange-basis form, certified against the independent
/// expression `(κ∂_tL₊ + ∂ₓₓL₊ - ∂ₓL₊·L_d)/L₊`.
pub fn build_bd(s: &ParticleState, cfg: &BuilderConfig) -> Result<Poly> {
    s.validate()?;
    let ph = cfg.phi_at(s.t)?;
    let kap = s.kappa_f();
    let (kbd, pole_rem) = kappa_bd_generic(&s.q, &s.p, ph.psi, kap);
    let (q, _, _) = dual_inputs(s)?;
    let phi = Dual::new(ph.phi, ph.phi * ph.psi);
    let lp_dual = Polynomial::from_roots(&q).scale(phi);
    let lp = lp_dual.value_part();
    let lpx = lp.derivative();
    let ld = ld_generic(&s.q, &s.p);
    let num = &(&lp_dual.rate_part().scale(C::new(kap, 0.0)) + &lpx.derivative()) - &(&lpx * &ld);
    let (quot, rem) = num.div_rem(&lp)?;
    let scale = num.norm_inf().max(kbd.norm_inf() * lp.norm_inf()).max(f64::MIN_POSITIVE);
    let relative = pole_rem.max(rem.norm_inf() / scale).max((&quot - &kbd).norm_inf() / kbd.norm_inf().max(1.0));
    if relative > BD_TOLERANCE {
        return Err(Error::BdNotPolynomial { relative });
    }
    Ok(kbd.scale(C::new(1.0 / kap, 0.0)))
}

/// `V = -(x⁴/2 - t x² + (κ-2) x - U + κφ'/φ)`.
pub fn build_vpart(s: &ParticleState, cfg: &BuilderConfig) -> Result<Poly> {
    let ph = cfg.phi_at(s.t)?;
    Ok(vpart_generic(C::new(s.t, 0.0), s.u, ph.psi, s.kappa_f()))
}

/// Relative division remainders of the polynomiality certificates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Remainders {
    pub l_minus: f64,
    pub b_minus: f64,
}

/// The assembled pair at one time, with the time rates needed for the
/// zero-curvature equations.
#[derive(Clone, Debug, PartialEq)]
pub struct PIILaxResult {
    pub t: f64,
    pub kappa: usize,
    pub l1: Poly,
    pub l2: Poly,
    pub l_plus: Poly,
    pub l_minus: Poly,
    pub b1: Poly,
    pub b2: Poly,
    pub b_plus: Poly,
    pub b_minus: Poly,
    pub l_d: Poly,
    pub b_d: Poly,
    pub v_part: Poly,
    pub dt_l_plus: Poly,
    pub dt_l_d: Poly,
    pub dt_l_minus: Poly,
    pub dt_b_d: Poly,
    /// `∂_t B_t = (t + U')/κ - ψ'` (constant in x)
    pub dt_b_t: C,
    pub remainders: Remainders,
    /// Particle coordinates (poles of the rational reductions).
    pub q: Vec<C>,
}

/// Assembles all eight entries:
///
/// - `L₁,₂ = (x² - t ± L_d)/2`, `B₁,₂ = (B_t ± B_d)/2`
/// - `B_t = -x + (t²/2 + U)/κ - φ'/φ`
/// - `L₋ = -(κB_d + ∂ₓL_d + L_d²/2 + V)/(2L₊)`
/// - `κB₋ = -(2∂ₓL₊·L₋ + κ∂_tL_d - κ∂ₓB_d)/(2L₊)`
///
/// `L₋` and `B₋` come from polynomial division; remainders above
/// [`POLYNOMIALITY_TOLERANCE`] (relative) are an error.
pub fn build_pair(s: &ParticleState, cfg: &BuilderConfig) -> Result<PIILaxResult> {
    s.validate()?;
    let ph = cfg.phi_at(s.t)?;
    let kap = s.kappa_f();
    let kc = C::new(kap, 0.0);
    let half = C::new(0.5, 0.0);

    // everything that needs a time rate is carried in dual numbers
    let (q, p, u) = dual_inputs(s)?;
    let td = Dual::new(C::new(s.t, 0.0), C::new(1.0, 0.0));
    let psi = Dual::new(ph.psi, ph.psi_dot);
    let phi = Dual::new(ph.phi, ph.phi * ph.psi);
    let lp = Polynomial::from_roots(&q).scale(phi);
    let ld = ld_generic(&q, &p);
    let (kbd, _) = kappa_bd_generic(&q, &p, psi, kap);
    let v = vpart_generic(td, u, psi, kap);
    let num = -&(&(&(&kbd + &ld.derivative()) + &(&ld * &ld).scale(Dual::from_f64(0.5))) + &v);
    let (lm, rem) = num.div_rem(&lp.scale(Dual::from_f64(2.0)))?;
    let l_minus_rem = relative(&rem.value_part(), &num.value_part());

    let l_plus = lp.value_part();
    let l_d = ld.value_part();
    let dt_l_d = ld.rate_part();
    let b_d = kbd.value_part().scale(kc.inv());
    let l_minus = lm.value_part();
    let lpx = l_plus.derivative();
    let bnum = -&(&(&(&lpx * &l_minus).scale(C::new(2.0, 0.0)) + &dt_l_d.scale(kc)) - &b_d.derivative().scale(kc));
    let (b_minus, brem) = bnum.div_rem(&l_plus.scale(kc * 2.0))?;
    let remainders = Remainders { l_minus: l_minus_rem, b_minus: relative(&brem, &bnum) };
    for (entry, relative) in [("Lminus", remainders.l_minus), ("Bminus", remainders.b_minus)] {
        if !(relative <= POLYNOMIALITY_TOLERANCE) {
            return Err(Error::PolynomialityViolated { entry, relative });
        }
    }

    let lt = Polynomial::new(vec![C::new(-s.t, 0.0), C::new(0.0, 0.0), C::new(1.0, 0.0)]);
    let bt = Polynomial::new(vec![(s.t * s.t / 2.0 + s.u) / kap - ph.psi, C::new(-1.0, 0.0)]);
    Ok(PIILaxResult {
        t: s.t,
        kappa: s.kappa,
        l1: (&lt + &l_d).scale(half),
        l2: (&lt - &l_d).scale(half),
        b_plus: lpx.scale(-kc.inv()),
        b1: (&bt + &b_d).scale(half),
        b2: (&bt - &b_d).scale(half),
        b_minus,
        dt_l_plus: lp.rate_part(),
        dt_l_minus: lm.rate_part(),
        dt_b_d: kbd.rate_part().scale(kc.inv()),
        dt_b_t: (s.t + u.d) / kap - ph.psi_dot,
        dt_l_d,
        l_plus,
        l_minus,
        l_d,
        b_d,
        v_part: v.value_part(),
        remainders,
        q: s.q.clone(),
    })
}

fn jet(p: &Poly, dt: Option<&Poly>, x: f64) -> Jet {
    let xc = C::new(x, 0.0);
    let d1 = p.derivative();
    let (t, tx) = dt.map_or((NAN, NAN), |r| (r.eval(xc), r.derivative().eval(xc)));
    Jet::new(p.eval(xc), t, d1.eval(xc), NAN, tx, d1.derivative().eval(xc))
}

impl PIILaxResult {
    pub fn lt(&self) -> Poly {
        &self.l1 + &self.l2
    }

    pub fn bt(&self) -> Poly {
        &self.b1 + &self.b2
    }

    /// Entries and their known partials at `x`. Time partials are exact for
    /// the `L` entries, `B₊` and the `B` trace/difference; `∂_tB₋` is not
    /// available.
    pub fn point(&self, x: f64) -> LaxPoint {
        let kc = C::new(self.kappa as f64, 0.0);
        let dt_lt = Poly::constant(C::new(-1.0, 0.0));
        let dt_l1 = (&dt_lt + &self.dt_l_d).scale(C::new(0.5, 0.0));
        let dt_l2 = (&dt_lt - &self.dt_l_d).scale(C::new(0.5, 0.0));
        let dt_bt = Poly::constant(self.dt_b_t);
        let dt_b1 = (&dt_bt + &self.dt_b_d).scale(C::new(0.5, 0.0));
        let dt_b2 = (&dt_bt - &self.dt_b_d).scale(C::new(0.5, 0.0));
        let dt_bp = self.dt_l_plus.derivative().scale(-kc.inv());
        LaxPoint {
            l1: jet(&self.l1, Some(&dt_l1), x),
            l2: jet(&self.l2, Some(&dt_l2), x),
            l_plus: jet(&self.l_plus, Some(&self.dt_l_plus), x),
            l_minus: jet(&self.l_minus, Some(&self.dt_l_minus), x),
            b1: jet(&self.b1, None, x).with_rate(&dt_b1, x),
            b2: jet(&self.b2, None, x).with_rate(&dt_b2, x),
            b_plus: jet(&self.b_plus, Some(&dt_bp), x),
            b_minus: jet(&self.b_minus, None, x),
        }
    }

    pub fn export(&self) -> LaxExport {
        LaxExport {
            t: self.t,
            entries: ExportEntries {
                l1: self.l1.clone(),
                l2: self.l2.clone(),
                l_plus: self.l_plus.clone(),
                l_minus: self.l_minus.clone(),
                b1: self.b1.clone(),
                b2: self.b2.clone(),
                b_plus: self.b_plus.clone(),
                b_minus: self.b_minus.clone(),
            },
        }
    }
}

trait WithRate {
    fn with_rate(self, r: &Poly, x: f64) -> Self;
}

impl WithRate for Jet {
    fn with_rate(mut self, r: &Poly, x: f64) -> Self {
        let xc = C::new(x, 0.0);
        self.t = r.eval(xc);
        self.tx = r.derivative().eval(xc);
        self
    }
}

impl LaxSlice for PIILaxResult {
    fn at(&self, x: f64) -> Result<LaxPoint> {
        Ok(self.point(x))
    }

    fn poles(&self) -> Vec<C> {
        self.q.clone()
    }
}

/// JSON form `{"t": …, "entries": {"L1": [[re, im], …], …}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaxExport {
    pub t: f64,
    pub entries: ExportEntries,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExportEntries {
    #[serde(rename = "L1")]
    pub l1: Poly,
    #[serde(rename = "L2")]
    pub l2: Poly,
    #[serde(rename = "Lplus")]
    pub l_plus: Poly,
    #[serde(rename = "Lminus")]
    pub l_minus: Poly,
    #[serde(rename = "B1")]
    pub b1: Poly,
    #[serde(rename = "B2")]
    pub b2: Poly,
    #[serde(rename = "Bplus")]
    pub b_plus: Poly,
    #[serde(rename = "Bminus")]
    pub b_minus: Poly,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeEntry {
    pub entry: String,
    /// `None` for the zero polynomial.
    pub degree: Option<usize>,
    /// Upper bound (exact degree for `L₊`, `B₊`).
    pub bound: usize,
    pub exact: bool,
    pub leading_magnitude: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeReport {
    pub kappa: usize,
    pub entries: Vec<DegreeEntry>,
}

/// Checks `deg L₊ = κ`, `deg B₊ = κ-1`, `deg L_d ≤ κ-1`,
/// `deg B_d ≤ max(κ-2, 0)`.
pub fn degree_audit(r: &PIILaxResult) -> Result<DegreeReport> {
    let k = r.kappa;
    let checks = [
        ("Lplus", &r.l_plus, k, true),
        ("Bplus", &r.b_plus, k - 1, true),
        ("Ld", &r.l_d, k - 1, false),
        ("Bd", &r.b_d, k.saturating_sub(2), false),
    ];
    let mut entries = Vec::new();
    for (name, p, bound, exact) in checks {
        let degree = p.degree();
        let ok = match (degree, exact) {
            (Some(d), true) => d == bound,
            (None, true) => false,
            (Some(d), false) => d <= bound,
            (None, false) => true,
        };
        if !ok {
            return Err(Error::DegreeBound { entry: name, degree, bound });
        }
        entries.push(DegreeEntry {
            entry: name.into(),
            degree,
            bound,
            exact,
            leading_magnitude: p.leading().map_or(0.0, |c| c.norm()),
        });
    }
    Ok(DegreeReport { kappa: k, entries })
}
