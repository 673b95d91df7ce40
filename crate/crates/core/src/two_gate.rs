//! TGF and TGFQS: two gates at a time, through a quartic local model.
//!
//! With all other gates fixed, the cost is a polynomial in the parameters of
//! the two chosen gates that is quadratic in each. Its coefficients are read
//! off the cost with insertion operators placed at both sites at once
//! (`6 x 6` or `10 x 10` circuit evaluations), and the pair is then updated
//! to the minimum of that polynomial over the product of unit spheres.
//!
//! Slot `d` is always the gate applied later and `k` the earlier one.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ansatz::{Circuit, GateSite, ParameterSet};
use crate::cost::{EvalKind, Evaluator};
use crate::eigen::min_eigenpair;
use crate::error::{Error, Result};
use crate::gates::{GateKind, Insertion, UnitQuaternion};
use crate::optimizer::SweepContext;
use crate::tomography::{pair_insertion_state, pair_outputs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairingStrategy {
    Linear,
    Random,
    Opposite,
    #[serde(alias = "half-shifted")]
    HalfShifted,
}

impl PairingStrategy {
    pub const ALL: [PairingStrategy; 4] = [
        PairingStrategy::Linear,
        PairingStrategy::Random,
        PairingStrategy::Opposite,
        PairingStrategy::HalfShifted,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PairingStrategy::Linear => "linear",
            PairingStrategy::Random => "random",
            PairingStrategy::Opposite => "opposite",
            PairingStrategy::HalfShifted => "half_shifted",
        }
    }
}

impl fmt::Display for PairingStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PairingStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        Self::ALL
            .into_iter()
            .find(|p| p.name() == norm)
            .ok_or_else(|| Error::config(format!("unknown pairing strategy {s:?}")))
    }
}

/// `D/2` disjoint pairs of 1-based gate indices covering `1..=D`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairSequence {
    pub strategy: PairingStrategy,
    pub pairs: Vec<(usize, usize)>,
}

/// The pair list of one iteration. `rng` is only drawn from for
/// [`PairingStrategy::Random`].
pub fn make_pairs<R: Rng + ?Sized>(
    strategy: PairingStrategy,
    num_gates: usize,
    rng: &mut R,
) -> Result<PairSequence> {
    let d = num_gates;
    if d < 2 || d % 2 != 0 {
        return Err(Error::config(format!(
            "pairing needs an even gate count >= 2, got {d}"
        )));
    }
    let h = d / 2;
    let pairs = match strategy {
        PairingStrategy::Linear => (1..=h).map(|i| (2 * i - 1, 2 * i)).collect(),
        PairingStrategy::Opposite => (1..=h).map(|i| (i, d + 1 - i)).collect(),
        PairingStrategy::HalfShifted => (1..=h).map(|i| (i, i + h)).collect(),
        PairingStrategy::Random => {
            let mut perm: Vec<usize> = (1..=d).collect();
            perm.shuffle(rng);
            perm.chunks(2).map(|c| (c[0], c[1])).collect()
        }
    };
    Ok(PairSequence { strategy, pairs })
}

/// Coefficients of the two-gate quartic cost, in local indices of the gate
/// family.
///
/// ```text
/// f(qd, qk) = Σ_{μ,α}          diag[μ][α]        qd_μ² qk_α²
///           + Σ_μ Σ_{α<β}      cubic_k[μ][α][β]  qd_μ² qk_α qk_β
///           + Σ_{μ<ν} Σ_α      cubic_d[μ][ν][α]  qd_μ qd_ν qk_α²
///           + Σ_{μ<ν} Σ_{α<β}  quartic[μ][ν][α][β] qd_μ qd_ν qk_α qk_β
/// ```
///
/// Only the ordered (`<`) slots are populated; each already carries the
/// full weight of its monomial.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffTensor {
    pub kind: GateKind,
    pub diag: [[f64; 4]; 4],
    pub cubic_k: [[[f64; 4]; 4]; 4],
    pub cubic_d: [[[f64; 4]; 4]; 4],
    pub quartic: [[[[f64; 4]; 4]; 4]; 4],
}

type Local = [f64; 4];

impl CoeffTensor {
    pub fn zero(kind: GateKind) -> Self {
        Self {
            kind,
            diag: [[0.0; 4]; 4],
            cubic_k: [[[0.0; 4]; 4]; 4],
            cubic_d: [[[0.0; 4]; 4]; 4],
            quartic: [[[[0.0; 4]; 4]; 4]; 4],
        }
    }

    pub fn dim(&self) -> usize {
        self.kind.dim()
    }

    /// Builds the coefficients from a table `t[i][j]` of costs with insertion
    /// `i` at `d` and `j` at `k`, both indexed as in [`GateKind::insertions`].
    pub fn from_table(kind: GateKind, t: &[Vec<f64>]) -> Self {
        let ins = kind.insertions();
        let idx = |x: Insertion| ins.iter().position(|&y| y == x).expect("insertion listed");
        let n = kind.dim();
        let b = Insertion::Basis;
        let s = Insertion::Sum;
        let tv = |x: Insertion, y: Insertion| t[idx(x)][idx(y)];
        let mut out = Self::zero(kind);
        for mu in 0..n {
            for al in 0..n {
                out.diag[mu][al] = tv(b(mu), b(al));
            }
        }
        for mu in 0..n {
            for al in 0..n {
                for be in al + 1..n {
                    out.cubic_k[mu][al][be] =
                        2.0 * tv(b(mu), s(al, be)) - tv(b(mu), b(al)) - tv(b(mu), b(be));
                }
            }
        }
        for mu in 0..n {
            for nu in mu + 1..n {
                for al in 0..n {
                    out.cubic_d[mu][nu][al] =
                        2.0 * tv(s(mu, nu), b(al)) - tv(b(mu), b(al)) - tv(b(nu), b(al));
                }
            }
        }
        for mu in 0..n {
            for nu in mu + 1..n {
                for al in 0..n {
                    for be in al + 1..n {
                        out.quartic[mu][nu][al][be] = 4.0 * tv(s(mu, nu), s(al, be))
                            + tv(b(mu), b(al))
                            + tv(b(mu), b(be))
                            + tv(b(nu), b(al))
                            + tv(b(nu), b(be))
                            - 2.0
                                * (tv(b(mu), s(al, be))
                                    + tv(b(nu), s(al, be))
                                    + tv(s(mu, nu), b(al))
                                    + tv(s(mu, nu), b(be)));
                    }
                }
            }
        }
        out
    }

    /// `f = qdᵀ A(qk) qd`: the symmetric form in `qd` with `qk` fixed.
    pub fn form_d(&self, qk: &Local) -> [[f64; 4]; 4] {
        let n = self.dim();
        let mut a = [[0.0; 4]; 4];
        for mu in 0..n {
            let mut v = 0.0;
            for al in 0..n {
                v += self.diag[mu][al] * qk[al] * qk[al];
                for be in al + 1..n {
                    v += self.cubic_k[mu][al][be] * qk[al] * qk[be];
                }
            }
            a[mu][mu] = v;
            for nu in mu + 1..n {
                let mut w = 0.0;
                for al in 0..n {
                    w += self.cubic_d[mu][nu][al] * qk[al] * qk[al];
                    for be in al + 1..n {
                        w += self.quartic[mu][nu][al][be] * qk[al] * qk[be];
                    }
                }
                a[mu][nu] = 0.5 * w;
                a[nu][mu] = 0.5 * w;
            }
        }
        a
    }

    /// `f = qkᵀ B(qd) qk`: the symmetric form in `qk` with `qd` fixed.
    pub fn form_k(&self, qd: &Local) -> [[f64; 4]; 4] {
        let n = self.dim();
        let mut b = [[0.0; 4]; 4];
        for al in 0..n {
            let mut v = 0.0;
            for mu in 0..n {
                v += self.diag[mu][al] * qd[mu] * qd[mu];
                for nu in mu + 1..n {
                    v += self.cubic_d[mu][nu][al] * qd[mu] * qd[nu];
                }
            }
            b[al][al] = v;
            for be in al + 1..n {
                let mut w = 0.0;
                for mu in 0..n {
                    w += self.cubic_k[mu][al][be] * qd[mu] * qd[mu];
                    for nu in mu + 1..n {
                        w += self.quartic[mu][nu][al][be] * qd[mu] * qd[nu];
                    }
                }
                b[al][be] = 0.5 * w;
                b[be][al] = 0.5 * w;
            }
        }
        b
    }

    /// The polynomial at local components (not required to be unit).
    pub fn value(&self, qd: &[f64], qk: &[f64]) -> f64 {
        let (qd, qk) = (pad(qd), pad(qk));
        quad(&self.form_d(&qk), &qd, self.dim())
    }

    /// `(∂f/∂qd, ∂f/∂qk)` in local components.
    pub fn gradient(&self, qd: &[f64], qk: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let (qd, qk) = (pad(qd), pad(qk));
        let n = self.dim();
        let a = self.form_d(&qk);
        let b = self.form_k(&qd);
        let gd = (0..n).map(|i| 2.0 * (0..n).map(|j| a[i][j] * qd[j]).sum::<f64>()).collect();
        let gk = (0..n).map(|i| 2.0 * (0..n).map(|j| b[i][j] * qk[j]).sum::<f64>()).collect();
        (gd, gk)
    }

    /// Same coefficients restricted to extended indices `1..=3`, i.e. the
    /// tensor an axis-family build would produce at the same point.
    pub fn restrict_to_axes(&self) -> Result<Self> {
        if self.kind != GateKind::Quaternion {
            return Err(Error::parameter("tensor is already in axis form"));
        }
        let mut out = Self::zero(GateKind::Axis);
        for m in 0..3 {
            for a in 0..3 {
                out.diag[m][a] = self.diag[m + 1][a + 1];
                for b in 0..3 {
                    out.cubic_k[m][a][b] = self.cubic_k[m + 1][a + 1][b + 1];
                    out.cubic_d[m][a][b] = self.cubic_d[m + 1][a + 1][b + 1];
                    for c in 0..3 {
                        out.quartic[m][a][b][c] = self.quartic[m + 1][a + 1][b + 1][c + 1];
                    }
                }
            }
        }
        Ok(out)
    }
}

fn pad(v: &[f64]) -> Local {
    let mut out = [0.0; 4];
    out[..v.len()].copy_from_slice(v);
    out
}

fn quad(a: &[[f64; 4]; 4], v: &Local, n: usize) -> f64 {
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += v[i] * a[i][j] * v[j];
        }
    }
    acc
}

fn min_eig(a: &[[f64; 4]; 4], n: usize) -> (f64, Local) {
    if n == 3 {
        let m: [[f64; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| a[i][j]));
        let (l, v) = min_eigenpair(m);
        (l, pad(&v))
    } else {
        min_eigenpair(*a)
    }
}

/// The polynomial at a pair of gate parameters. For an axis-family tensor
/// both quaternions must have zero scalar part.
pub fn eval_quartic(t: &CoeffTensor, qd: &UnitQuaternion, qk: &UnitQuaternion) -> Result<f64> {
    if t.kind == GateKind::Axis && (qd.as_axis().is_none() || qk.as_axis().is_none()) {
        return Err(Error::parameter(
            "axis-family tensor evaluated at a quaternion with non-zero scalar part",
        ));
    }
    Ok(t.value(&t.kind.restrict(qd), &t.kind.restrict(qk)))
}

/// Orders a pair so the later gate comes first (`d`, `k`).
pub fn order_pair(a: GateSite, b: GateSite) -> Result<(GateSite, GateSite)> {
    if a == b {
        return Err(Error::parameter(format!("gate {} paired with itself", a.index())));
    }
    Ok(if a.index() > b.index() { (a, b) } else { (b, a) })
}

pub(crate) fn build_tensor(
    kind: GateKind,
    circuit: &Circuit,
    params: &ParameterSet,
    d: GateSite,
    k: GateSite,
    evaluator: &mut Evaluator<'_>,
) -> Result<CoeffTensor> {
    let (d, k) = order_pair(d, k)?;
    let outputs = pair_outputs(circuit, params, d, k, kind);
    let ins = kind.insertions();
    let mut table = vec![vec![0.0; ins.len()]; ins.len()];
    for (i, &x) in ins.iter().enumerate() {
        for (j, &y) in ins.iter().enumerate() {
            let state = pair_insertion_state(&outputs, x, y);
            table[i][j] = evaluator.measure(&state, EvalKind::Tomography)?;
        }
    }
    Ok(CoeffTensor::from_table(kind, &table))
}

/// Coefficient tensor for the pair `(d, k)` at the context's current point.
/// The later of the two gates takes the `d` slot.
pub fn build_coeff_tensor(
    ctx: &mut SweepContext<'_>,
    d: GateSite,
    k: GateSite,
    kind: GateKind,
) -> Result<CoeffTensor> {
    let (circuit, params, evaluator) = ctx.parts_mut();
    build_tensor(kind, circuit, params, d, k, evaluator)
}

/// Multi-start settings of the sphere-product minimizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MinimizerSettings {
    /// Starts including the incumbent.
    pub starts: usize,
    pub max_iters: usize,
    pub grad_tol: f64,
    /// Rounds of exact block minimization run from each start before the
    /// gradient polish.
    pub block_rounds: usize,
}

impl Default for MinimizerSettings {
    fn default() -> Self {
        Self {
            starts: 8,
            max_iters: 500,
            grad_tol: 1e-10,
            block_rounds: 100,
        }
    }
}

/// Minimum found over `|qd| = |qk| = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereMinimum {
    pub qd: Vec<f64>,
    pub qk: Vec<f64>,
    pub value: f64,
}

fn normalize(v: &mut Local, n: usize) {
    let norm = v[..n].iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in &mut v[..n] {
        *x /= norm;
    }
}

fn tangent(g: &[f64], x: &Local) -> Local {
    let n = g.len();
    let dot: f64 = (0..n).map(|i| g[i] * x[i]).sum();
    let mut out = [0.0; 4];
    for i in 0..n {
        out[i] = g[i] - dot * x[i];
    }
    out
}

fn descend(t: &CoeffTensor, mut qd: Local, mut qk: Local, s: &MinimizerSettings) -> (Local, Local, f64) {
    let n = t.dim();
    let mut f = t.value(&qd[..n], &qk[..n]);
    // exact minimization in one block at a time never increases f
    for _ in 0..s.block_rounds {
        let (_, nd) = min_eig(&t.form_d(&qk), n);
        let (fk, nk) = min_eig(&t.form_k(&nd), n);
        let improved = f - fk;
        if fk <= f {
            qd = nd;
            qk = nk;
            f = t.value(&qd[..n], &qk[..n]);
        }
        if improved <= 1e-15 * (1.0 + f.abs()) {
            break;
        }
    }
    // joint Riemannian gradient polish with Armijo backtracking
    let mut step = 1.0;
    for _ in 0..s.max_iters {
        let (gd, gk) = t.gradient(&qd[..n], &qk[..n]);
        let (td, tk) = (tangent(&gd, &qd), tangent(&gk, &qk));
        let gnorm2: f64 = td.iter().chain(&tk).map(|x| x * x).sum();
        if gnorm2.sqrt() < s.grad_tol {
            break;
        }
        let mut accepted = false;
        while step > 1e-16 {
            let mut nd = qd;
            let mut nk = qk;
            for i in 0..n {
                nd[i] -= step * td[i];
                nk[i] -= step * tk[i];
            }
            normalize(&mut nd, n);
            normalize(&mut nk, n);
            let nf = t.value(&nd[..n], &nk[..n]);
            if nf <= f - 1e-4 * step * gnorm2 {
                qd = nd;
                qk = nk;
                f = nf;
                accepted = true;
                step *= 2.0;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (qd, qk, f)
}

/// Minimizes the polynomial over the product of unit spheres from the
/// incumbent `(start_d, start_k)` plus `starts - 1` uniform random starts.
/// The result is never worse than the incumbent.
pub fn minimize_on_spheres<R: Rng + ?Sized>(
    t: &CoeffTensor,
    start_d: &[f64],
    start_k: &[f64],
    settings: &MinimizerSettings,
    rng: &mut R,
) -> Result<SphereMinimum> {
    let n = t.dim();
    if start_d.len() != n || start_k.len() != n {
        return Err(Error::shape(format!("starts must have {n} components")));
    }
    let mut sd = pad(start_d);
    let mut sk = pad(start_k);
    normalize(&mut sd, n);
    normalize(&mut sk, n);
    let mut best = (sd, sk, t.value(&sd[..n], &sk[..n]));
    let random_start = |rng: &mut R| pad(&t.kind.restrict(&t.kind.random(rng)));
    for i in 0..settings.starts.max(1) {
        let (d0, k0) = if i == 0 {
            (sd, sk)
        } else {
            (random_start(rng), random_start(rng))
        };
        let cand = descend(t, d0, k0, settings);
        if cand.2 < best.2 {
            best = cand;
        }
    }
    Ok(SphereMinimum {
        qd: best.0[..n].to_vec(),
        qk: best.1[..n].to_vec(),
        value: best.2,
    })
}

/// One pair update: tensor, minimization, accept-if-improved.
pub fn update_pair<R: Rng + ?Sized>(
    ctx: &mut SweepContext<'_>,
    kind: GateKind,
    a: GateSite,
    b: GateSite,
    settings: &MinimizerSettings,
    rng: &mut R,
) -> Result<bool> {
    let (d, k) = order_pair(a, b)?;
    let tomo_before = ctx.evaluator().tomography_evals();
    let tensor = build_coeff_tensor(ctx, d, k, kind)?;
    let start_d = kind.restrict(&ctx.params().get(d));
    let start_k = kind.restrict(&ctx.params().get(k));
    let m = minimize_on_spheres(&tensor, &start_d, &start_k, settings, rng)?;
    let qd = UnitQuaternion::normalized(kind.embed(&m.qd))?.canonical();
    let qk = UnitQuaternion::normalized(kind.embed(&m.qk))?.canonical();
    ctx.propose(&[(d, qd), (k, qk)], m.value, tomo_before)
}

/// One iteration: a fresh pair sequence, then every pair in order.
pub fn two_gate_sweep<R1: Rng + ?Sized, R2: Rng + ?Sized>(
    ctx: &mut SweepContext<'_>,
    kind: GateKind,
    strategy: PairingStrategy,
    settings: &MinimizerSettings,
    pairing_rng: &mut R1,
    minimizer_rng: &mut R2,
) -> Result<()> {
    let spec = *ctx.spec();
    let seq = make_pairs(strategy, spec.num_gates(), pairing_rng)?;
    ctx.begin_iteration();
    for (a, b) in seq.pairs {
        update_pair(ctx, kind, spec.site(a)?, spec.site(b)?, settings, minimizer_rng)?;
    }
    ctx.end_iteration();
    Ok(())
}
