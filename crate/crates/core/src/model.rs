//! System model of the IRS-assisted multigroup multicast downlink and its exact
//! (unsmoothed) achievable rates.
//!
//! All channels are stored already divided by the receiver noise standard
//! deviation, so the noise term in every SINR is exactly one. Users are kept in
//! a flat list ordered group by group; `(k, g)` addresses user `k` of group `g`.
//! Rates are in nats/s/Hz throughout.

use std::ops::Range;

use crate::error::{check_len, invalid, Error, Result};
use crate::scalar::{all_finite, dot, norm, Cx, Real};

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Cx<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<Cx<T>>) -> Result<Self> {
        check_len("matrix data", rows * cols, data.len())?;
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Cx::new(T::zero(), T::zero()); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Cx<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Cx<T> {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[Cx<T>] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[Cx<T>] {
        &self.data
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [Cx<T>] {
        &mut self.data
    }

    /// `A x` for a column vector `x` of length `cols`.
    pub fn mul_vec(&self, x: &[Cx<T>]) -> Vec<Cx<T>> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|r| dot(self.row(r), x)).collect()
    }

    pub fn cast<U: Real>(&self) -> CMatrix<U> {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: cast_vec(&self.data),
        }
    }
}

pub(crate) fn cast_vec<T: Real, U: Real>(v: &[Cx<T>]) -> Vec<Cx<U>> {
    v.iter()
        .map(|c| Cx::new(U::lit(c.re.to_f64_lossy()), U::lit(c.im.to_f64_lossy())))
        .collect()
}

/// All noise-normalized channels of one realization.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet<T> {
    /// Transmitter to IRS, `M × N`.
    h_ts: CMatrix<T>,
    /// Transmitter to user, `K × N`, users in group order.
    h_direct: CMatrix<T>,
    /// IRS to user, `K × M`, users in group order.
    h_irs: CMatrix<T>,
    group_sizes: Vec<usize>,
    offsets: Vec<usize>,
}

impl<T: Real> ChannelSet<T> {
    /// Builds a channel set from per-user rows listed group by group.
    ///
    /// `h_direct` has one length-`N` row per user and `h_irs` one length-`M`
    /// row per user, where `N` and `M` are the column and row counts of `h_ts`.
    pub fn new(
        h_ts: CMatrix<T>,
        h_direct: Vec<Vec<Cx<T>>>,
        h_irs: Vec<Vec<Cx<T>>>,
        group_sizes: Vec<usize>,
    ) -> Result<Self> {
        let n = h_ts.cols();
        let m = h_ts.rows();
        let k: usize = group_sizes.iter().sum();
        let direct = stack_rows("direct channel row", n, k, h_direct)?;
        let irs = stack_rows("IRS-user channel row", m, k, h_irs)?;
        Self::from_parts(h_ts, direct, irs, group_sizes)
    }

    pub(crate) fn from_parts(
        h_ts: CMatrix<T>,
        h_direct: CMatrix<T>,
        h_irs: CMatrix<T>,
        group_sizes: Vec<usize>,
    ) -> Result<Self> {
        if h_ts.cols() == 0 {
            return Err(invalid("N", "at least one transmit antenna is required"));
        }
        if group_sizes.is_empty() {
            return Err(invalid("group_sizes", "at least one group is required"));
        }
        if group_sizes.contains(&0) {
            return Err(invalid("group_sizes", "every group needs at least one user"));
        }
        let k: usize = group_sizes.iter().sum();
        check_len("direct channel rows", k, h_direct.rows())?;
        check_len("direct channel length", h_ts.cols(), h_direct.cols())?;
        check_len("IRS-user channel rows", k, h_irs.rows())?;
        check_len("IRS-user channel length", h_ts.rows(), h_irs.cols())?;
        if !all_finite(h_ts.as_slice()) || !all_finite(h_direct.as_slice()) || !all_finite(h_irs.as_slice()) {
            return Err(Error::NonFinite("channel set"));
        }
        let mut offsets = Vec::with_capacity(group_sizes.len() + 1);
        offsets.push(0);
        for s in &group_sizes {
            offsets.push(offsets.last().copied().unwrap_or(0) + s);
        }
        Ok(Self {
            h_ts,
            h_direct,
            h_irs,
            group_sizes,
            offsets,
        })
    }

    /// Transmit antennas `N`.
    pub fn antennas(&self) -> usize {
        self.h_ts.cols()
    }

    /// Reflecting tiles `M`.
    pub fn tiles(&self) -> usize {
        self.h_ts.rows()
    }

    pub fn groups(&self) -> usize {
        self.group_sizes.len()
    }

    /// Total user count `K`.
    pub fn users(&self) -> usize {
        self.h_direct.rows()
    }

    pub fn group_sizes(&self) -> &[usize] {
        &self.group_sizes
    }

    /// Flat user indices belonging to group `g`.
    pub fn group_range(&self, g: usize) -> Range<usize> {
        self.offsets[g]..self.offsets[g + 1]
    }

    /// Group of flat user index `u`.
    pub fn group_of(&self, u: usize) -> usize {
        // offsets is sorted with offsets[0] = 0
        self.offsets.partition_point(|&o| o <= u) - 1
    }

    /// Flat index of user `k` in group `g`.
    pub fn user_index(&self, k: usize, g: usize) -> Result<usize> {
        if g >= self.groups() {
            return Err(Error::Index {
                context: "group",
                index: g,
                bound: self.groups(),
            });
        }
        if k >= self.group_sizes[g] {
            return Err(Error::Index {
                context: "user within group",
                index: k,
                bound: self.group_sizes[g],
            });
        }
        Ok(self.offsets[g] + k)
    }

    pub fn h_ts(&self) -> &CMatrix<T> {
        &self.h_ts
    }

    pub fn direct(&self, u: usize) -> &[Cx<T>] {
        self.h_direct.row(u)
    }

    pub fn irs(&self, u: usize) -> &[Cx<T>] {
        self.h_irs.row(u)
    }

    pub fn direct_matrix(&self) -> &CMatrix<T> {
        &self.h_direct
    }

    pub fn irs_matrix(&self) -> &CMatrix<T> {
        &self.h_irs
    }

    /// Multiplies every user-side channel (direct and IRS-user) by `factor`.
    pub fn scale_user_side(&self, factor: T) -> Self {
        let mut out = self.clone();
        for c in out.h_direct.as_mut_slice().iter_mut().chain(out.h_irs.as_mut_slice()) {
            *c = *c * factor;
        }
        out
    }

    /// Reorders the users of group `g` according to `perm` (a permutation of `0..K_g`).
    pub fn permute_group(&self, g: usize, perm: &[usize]) -> Result<Self> {
        let range = self.group_range(g);
        check_len("group permutation", range.len(), perm.len())?;
        let mut seen = vec![false; perm.len()];
        for &p in perm {
            if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
                return Err(invalid("perm", "not a permutation"));
            }
        }
        let mut out = self.clone();
        for (dst, &src) in perm.iter().enumerate() {
            let (d, s) = (range.start + dst, range.start + src);
            let n = self.antennas();
            let m = self.tiles();
            out.h_direct.as_mut_slice()[d * n..(d + 1) * n].copy_from_slice(self.direct(s));
            out.h_irs.as_mut_slice()[d * m..(d + 1) * m].copy_from_slice(self.irs(s));
        }
        Ok(out)
    }

    pub fn cast<U: Real>(&self) -> ChannelSet<U> {
        ChannelSet {
            h_ts: self.h_ts.cast(),
            h_direct: self.h_direct.cast(),
            h_irs: self.h_irs.cast(),
            group_sizes: self.group_sizes.clone(),
            offsets: self.offsets.clone(),
        }
    }

    pub(crate) fn check_beamformer(&self, f: &BeamformerStack<T>) -> Result<()> {
        check_len("beamformer groups", self.groups(), f.groups())?;
        check_len("beamformer block length", self.antennas(), f.antennas())
    }

    pub(crate) fn check_phases(&self, theta: &PhaseVector<T>) -> Result<()> {
        check_len("phase vector", self.tiles(), theta.len())
    }
}

fn stack_rows<T: Real>(context: &'static str, cols: usize, rows: usize, v: Vec<Vec<Cx<T>>>) -> Result<CMatrix<T>> {
    check_len(context, rows, v.len())?;
    let mut data = Vec::with_capacity(rows * cols);
    for r in v {
        check_len(context, cols, r.len())?;
        data.extend(r);
    }
    CMatrix::new(rows, cols, data)
}

/// Stacked transmit beamformer `f = [f_1; …; f_G]`, each block of length `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamformerStack<T> {
    antennas: usize,
    data: Vec<Cx<T>>,
}

impl<T: Real> BeamformerStack<T> {
    pub fn new(antennas: usize, data: Vec<Cx<T>>) -> Result<Self> {
        if antennas == 0 || data.is_empty() || !data.len().is_multiple_of(antennas) {
            return Err(invalid(
                "beamformer",
                format!("length {} is not a positive multiple of N = {antennas}", data.len()),
            ));
        }
        Ok(Self { antennas, data })
    }

    pub fn zeros(antennas: usize, groups: usize) -> Self {
        Self {
            antennas,
            data: vec![Cx::new(T::zero(), T::zero()); antennas * groups],
        }
    }

    pub fn from_blocks(blocks: &[Vec<Cx<T>>]) -> Result<Self> {
        let n = blocks.first().map_or(0, Vec::len);
        for b in blocks {
            check_len("beamformer block", n, b.len())?;
        }
        Self::new(n, blocks.concat())
    }

    pub fn antennas(&self) -> usize {
        self.antennas
    }

    pub fn groups(&self) -> usize {
        self.data.len() / self.antennas
    }

    pub fn block(&self, g: usize) -> &[Cx<T>] {
        &self.data[g * self.antennas..(g + 1) * self.antennas]
    }

    pub fn block_mut(&mut self, g: usize) -> &mut [Cx<T>] {
        &mut self.data[g * self.antennas..(g + 1) * self.antennas]
    }

    pub fn as_slice(&self) -> &[Cx<T>] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<Cx<T>> {
        self.data
    }

    pub fn norm(&self) -> T {
        norm(&self.data)
    }

    /// Whether `‖f‖ ≤ √P_t + tol`.
    pub fn is_feasible(&self, p_t: T, tol: T) -> bool {
        self.norm() <= p_t.sqrt() + tol
    }
}

/// IRS phase shifts `θ`, one complex coefficient per tile.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseVector<T> {
    theta: Vec<Cx<T>>,
}

impl<T: Real> PhaseVector<T> {
    pub fn new(theta: Vec<Cx<T>>) -> Self {
        Self { theta }
    }

    /// `θ_m = e^{jφ_m}`.
    pub fn from_angles(phi: &[T]) -> Self {
        Self {
            theta: phi.iter().map(|&p| Cx::from_polar(T::one(), p)).collect(),
        }
    }

    pub fn ones(m: usize) -> Self {
        Self {
            theta: vec![Cx::new(T::one(), T::zero()); m],
        }
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn as_slice(&self) -> &[Cx<T>] {
        &self.theta
    }

    pub fn into_vec(self) -> Vec<Cx<T>> {
        self.theta
    }

    /// Whether every `|θ_m|` is within `tol` of one.
    pub fn is_unit_modulus(&self, tol: T) -> bool {
        self.theta.iter().all(|t| (t.norm() - T::one()).abs() <= tol)
    }
}

/// Per-user, per-group and total exact rates in nats/s/Hz.
#[derive(Debug, Clone, PartialEq)]
pub struct RateBreakdown<T> {
    /// `per_user[g][k]`.
    pub per_user: Vec<Vec<T>>,
    pub per_group: Vec<T>,
    pub sum_rate: T,
}

impl<T: Real> RateBreakdown<T> {
    /// Assembles group minima and their sum from flat per-user rates.
    pub fn from_user_rates(ch: &ChannelSet<T>, rates: &[T]) -> Self {
        let per_user: Vec<Vec<T>> = (0..ch.groups()).map(|g| rates[ch.group_range(g)].to_vec()).collect();
        let per_group: Vec<T> = per_user
            .iter()
            .map(|r| r.iter().copied().fold(T::infinity(), T::min))
            .collect();
        let sum_rate = per_group.iter().copied().sum();
        Self {
            per_user,
            per_group,
            sum_rate,
        }
    }
}

/// Effective channels `z_u = h_u + ĥ_u diag(θ) H_ts` of every user, `K × N`.
///
/// Computed once per phase vector and reused by every beamformer evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveChannels<T> {
    z: CMatrix<T>,
}

impl<T: Real> EffectiveChannels<T> {
    pub fn compute(ch: &ChannelSet<T>, theta: &PhaseVector<T>) -> Result<Self> {
        Self::from_phases(ch, theta.as_slice())
    }

    /// Same as [`compute`](Self::compute) for a bare phase slice.
    pub fn from_phases(ch: &ChannelSet<T>, theta: &[Cx<T>]) -> Result<Self> {
        let mut z = Self {
            z: ch.direct_matrix().clone(),
        };
        z.update(ch, theta)?;
        Ok(z)
    }

    /// Recomputes the channels for new phases in place, reusing the buffer.
    pub fn update(&mut self, ch: &ChannelSet<T>, theta: &[Cx<T>]) -> Result<()> {
        check_len("phase vector", ch.tiles(), theta.len())?;
        let n = ch.antennas();
        let data = self.z.as_mut_slice();
        check_len("effective channel buffer", ch.users() * n, data.len())?;
        data.copy_from_slice(ch.direct_matrix().as_slice());
        for u in 0..ch.users() {
            accumulate_reflected(ch, theta, u, &mut data[u * n..(u + 1) * n]);
        }
        Ok(())
    }

    #[inline]
    pub fn row(&self, u: usize) -> &[Cx<T>] {
        self.z.row(u)
    }

    pub fn users(&self) -> usize {
        self.z.rows()
    }
}

/// `out += (ĥ_u ⊙ θ) H_ts`, never materializing `diag(θ)`.
fn accumulate_reflected<T: Real>(ch: &ChannelSet<T>, theta: &[Cx<T>], u: usize, out: &mut [Cx<T>]) {
    let h_ts = ch.h_ts();
    for (m, (h, t)) in ch.irs(u).iter().zip(theta).enumerate() {
        let w = h * t;
        for (o, a) in out.iter_mut().zip(h_ts.row(m)) {
            *o = *o + w * a;
        }
    }
}

/// Effective channel `z_{k,g}` of user `k` in group `g`.
pub fn effective_channel<T: Real>(
    ch: &ChannelSet<T>,
    theta: &PhaseVector<T>,
    k: usize,
    g: usize,
) -> Result<Vec<Cx<T>>> {
    ch.check_phases(theta)?;
    let u = ch.user_index(k, g)?;
    let mut z = ch.direct(u).to_vec();
    accumulate_reflected(ch, theta.as_slice(), u, &mut z);
    Ok(z)
}

/// Received amplitudes and powers of every user under a given beamformer.
///
/// Holds `z_u f_j` for all users and groups, the total received power
/// `1 + Σ_j |z_u f_j|²`, the interference-plus-noise power and the rate.
#[derive(Debug, Clone)]
pub struct LinkState<T> {
    groups: usize,
    users: usize,
    zf: Vec<Cx<T>>,
    /// Total powers, then interference powers, then rates; `users` entries each.
    powers: Vec<T>,
}

impl<T: Real> LinkState<T> {
    pub fn new(ch: &ChannelSet<T>, z: &EffectiveChannels<T>, f: &BeamformerStack<T>) -> Result<Self> {
        ch.check_beamformer(f)?;
        Self::from_beams(ch, z, f.as_slice())
    }

    /// Same as [`new`](Self::new) for a bare stacked beamformer `[f_1; …; f_G]`.
    pub fn from_beams(ch: &ChannelSet<T>, z: &EffectiveChannels<T>, f: &[Cx<T>]) -> Result<Self> {
        let k = ch.users();
        let mut state = Self {
            groups: ch.groups(),
            users: k,
            zf: vec![Cx::new(T::zero(), T::zero()); k * ch.groups()],
            powers: vec![T::zero(); 3 * k],
        };
        state.update(ch, z, f)?;
        Ok(state)
    }

    /// Recomputes the state for a new beamformer in place, reusing the buffers.
    pub fn update(&mut self, ch: &ChannelSet<T>, z: &EffectiveChannels<T>, f: &[Cx<T>]) -> Result<()> {
        let groups = ch.groups();
        let n = ch.antennas();
        let k = ch.users();
        check_len("stacked beamformer", n * groups, f.len())?;
        check_len("effective channels", k, z.users())?;
        check_len("link state users", k, self.users)?;
        check_len("link state groups", groups, self.groups)?;
        for u in 0..k {
            let own = ch.group_of(u);
            let row = z.row(u);
            let amps = &mut self.zf[u * groups..(u + 1) * groups];
            for (a, block) in amps.iter_mut().zip(f.chunks_exact(n)) {
                *a = dot(row, block);
            }
            let mut interf = T::one();
            for (j, a) in amps.iter().enumerate() {
                if j != own {
                    interf = interf + a.norm_sqr();
                }
            }
            let signal = amps[own].norm_sqr();
            self.powers[u] = interf + signal;
            self.powers[k + u] = interf;
            self.powers[2 * k + u] = (signal / interf).ln_1p();
        }
        Ok(())
    }

    /// `z_u f_j`.
    #[inline]
    pub fn amplitude(&self, u: usize, j: usize) -> Cx<T> {
        self.zf[u * self.groups + j]
    }

    pub fn amplitudes(&self, u: usize) -> &[Cx<T>] {
        &self.zf[u * self.groups..(u + 1) * self.groups]
    }

    /// `1 + Σ_{j∈𝒢} |z_u f_j|²`.
    pub fn total_power(&self, u: usize) -> T {
        self.powers[u]
    }

    /// `1 + Σ_{ℓ≠g} |z_u f_ℓ|²` with `g` the user's own group.
    pub fn interference_power(&self, u: usize) -> T {
        self.powers[self.users + u]
    }

    /// Flat per-user rates.
    pub fn rates(&self) -> &[T] {
        &self.powers[2 * self.users..]
    }
}

/// Achievable rate of user `k` in group `g`.
pub fn user_rate<T: Real>(
    ch: &ChannelSet<T>,
    f: &BeamformerStack<T>,
    theta: &PhaseVector<T>,
    k: usize,
    g: usize,
) -> Result<T> {
    ch.check_beamformer(f)?;
    let z = effective_channel(ch, theta, k, g)?;
    let mut interf = T::one();
    let mut signal = T::zero();
    for j in 0..ch.groups() {
        let p = dot(&z, f.block(j)).norm_sqr();
        if j == g {
            signal = p;
        } else {
            interf = interf + p;
        }
    }
    Ok((signal / interf).ln_1p())
}

pub fn rate_breakdown<T: Real>(
    ch: &ChannelSet<T>,
    f: &BeamformerStack<T>,
    theta: &PhaseVector<T>,
) -> Result<RateBreakdown<T>> {
    let z = EffectiveChannels::compute(ch, theta)?;
    let state = LinkState::new(ch, &z, f)?;
    Ok(RateBreakdown::from_user_rates(ch, state.rates()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Cx<f64> {
        Cx::new(re, im)
    }

    fn scalar_set(direct: Cx<f64>, irs: Cx<f64>, ts: Cx<f64>) -> ChannelSet<f64> {
        ChannelSet::new(
            CMatrix::new(1, 1, vec![ts]).unwrap(),
            vec![vec![direct]],
            vec![vec![irs]],
            vec![1],
        )
        .unwrap()
    }

    #[test]
    fn scalar_effective_channel() {
        let ch = scalar_set(c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0));
        let theta = PhaseVector::new(vec![c(0.0, 1.0)]);
        let z = effective_channel(&ch, &theta, 0, 0).unwrap();
        assert_eq!(z, vec![c(1.0, 6.0)]);
    }

    #[test]
    fn absent_irs_leaves_direct_channel() {
        let ch = ChannelSet::new(
            CMatrix::from_fn(3, 2, |r, c0| c(r as f64 + 1.0, c0 as f64 - 0.5)),
            vec![vec![c(0.3, -0.2), c(1.1, 0.4)]],
            vec![vec![c(0.0, 0.0); 3]],
            vec![1],
        )
        .unwrap();
        let theta = PhaseVector::from_angles(&[0.1, 2.0, -1.0]);
        let z = effective_channel(&ch, &theta, 0, 0).unwrap();
        assert_eq!(z, ch.direct(0));
    }

    #[test]
    fn zero_beam_has_zero_rate() {
        let ch = scalar_set(c(1.0, 0.5), c(2.0, 0.0), c(3.0, 0.0));
        let f = BeamformerStack::zeros(1, 1);
        let theta = PhaseVector::ones(1);
        assert_eq!(user_rate(&ch, &f, &theta, 0, 0).unwrap(), 0.0);
    }

    #[test]
    fn interference_free_unit_gain_is_ln2() {
        let ch = scalar_set(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        let f = BeamformerStack::new(1, vec![c(1.0, 0.0)]).unwrap();
        let r = user_rate(&ch, &f, &PhaseVector::ones(1), 0, 0).unwrap();
        assert!((r - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn singleton_and_min_groups() {
        // group 0: two users with different gains, group 1: one user
        let ch = ChannelSet::new(
            CMatrix::zeros(0, 1),
            vec![vec![c(1.0, 0.0)], vec![c(2.0, 0.0)], vec![c(0.5, 0.0)]],
            vec![vec![], vec![], vec![]],
            vec![2, 1],
        )
        .unwrap();
        let f = BeamformerStack::new(1, vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let theta = PhaseVector::ones(0);
        let b = rate_breakdown(&ch, &f, &theta).unwrap();
        let r1 = (1.0f64 + 1.0).ln();
        let r2 = (1.0f64 + 4.0).ln();
        assert!((b.per_user[0][0] - r1).abs() < 1e-15);
        assert!((b.per_user[0][1] - r2).abs() < 1e-15);
        assert_eq!(b.per_group[0], b.per_user[0][0]);
        assert_eq!(b.per_group[1], b.per_user[1][0]);
        assert_eq!(b.sum_rate, b.per_group[0] + b.per_group[1]);
    }

    #[test]
    fn dimension_errors() {
        let ch = scalar_set(c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0));
        let bad_theta = PhaseVector::ones(2);
        assert!(matches!(
            effective_channel(&ch, &bad_theta, 0, 0),
            Err(Error::Dimension { .. })
        ));
        let bad_f = BeamformerStack::zeros(2, 1);
        assert!(user_rate(&ch, &bad_f, &PhaseVector::ones(1), 0, 0).is_err());
        assert!(matches!(
            effective_channel(&ch, &PhaseVector::ones(1), 1, 0),
            Err(Error::Index { .. })
        ));
        assert!(ChannelSet::new(
            CMatrix::<f64>::zeros(2, 1),
            vec![vec![c(1.0, 0.0)]],
            vec![vec![c(1.0, 0.0)]],
            vec![1],
        )
        .is_err());
    }

    #[test]
    fn non_finite_channels_rejected() {
        let err = ChannelSet::new(
            CMatrix::new(1, 1, vec![c(f64::NAN, 0.0)]).unwrap(),
            vec![vec![c(1.0, 0.0)]],
            vec![vec![c(1.0, 0.0)]],
            vec![1],
        );
        assert!(matches!(err, Err(Error::NonFinite(_))));
    }

    #[test]
    fn group_lookup() {
        let ch = ChannelSet::new(
            CMatrix::<f64>::zeros(0, 1),
            vec![vec![c(1.0, 0.0)]; 6],
            vec![vec![]; 6],
            vec![1, 3, 2],
        )
        .unwrap();
        let groups: Vec<_> = (0..6).map(|u| ch.group_of(u)).collect();
        assert_eq!(groups, vec![0, 1, 1, 1, 2, 2]);
        assert_eq!(ch.user_index(1, 2).unwrap(), 5);
    }
}
