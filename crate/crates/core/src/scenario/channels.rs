use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use super::budget::{dbm_to_watts, noise_power_dbm, LinkBudget, LinkModel};
use super::geometry::{place_with, GeometryConfig, NodePositions, Point3};
use crate::error::{invalid, Result};
use crate::model::{CMatrix, ChannelSet};
use crate::scalar::Cx;

/// Array element layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArrayLayout {
    /// Elements along the x-axis.
    Linear(usize),
    /// `side × side` elements in the x–z plane.
    Planar(usize),
}

impl ArrayLayout {
    /// Square planar array when `m` is a perfect square, otherwise a linear one.
    pub fn for_irs(m: usize) -> Self {
        let side = (m as f64).sqrt().round() as usize;
        if m > 0 && side * side == m {
            ArrayLayout::Planar(side)
        } else {
            ArrayLayout::Linear(m)
        }
    }

    pub fn len(self) -> usize {
        match self {
            ArrayLayout::Linear(n) => n,
            ArrayLayout::Planar(s) => s * s,
        }
    }

    pub fn is_empty(self) -> bool {
        self.len() == 0
    }

    /// Element offsets from the array center, meters.
    pub fn offsets(self, spacing: f64) -> Vec<Point3> {
        match self {
            ArrayLayout::Linear(n) => {
                let mid = (n as f64 - 1.0) / 2.0;
                (0..n)
                    .map(|i| Point3::new((i as f64 - mid) * spacing, 0.0, 0.0))
                    .collect()
            }
            ArrayLayout::Planar(s) => {
                let mid = (s as f64 - 1.0) / 2.0;
                (0..s * s)
                    .map(|i| {
                        let (row, col) = (i / s, i % s);
                        Point3::new((col as f64 - mid) * spacing, 0.0, (row as f64 - mid) * spacing)
                    })
                    .collect()
            }
        }
    }
}

/// Far-field array response toward unit direction `dir`: `e^{j 2π (p·dir)/λ}`.
pub fn steering_vector(offsets: &[Point3], dir: Point3, wavelength: f64) -> Vec<Cx<f64>> {
    let k = std::f64::consts::TAU / wavelength;
    offsets.iter().map(|p| Cx::from_polar(1.0, k * p.dot(dir))).collect()
}

/// System dimensions plus the propagation environment of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub antennas: usize,
    pub tiles: usize,
    pub group_sizes: Vec<usize>,
    pub geometry: GeometryConfig,
    pub budget: LinkBudget,
}

impl ScenarioConfig {
    pub fn new(antennas: usize, tiles: usize, group_sizes: Vec<usize>) -> Self {
        Self {
            antennas,
            tiles,
            group_sizes,
            geometry: GeometryConfig::default(),
            budget: LinkBudget::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.antennas == 0 {
            return Err(invalid("N", "at least one transmit antenna is required"));
        }
        if self.group_sizes.is_empty() || self.group_sizes.contains(&0) {
            return Err(invalid("group_sizes", "need at least one group, each nonempty"));
        }
        self.geometry.validate()?;
        self.budget.validate()
    }

    /// Noise-normalized channels of realization `realization`.
    pub fn generate(&self, seed: u64, realization: u64) -> Result<ChannelSet<f64>> {
        generate_channels(
            &self.geometry,
            &self.budget,
            self.antennas,
            self.tiles,
            &self.group_sizes,
            seed,
            realization,
        )
    }
}

/// Channels before noise normalization, together with the noise power.
#[derive(Debug, Clone)]
pub struct RawChannels {
    pub channels: ChannelSet<f64>,
    pub nodes: NodePositions,
    pub noise_power_w: f64,
}

impl RawChannels {
    /// Divides the user-side channels by the noise standard deviation.
    pub fn normalized(&self) -> ChannelSet<f64> {
        self.channels.scale_user_side(self.noise_power_w.sqrt().recip())
    }
}

/// Generator for realization `realization`: the ChaCha stream `realization` of `seed`.
pub fn realization_rng(seed: u64, realization: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(realization);
    rng
}

/// Rician link matrix: `amplitude · (w_los · LoS[r, c] + w_nlos · CN(0, 1))`.
pub fn rician_matrix(
    rng: &mut impl Rng,
    rows: usize,
    cols: usize,
    amplitude: f64,
    link: &LinkModel,
    los: impl Fn(usize, usize) -> Cx<f64>,
) -> CMatrix<f64> {
    let (w_los, w_nlos) = link.rician_weights();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(rows, cols, |r, c| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        let scattered = Cx::new(re * s, im * s);
        (los(r, c) * w_los + scattered * w_nlos) * amplitude
    })
}

/// Unnormalized channels of one realization.
pub fn generate_raw(
    geom: &GeometryConfig,
    budget: &LinkBudget,
    n: usize,
    m: usize,
    group_sizes: &[usize],
    seed: u64,
    realization: u64,
) -> Result<RawChannels> {
    budget.validate()?;
    let mut rng = realization_rng(seed, realization);
    let users: usize = group_sizes.iter().sum();
    let nodes = place_with(geom, users, &mut rng)?;
    let wavelength = geom.wavelength();
    let tx_offsets = ArrayLayout::Linear(n).offsets(geom.element_spacing);
    let irs_offsets = ArrayLayout::for_irs(m).offsets(geom.element_spacing);

    let d_ts = nodes.tx.distance(nodes.irs);
    let a_tx = steering_vector(&tx_offsets, nodes.tx.to(nodes.irs).unit(), wavelength);
    let a_irs = steering_vector(&irs_offsets, nodes.irs.to(nodes.tx).unit(), wavelength);
    let h_ts = rician_matrix(&mut rng, m, n, budget.tx_irs.amplitude(d_ts), &budget.tx_irs, |r, c| {
        a_irs[r] * a_tx[c]
    });

    let mut direct = Vec::with_capacity(users);
    let mut irs = Vec::with_capacity(users);
    for &p in &nodes.users {
        let d = nodes.tx.distance(p);
        let a = steering_vector(&tx_offsets, nodes.tx.to(p).unit(), wavelength);
        let row = rician_matrix(&mut rng, 1, n, budget.tx_user.amplitude(d), &budget.tx_user, |_, c| {
            a[c]
        });
        direct.push(row.as_slice().to_vec());

        let d = nodes.irs.distance(p);
        let a = steering_vector(&irs_offsets, nodes.irs.to(p).unit(), wavelength);
        let row = rician_matrix(
            &mut rng,
            1,
            m,
            budget.irs_user.amplitude(d),
            &budget.irs_user,
            |_, c| a[c],
        );
        irs.push(row.as_slice().to_vec());
    }

    let channels = ChannelSet::new(h_ts, direct, irs, group_sizes.to_vec())?;
    Ok(RawChannels {
        channels,
        nodes,
        noise_power_w: dbm_to_watts(noise_power_dbm(budget)?),
    })
}

/// Noise-normalized channels of one realization; deterministic in `(seed, realization)`.
pub fn generate_channels(
    geom: &GeometryConfig,
    budget: &LinkBudget,
    n: usize,
    m: usize,
    group_sizes: &[usize],
    seed: u64,
    realization: u64,
) -> Result<ChannelSet<f64>> {
    Ok(generate_raw(geom, budget, n, m, group_sizes, seed, realization)?.normalized())
}
