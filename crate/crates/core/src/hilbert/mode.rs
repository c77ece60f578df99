use std::fmt;

/// Photon polarization in the receiver's (or source's) H/V basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarization {
    H,
    V,
}

impl Polarization {
    pub const ALL: [Polarization; 2] = [Polarization::H, Polarization::V];

    pub fn flipped(self) -> Self {
        match self {
            Polarization::H => Polarization::V,
            Polarization::V => Polarization::H,
        }
    }
}

/// Arrival slot in units of the interferometer delay `T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TimeBin(u8);

impl TimeBin {
    /// Latest slot any implemented protocol can reach (one sender and one receiver delay).
    pub const MAX: TimeBin = TimeBin(2);
    pub const ZERO: TimeBin = TimeBin(0);
    pub const ONE: TimeBin = TimeBin(1);
    pub const ALL: [TimeBin; 3] = [TimeBin(0), TimeBin(1), TimeBin(2)];

    /// `None` if `ticks` exceeds [`TimeBin::MAX`].
    pub fn new(ticks: u8) -> Option<Self> {
        (ticks <= Self::MAX.0).then_some(TimeBin(ticks))
    }

    pub fn ticks(self) -> u8 {
        self.0
    }

    /// One slot later, or `None` on overflow past [`TimeBin::MAX`].
    pub fn delayed(self) -> Option<Self> {
        Self::new(self.0 + 1)
    }
}

/// Output port of the active decoder. Photons that never meet one stay on `Path2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PathLabel {
    Path1,
    Path2,
}

impl PathLabel {
    pub const DEFAULT: PathLabel = PathLabel::Path2;
    pub const ALL: [PathLabel; 2] = [PathLabel::Path1, PathLabel::Path2];

    pub fn digit(self) -> char {
        match self {
            PathLabel::Path1 => '1',
            PathLabel::Path2 => '2',
        }
    }
}

/// Full single-photon label. Field order fixes the canonical ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PhotonMode {
    pub pol: Polarization,
    pub bin: TimeBin,
    pub path: PathLabel,
}

impl PhotonMode {
    pub const fn new(pol: Polarization, bin: TimeBin, path: PathLabel) -> Self {
        Self { pol, bin, path }
    }

    /// Fresh photon from the source: bin 0, default path.
    pub const fn source(pol: Polarization) -> Self {
        Self::new(pol, TimeBin::ZERO, PathLabel::DEFAULT)
    }

    /// All 12 single-photon modes in canonical order.
    pub fn all() -> impl Iterator<Item = PhotonMode> {
        Polarization::ALL.into_iter().flat_map(|pol| {
            TimeBin::ALL.into_iter().flat_map(move |bin| {
                PathLabel::ALL
                    .into_iter()
                    .map(move |path| PhotonMode::new(pol, bin, path))
            })
        })
    }

    pub fn with_pol(self, pol: Polarization) -> Self {
        Self { pol, ..self }
    }

    pub fn with_bin(self, bin: TimeBin) -> Self {
        Self { bin, ..self }
    }

    pub fn with_path(self, path: PathLabel) -> Self {
        Self { path, ..self }
    }
}

impl fmt::Display for PhotonMode {
    /// `H`, `V_T`, `H_TT`, followed by `^1`/`^2` for the path.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pol = match self.pol {
            Polarization::H => "H",
            Polarization::V => "V",
        };
        f.write_str(pol)?;
        if self.bin.ticks() > 0 {
            f.write_str("_")?;
            for _ in 0..self.bin.ticks() {
                f.write_str("T")?;
            }
        }
        write!(f, "^{}", self.path.digit())
    }
}

/// N-photon product ket; photon `i` belongs to party `i`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisKet(Vec<PhotonMode>);

impl BasisKet {
    pub fn new(modes: Vec<PhotonMode>) -> Self {
        Self(modes)
    }

    /// Every photon in the same mode.
    pub fn uniform(n: usize, mode: PhotonMode) -> Self {
        Self(vec![mode; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn modes(&self) -> &[PhotonMode] {
        &self.0
    }

    pub fn mode(&self, photon: usize) -> PhotonMode {
        self.0[photon]
    }

    pub fn with_mode(&self, photon: usize, mode: PhotonMode) -> Self {
        let mut modes = self.0.clone();
        modes[photon] = mode;
        Self(modes)
    }

    pub fn polarizations(&self) -> Vec<Polarization> {
        self.0.iter().map(|m| m.pol).collect()
    }

    pub fn bins(&self) -> Vec<TimeBin> {
        self.0.iter().map(|m| m.bin).collect()
    }

    pub fn paths(&self) -> Vec<PathLabel> {
        self.0.iter().map(|m| m.path).collect()
    }
}

impl FromIterator<PhotonMode> for BasisKet {
    fn from_iter<I: IntoIterator<Item = PhotonMode>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl fmt::Display for BasisKet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("|")?;
        for (i, m) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{m}")?;
        }
        f.write_str(">")
    }
}
