//! Frozen solver states and their binary encoding.
//!
//! Layout, little-endian throughout:
//! `b"RVN1"`, `u32` x side, `u32` v side, `u32` 3, `u32` 3, `f64` L,
//! `f64` V, `f64` t, `u8` mass flag (0 massless, 1 unit mass), then `f`
//! with the velocity index running fastest, then `φ`, then `∂_tφ`.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Result, RvnError};
use crate::lpfourier::Grid3;
use crate::profiles::{to_profile, DistributionGrid, Representation, VGrid, WaveState};

const MAGIC: &[u8; 4] = b"RVN1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub t: f64,
    pub mass: f64,
    pub f: DistributionGrid,
    pub wave: WaveState,
    /// Cached `g = to_profile(f, t)`; never serialized.
    #[serde(skip)]
    pub profile: Option<DistributionGrid>,
}

impl Snapshot {
    pub fn new(t: f64, mass: f64, f: DistributionGrid, wave: WaveState) -> Snapshot {
        Snapshot { t, mass, f, wave, profile: None }
    }

    /// The profile at the snapshot time, computed on first use.
    pub fn profile(&mut self) -> &DistributionGrid {
        if self.profile.is_none() {
            self.profile = Some(to_profile(&self.f, self.t));
        }
        self.profile.as_ref().expect("profile cached above")
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        let (nx, nv) = cubic_sides(&self.f)?;
        let flag: u8 = if self.mass == 0.0 {
            0
        } else if self.mass == 1.0 {
            1
        } else {
            return Err(RvnError::Format(format!("mass {} has no header flag", self.mass)));
        };
        w.write_all(MAGIC)?;
        for d in [nx as u32, nv as u32, 3, 3] {
            w.write_all(&d.to_le_bytes())?;
        }
        for x in [self.f.x.half_length, self.f.v.half_width, self.t] {
            w.write_all(&x.to_le_bytes())?;
        }
        w.write_all(&[flag])?;
        let (nxl, nvl) = (self.f.x.len(), self.f.v.len());
        let mut buf = Vec::with_capacity(8 * nvl);
        for ix in 0..nxl {
            buf.clear();
            for iv in 0..nvl {
                buf.extend_from_slice(&self.f.at(ix, iv).to_le_bytes());
            }
            w.write_all(&buf)?;
        }
        for field in [self.wave.phi(), self.wave.dphi()] {
            for v in field {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Snapshot> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(RvnError::Format(format!("bad magic {magic:?}")));
        }
        let mut dims = [0u32; 4];
        for d in dims.iter_mut() {
            *d = read_u32(&mut r)?;
        }
        if dims[2] != 3 || dims[3] != 3 || dims[0] == 0 || dims[1] == 0 {
            return Err(RvnError::Format(format!("unsupported dimensions {dims:?}")));
        }
        let (l, v, t) = (read_f64(&mut r)?, read_f64(&mut r)?, read_f64(&mut r)?);
        let mut flag = [0u8; 1];
        r.read_exact(&mut flag)?;
        let mass = match flag[0] {
            0 => 0.0,
            1 => 1.0,
            other => return Err(RvnError::Format(format!("unknown mass flag {other}"))),
        };
        let xg = Grid3::cube(dims[0] as usize, l)?;
        let vg = VGrid::cube(dims[1] as usize, v)?;
        let (nxl, nvl) = (xg.len(), vg.len());
        let mut f = DistributionGrid::zeros(xg, vg, Representation::Physical);
        for ix in 0..nxl {
            for iv in 0..nvl {
                f.data[iv * nxl + ix] = read_f64(&mut r)?;
            }
        }
        let mut phi = vec![0.0; nxl];
        let mut dphi = vec![0.0; nxl];
        for x in phi.iter_mut().chain(dphi.iter_mut()) {
            *x = read_f64(&mut r)?;
        }
        let wave = WaveState::from_physical(xg, t, &phi, &dphi)?;
        Ok(Snapshot::new(t, mass, f, wave))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_to(std::io::BufWriter::new(file))
    }

    pub fn load(path: &Path) -> Result<Snapshot> {
        let file = std::fs::File::open(path)?;
        Snapshot::read_from(std::io::BufReader::new(file))
    }
}

fn cubic_sides(f: &DistributionGrid) -> Result<(usize, usize)> {
    let [a, b, c] = f.x.n;
    let [p, q, s] = f.v.n;
    if a != b || b != c || p != q || q != s {
        return Err(RvnError::Format("snapshot encoding needs cubic grids".into()));
    }
    Ok((a, p))
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}
