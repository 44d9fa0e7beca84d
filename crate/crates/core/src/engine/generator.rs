use nalgebra::SMatrix;
use num_complex::Complex64 as C64;

use super::state::{flat_index, DIM, LEN};
use crate::error::{rate, Result};
use crate::model::{AtomModel, DecayChannels, DriveConfig, ModelKind};

pub type Mat16 = SMatrix<C64, LEN, LEN>;

/// The counting-field generator `A(s) = A₀ + s·A₁` acting on the
/// column-major flattened generating function.
///
/// `A₁` holds only the photon-emission gain terms feeding `G₁₁`; the
/// `G₂₂` gain is not counted and lives in `A₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorPair {
    a0: Mat16,
    a1: Mat16,
    sparse0: Vec<(usize, usize, C64)>,
    sparse1: Vec<(usize, usize, C64)>,
}

impl GeneratorPair {
    pub fn from_dense(a0: Mat16, a1: Mat16) -> Self {
        let sparse0 = nonzeros(&a0);
        let sparse1 = nonzeros(&a1);
        GeneratorPair {
            a0,
            a1,
            sparse0,
            sparse1,
        }
    }

    pub fn a0(&self) -> &Mat16 {
        &self.a0
    }

    pub fn a1(&self) -> &Mat16 {
        &self.a1
    }

    pub fn total(&self, s: f64) -> Mat16 {
        self.a0 + self.a1 * C64::new(s, 0.0)
    }

    /// `out = A₀·g`
    #[inline]
    pub fn apply_a0(&self, g: &[C64], out: &mut [C64]) {
        out[..LEN].fill(C64::new(0.0, 0.0));
        for &(r, c, v) in &self.sparse0 {
            out[r] += v * g[c];
        }
    }

    /// `out += factor·A₁·g`
    #[inline]
    pub fn add_a1(&self, factor: f64, g: &[C64], out: &mut [C64]) {
        for &(r, c, v) in &self.sparse1 {
            out[r] += v * g[c] * factor;
        }
    }

    /// `out = A(s)·g`
    #[inline]
    pub fn apply(&self, s: f64, g: &[C64], out: &mut [C64]) {
        self.apply_a0(g, out);
        if s != 0.0 {
            self.add_a1(s, g, out);
        }
    }

    /// Largest entry magnitude; sets the time scale of the dynamics.
    pub fn max_frequency(&self) -> f64 {
        self.sparse0
            .iter()
            .chain(&self.sparse1)
            .map(|&(_, _, v)| v.norm())
            .fold(0.0, f64::max)
    }

    /// Number of structurally nonzero entries of `A₁`.
    pub fn a1_nonzeros(&self) -> usize {
        self.sparse1.len()
    }
}

fn nonzeros(m: &Mat16) -> Vec<(usize, usize, C64)> {
    let mut out = Vec::new();
    for r in 0..LEN {
        for c in 0..LEN {
            let v = m[(r, c)];
            if v != C64::new(0.0, 0.0) {
                out.push((r, c, v));
            }
        }
    }
    out
}

/// Rotating-frame description of a four-level scheme: level energies, the
/// symmetric Rabi matrix, and the decay kernels into |1⟩ (counted) and |2⟩.
/// Kernels are indexed by the upper levels (|3⟩, |4⟩).
struct Scheme {
    energies: [f64; DIM],
    rabi: [[f64; DIM]; DIM],
    gain1: [[f64; 2]; 2],
    gain2: [[f64; 2]; 2],
}

impl Scheme {
    fn new(kind: ModelKind, ch: &DecayChannels, omega: f64, d: &DriveConfig) -> Self {
        let mut rabi = [[0.0; DIM]; DIM];
        let mut set = |i: usize, j: usize, v: f64| {
            rabi[i - 1][j - 1] = v;
            rabi[j - 1][i - 1] = v;
        };
        let energies = match kind {
            ModelKind::DoubleLambda => {
                set(1, 3, d.omega_p);
                set(1, 4, d.omega_p);
                set(2, 3, d.omega_c);
                set(2, 4, d.omega_c);
                [0.0, d.delta_c - d.delta_p, -d.delta_p, omega - d.delta_p]
            }
            ModelKind::NType => {
                set(1, 3, d.omega_p);
                set(2, 3, d.omega_c);
                set(2, 4, d.omega_s);
                [
                    0.0,
                    d.delta_c - d.delta_p,
                    -d.delta_p,
                    d.delta_c - d.delta_p - d.delta_s,
                ]
            }
        };
        Scheme {
            energies,
            rabi,
            gain1: [[ch.gamma31, ch.gamma314], [ch.gamma314, ch.gamma41]],
            gain2: [[ch.gamma32, ch.gamma324], [ch.gamma324, ch.gamma42]],
        }
    }

    /// Relaxation kernel `K_km = Σ_i γ_kiim` over lower levels i.
    fn relaxation(&self) -> [[f64; DIM]; DIM] {
        let mut k = [[0.0; DIM]; DIM];
        for a in 0..2 {
            for b in 0..2 {
                k[a + 2][b + 2] = self.gain1[a][b] + self.gain2[a][b];
            }
        }
        k
    }

    /// Transcribes
    /// `dG_ij = −i(e_i − e_j)G_ij − (i/2)[GΩ − ΩG]_ij − [KG + GK]_ij
    ///          + 2 s_i δ_ij Σ_kl γ_kiil G_kl`
    /// with `s₁ = s` and `s₂ = 1`.
    fn assemble(&self) -> GeneratorPair {
        let mut a0 = Mat16::zeros();
        let mut a1 = Mat16::zeros();
        let k = self.relaxation();
        let half_i = C64::new(0.0, 0.5);
        for j in 0..DIM {
            for i in 0..DIM {
                let r = flat_index(i, j);
                a0[(r, r)] += C64::new(0.0, -(self.energies[i] - self.energies[j]));
                for m in 0..DIM {
                    a0[(r, flat_index(i, m))] -= half_i * self.rabi[m][j];
                    a0[(r, flat_index(m, j))] += half_i * self.rabi[i][m];
                    a0[(r, flat_index(m, j))] -= k[i][m];
                    a0[(r, flat_index(i, m))] -= k[m][j];
                }
            }
        }
        for a in 0..2 {
            for b in 0..2 {
                let c = flat_index(a + 2, b + 2);
                a1[(flat_index(0, 0), c)] += 2.0 * self.gain1[a][b];
                a0[(flat_index(1, 1), c)] += 2.0 * self.gain2[a][b];
            }
        }
        GeneratorPair::from_dense(a0, a1)
    }
}

/// Builds `(A₀, A₁)` for the model's level scheme under the given drive.
pub fn assemble_generators(model: &AtomModel, drive: &DriveConfig) -> Result<GeneratorPair> {
    assemble_from_channels(model.kind(), &model.channels(), model.omega(), drive)
}

/// As [`assemble_generators`], with every decay constant (cross terms
/// included) supplied directly.
pub fn assemble_from_channels(
    kind: ModelKind,
    channels: &DecayChannels,
    omega: f64,
    drive: &DriveConfig,
) -> Result<GeneratorPair> {
    rate("gamma31", channels.gamma31)?;
    rate("gamma32", channels.gamma32)?;
    rate("gamma41", channels.gamma41)?;
    rate("gamma42", channels.gamma42)?;
    rate("gamma314", channels.gamma314)?;
    rate("gamma324", channels.gamma324)?;
    crate::error::finite("omega", omega)?;
    drive.validate()?;
    Ok(Scheme::new(kind, channels, omega, drive).assemble())
}
