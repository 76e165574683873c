//! Dense finite-difference assembly of the target Hamiltonian
//! H = -mu^2 d^2/dx^2 - 2 mu mu' d/dx + V_tilde, the constant-mass
//! reference operator -d^2/dq^2 + V_tilde_eff, and the intertwiners
//! eta1 = -i [mu d/dx + mu'/2] + F and eta2 = i eta1, all on a uniform
//! interior grid with Dirichlet boundaries.

use crate::maps::{MapError, MassProfile};
use crate::potentials::{ComplexPotential, PotentialError, VarTag};
use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Clone, Debug, Error)]
pub enum DiscretizeError {
    #[error("bad grid: {0}")]
    BadGrid(String),
    #[error("potential is in {found:?} but the operator needs {expected:?}")]
    WrongVariable { expected: VarTag, found: VarTag },
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Map(#[from] MapError),
}

/// Uniform grid of N interior points on [a, b] with Dirichlet ends.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    a: f64,
    b: f64,
    n: usize,
}

impl GridSpec {
    pub fn new(a: f64, b: f64, n: usize) -> Result<GridSpec, DiscretizeError> {
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(DiscretizeError::BadGrid(format!(
                "interval [{a}, {b}] is not a finite increasing interval"
            )));
        }
        if n < 16 {
            return Err(DiscretizeError::BadGrid(format!(
                "need at least 16 interior points, got {n}"
            )));
        }
        Ok(GridSpec { a, b, n })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        (self.b - self.a) / (self.n + 1) as f64
    }

    /// Interior node x_i = a + i h, i = 1..N.
    pub fn point(&self, i: usize) -> f64 {
        self.a + (i + 1) as f64 * self.h()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.point(i)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorKind {
    HTarget,
    HReference,
    Eta1,
    Eta2,
}

/// Dense complex operator matrix with its grid metadata.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    data: DMatrix<Complex64>,
    kind: OperatorKind,
    grid: GridSpec,
}

impl OperatorMatrix {
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }
}

/// Reference operator in q: tridiagonal
/// -(phi_{i+1} - 2 phi_i + phi_{i-1})/h^2 + V(q_i) phi_i.
pub fn assemble_reference(
    pot: &ComplexPotential,
    grid: &GridSpec,
) -> Result<OperatorMatrix, DiscretizeError> {
    if pot.var() != VarTag::Q {
        return Err(DiscretizeError::WrongVariable {
            expected: VarTag::Q,
            found: pot.var(),
        });
    }
    let n = grid.n();
    let h2 = grid.h() * grid.h();
    let mut data = DMatrix::zeros(n, n);
    for i in 0..n {
        let q = grid.point(i);
        data[(i, i)] = Complex64::new(2.0 / h2, 0.0) + pot.eval(q)?;
        if i + 1 < n {
            data[(i, i + 1)] = Complex64::new(-1.0 / h2, 0.0);
            data[(i + 1, i)] = Complex64::new(-1.0 / h2, 0.0);
        }
    }
    Ok(OperatorMatrix {
        data,
        kind: OperatorKind::HReference,
        grid: *grid,
    })
}

/// Target PDM operator in x with central differences:
/// -mu_i^2 (psi_{i+1} - 2 psi_i + psi_{i-1})/h^2
///   - 2 mu_i mu'_i (psi_{i+1} - psi_{i-1})/(2h) + V_tilde_i psi_i.
pub fn assemble_target(
    p: &MassProfile,
    pot: &ComplexPotential,
    grid: &GridSpec,
) -> Result<OperatorMatrix, DiscretizeError> {
    if pot.var() != VarTag::X {
        return Err(DiscretizeError::WrongVariable {
            expected: VarTag::X,
            found: pot.var(),
        });
    }
    let n = grid.n();
    let h = grid.h();
    let h2 = h * h;
    let mut data = DMatrix::zeros(n, n);
    for i in 0..n {
        let x = grid.point(i);
        let (mu, mu1, _) = p.mu_d(x)?;
        data[(i, i)] = Complex64::new(2.0 * mu * mu / h2, 0.0) + pot.eval(x)?;
        if i + 1 < n {
            data[(i, i + 1)] = Complex64::new(-mu * mu / h2 - mu * mu1 / h, 0.0);
        }
        if i > 0 {
            data[(i, i - 1)] = Complex64::new(-mu * mu / h2 + mu * mu1 / h, 0.0);
        }
    }
    Ok(OperatorMatrix {
        data,
        kind: OperatorKind::HTarget,
        grid: *grid,
    })
}

/// eta1 = -i [mu_i (psi_{i+1} - psi_{i-1})/(2h) + (mu'_i/2) psi_i] + F_i psi_i,
/// with F given as an evaluator in x.
pub fn assemble_eta1<F>(
    p: &MassProfile,
    f_of_x: F,
    grid: &GridSpec,
) -> Result<OperatorMatrix, DiscretizeError>
where
    F: Fn(f64) -> Result<f64, PotentialError>,
{
    let n = grid.n();
    let h = grid.h();
    let mut data = DMatrix::zeros(n, n);
    for i in 0..n {
        let x = grid.point(i);
        let (mu, mu1, _) = p.mu_d(x)?;
        data[(i, i)] = Complex64::new(f_of_x(x)?, -mu1 / 2.0);
        if i + 1 < n {
            data[(i, i + 1)] = Complex64::new(0.0, -mu / (2.0 * h));
        }
        if i > 0 {
            data[(i, i - 1)] = Complex64::new(0.0, mu / (2.0 * h));
        }
    }
    Ok(OperatorMatrix {
        data,
        kind: OperatorKind::Eta1,
        grid: *grid,
    })
}

/// eta2 = i eta1, entrywise.
pub fn assemble_eta2<F>(
    p: &MassProfile,
    f_of_x: F,
    grid: &GridSpec,
) -> Result<OperatorMatrix, DiscretizeError>
where
    F: Fn(f64) -> Result<f64, PotentialError>,
{
    let eta1 = assemble_eta1(p, f_of_x, grid)?;
    Ok(OperatorMatrix {
        data: eta1.data.map(|z| Complex64::new(0.0, 1.0) * z),
        kind: OperatorKind::Eta2,
        grid: eta1.grid,
    })
}

/// Conjugate transpose; kind and grid metadata are preserved.
pub fn adjoint(mat: &OperatorMatrix) -> OperatorMatrix {
    OperatorMatrix {
        data: mat.data.adjoint(),
        kind: mat.kind,
        grid: mat.grid,
    }
}
