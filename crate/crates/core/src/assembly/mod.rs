//! Assembly of the stabilized cut finite element system
//! `A_h(U, V) + S_h(U, V) = L_h(V)` with a mean-value constraint on the
//! pressure.
//!
//! Every matrix entry is tagged with the [`Term`] that produced it, so single
//! contributions can be extracted, removed or compared.

mod export;
mod forms;
mod rhs;
mod stabilization;

use std::fmt;

use crate::error::{invalid, Result};
use crate::scalar::{Real, Vec2};
use crate::spaces::Discretization;
use crate::sparse::CsrMatrix;

pub use export::{write_coordinate, write_coordinate_to};
pub use forms::{assemble_boundary, assemble_mean_constraint, assemble_volume};
pub use rhs::{assemble_rhs, RhsReport};
pub use stabilization::{
    assemble_element_penalties, assemble_ghost_penalties, face_jump_coefficients,
};

/// How the pressure and stress penalties are realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PenaltyVariant {
    /// Normal-gradient jumps on faces.
    Face,
    /// Element gradients; the velocity penalty stays face based.
    Element,
}

impl fmt::Display for PenaltyVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PenaltyVariant::Face => "face",
            PenaltyVariant::Element => "element",
        })
    }
}

/// Physical and stabilization parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params<T> {
    pub eta: T,
    pub gamma_u: T,
    pub gamma_p: T,
    pub gamma_sigma: T,
    pub gamma_b: T,
    pub penalty: PenaltyVariant,
    pub volume_degree: usize,
    pub boundary_degree: usize,
    pub error_degree: usize,
}

impl<T: Real> Default for Params<T> {
    /// Values of the circle convergence study.
    fn default() -> Self {
        Self {
            eta: T::lit(0.5),
            gamma_u: T::lit(0.01),
            gamma_p: T::lit(0.1),
            gamma_sigma: T::lit(0.1),
            gamma_b: T::lit(15.0),
            penalty: PenaltyVariant::Face,
            volume_degree: 4,
            boundary_degree: 4,
            error_degree: 6,
        }
    }
}

impl<T: Real> Params<T> {
    /// Values of the sliver and conditioning studies.
    pub fn sliver() -> Self {
        Self {
            gamma_u: T::lit(0.1),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > T::zero()) {
            return invalid(format!("viscosity must be positive, got {}", self.eta));
        }
        if !(self.gamma_b > T::zero()) {
            return invalid(format!("gamma_b must be positive, got {}", self.gamma_b));
        }
        for (name, v) in [
            ("gamma_u", self.gamma_u),
            ("gamma_p", self.gamma_p),
            ("gamma_sigma", self.gamma_sigma),
        ] {
            if !(v >= T::zero()) || !v.is_finite() {
                return invalid(format!("{name} must be non-negative, got {v}"));
            }
        }
        for (name, d) in [
            ("volume_degree", self.volume_degree),
            ("boundary_degree", self.boundary_degree),
            ("error_degree", self.error_degree),
        ] {
            if !(2..=6).contains(&d) {
                return invalid(format!("{name} must be in 2..=6, got {d}"));
            }
        }
        Ok(())
    }
}

/// Origin of a matrix entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    /// `(1/2 eta) (sigma, tau)` on the physical domain.
    StressMass,
    /// `(sigma, eps(v)) - (tau, eps(u))` on the physical domain.
    StressVelocity,
    /// `-(p, div v) + (q, div u)` on the physical domain.
    PressureVelocity,
    /// `-<sigma n, v> + <tau n, u>` on the boundary.
    BoundaryStress,
    /// `<p n, v> - <q n, u>` on the boundary.
    BoundaryPressure,
    /// `(gamma_b eta / h) <u, v>` on the boundary.
    Nitsche,
    VelocityPenalty,
    PressurePenalty,
    StressPenalty,
    MeanConstraint,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Entry<T> {
    pub row: usize,
    pub col: usize,
    pub value: T,
    pub term: Term,
}

/// Tagged triplet list and load vector.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem<T> {
    /// Current dimension; grows by one when the mean constraint is added.
    pub n: usize,
    pub entries: Vec<Entry<T>>,
    pub rhs: Vec<T>,
}

impl<T: Real> LinearSystem<T> {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            entries: Vec::new(),
            rhs: vec![T::zero(); n],
        }
    }

    #[inline]
    pub(crate) fn push(&mut self, term: Term, row: usize, col: usize, value: T) {
        self.entries.push(Entry {
            row,
            col,
            value,
            term,
        });
    }

    pub fn has_mean_constraint(&self) -> bool {
        self.entries.iter().any(|e| e.term == Term::MeanConstraint)
    }

    /// Compressed matrix summing all terms in accumulation order.
    pub fn matrix(&self) -> CsrMatrix<T> {
        CsrMatrix::from_triplets(self.n, self.entries.iter().map(|e| (e.row, e.col, e.value)))
    }

    /// Compressed matrix of the selected terms only.
    pub fn matrix_of(&self, terms: &[Term]) -> CsrMatrix<T> {
        CsrMatrix::from_triplets(
            self.n,
            self.entries
                .iter()
                .filter(|e| terms.contains(&e.term))
                .map(|e| (e.row, e.col, e.value)),
        )
    }

    /// Entries of one term in accumulation order.
    pub fn term_entries(&self, term: Term) -> Vec<Entry<T>> {
        self.entries
            .iter()
            .filter(|e| e.term == term)
            .copied()
            .collect()
    }

    /// Copy without the given term.
    pub fn without(&self, term: Term) -> Self {
        let mut out = self.clone();
        out.entries.retain(|e| e.term != term);
        out
    }

    /// Copy without the pressure mean constraint (and its extra unknown).
    pub fn without_mean_constraint(&self) -> Self {
        if !self.has_mean_constraint() {
            return self.clone();
        }
        let mut out = self.without(Term::MeanConstraint);
        out.n -= 1;
        out.rhs.truncate(out.n);
        out
    }
}

/// Full system for the given data: matrix, load vector and mean constraint.
pub fn assemble_system<T: Real>(
    disc: &Discretization<T>,
    params: &Params<T>,
    body_force: impl Fn(Vec2<T>) -> Vec2<T>,
    boundary_data: impl Fn(Vec2<T>) -> Vec2<T>,
) -> Result<(LinearSystem<T>, RhsReport<T>)> {
    let mut sys = assemble_operator(disc, params)?;
    assemble_mean_constraint(disc, params, &mut sys)?;
    let report = assemble_rhs(disc, params, body_force, boundary_data, &mut sys)?;
    Ok((sys, report))
}

/// `A_h + S_h` without the mean constraint; the load vector is zero.
pub fn assemble_operator<T: Real>(
    disc: &Discretization<T>,
    params: &Params<T>,
) -> Result<LinearSystem<T>> {
    params.validate()?;
    let mut sys = LinearSystem::new(disc.num_dofs() - 1);
    assemble_volume(disc, params, &mut sys)?;
    assemble_boundary(disc, params, &mut sys)?;
    assemble_ghost_penalties(disc, params, &mut sys);
    if params.penalty == PenaltyVariant::Element {
        assemble_element_penalties(disc, params, &mut sys);
    }
    Ok(sys)
}

#[cfg(test)]
mod tests;
