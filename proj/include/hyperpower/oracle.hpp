#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hyperpower/dense.hpp"
#include "hyperpower/solver.hpp"

namespace hyperpower {

/// Spectral-side view of one coefficient solve: the (sorted) eigenvalues it
/// was computed from and the resulting (alpha, beta). degenerate mirrors the
/// Gram fallback: the spectral denominator D vanished, so (0, 1) was used.
struct SpectrumDiag {
    std::vector<double> eigenvalues;
    double alpha = 0.0;
    double beta = 1.0;
    bool degenerate = true;
};

/// One named invariant check. `worst` is the largest measured magnitude of
/// the checked quantity, compared against `tol` (which already includes any
/// per-step scale factor at the worst step); ratio = worst/tol. A check that
/// never fired (gates excluded every step) passes with applied = 0.
struct InvariantCheck {
    std::string name;
    double worst = 0.0;
    double tol = 0.0;
    double ratio = 0.0;
    bool pass = true;
    std::size_t worst_iteration = 0;
    std::size_t applied = 0;  ///< number of steps the check actually tested
};

struct InvariantReport {
    std::vector<InvariantCheck> checks;

    bool all_pass() const {
        for (const InvariantCheck& c : checks) {
            if (!c.pass) return false;
        }
        return true;
    }
    const InvariantCheck* find(const std::string& name) const {
        for (const InvariantCheck& c : checks) {
            if (c.name == name) return &c;
        }
        return nullptr;
    }
};

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, sorted
/// ascending. Stops when the off-diagonal Frobenius norm drops below
/// tol*||S||_F; throws if the input is measurably asymmetric or 100 sweeps
/// do not suffice. Self-contained on purpose: the oracle must not share code
/// with the computation path it verifies.
std::vector<double> jacobi_eigenvalues(const RealMatrix& s, double tol = 1e-12);

/// (alpha, beta) from the eigenvalue-pair sums
///   alpha = -sum_{i<j} (1-li)(1-lj)(li+lj)(lj-li)^2 / D,
///   beta  =  sum_{i<j} (1-li)(1-lj)(li-lj)^2 / D,
///   D     =  sum_{i<j} (1-li)^2 (1-lj)^2 (lj-li)^2,
/// with the degenerate branch (0, 1) when D < 1e-12*(sum (1-li)^2)^2.
SpectrumDiag coeffs_from_spectrum(const std::vector<double>& lams);

/// Matrix-free twin of the SSHP2 run: evolves a spectrum by
/// l <- 1-(alpha+beta) + alpha*l + beta*l^2 with (alpha, beta) from
/// coeffs_from_spectrum each step. Entry k holds the coefficients applied at
/// step k and the (sorted) spectrum after that step.
std::vector<SpectrumDiag> scalar_recurrence(const std::vector<double>& lams0,
                                            std::size_t steps);

/// Re-runs the iteration that produced `report` (replaying the recorded
/// coefficients, which reproduces the trajectory bit for bit) and evaluates
/// every solver-module invariant, plus the spectral-bound and
/// numerator-identity checks when the input is symmetric and with_spectral
/// is set. Requires a recorded trace.
InvariantReport check_invariants(const RealSolveReport& report, const RealMatrix& a,
                                 bool with_spectral = true);

}  // namespace hyperpower
