#pragma once

#include "mrpoisson/assembly.hpp"
#include "mrpoisson/linalg.hpp"

#include <array>
#include <span>
#include <vector>

namespace mrpoisson {

/// Closed-form SP3 coefficients; index 0 is the "+" branch.
struct Sp3Constants {
    std::array<double, 2> kappa;
    std::array<double, 2> alpha;
    std::array<double, 2> beta;
    std::array<double, 2> gamma;

    [[nodiscard]] static Sp3Constants standard();
};

/// Absorption data of one effective wavelength, in cm^-1 Torr^-1.
struct PhotoGroup {
    double a = 0.0;
    double lambda = 0.0;
};

/// The three-group fit of air.
[[nodiscard]] std::array<PhotoGroup, 3> three_group_parameters();

/// Pressures in Torr, c in cm/s.
struct PhysicalParams {
    double p_o2 = 150.0;
    double p = 760.0;
    double p_q = 30.0;
    double xi = 0.1;
    double c = 2.99792458e10;

    [[nodiscard]] double quenching() const { return p_q / (p + p_q); }
    void validate() const;
};

enum class Sp3Boundary : std::uint8_t { neumann, robin };

struct Sp3Options {
    Sp3Boundary boundary = Sp3Boundary::robin;
    int max_corrections = 3;
    double update_tol = 1e-6;
    SolverConfig solver{SolverMethod::bicgstab, 1e-10, 1e-300, 20000, Preconditioner::jacobi, 1, 8192};
};

struct GroupSolution {
    std::vector<double> phi1;
    std::vector<double> phi2;
    /// Coupling corrections performed after the uncoupled first pass.
    int iterations = 0;
    /// Relative l2 update of (phi1, phi2) per correction.
    std::vector<double> updates;
    std::vector<SolveReport> reports;
};

/// Screened-Poisson pair of one group:
///   lap(phi_n) - (lambda p_O2 / kappa_n)^2 phi_n = -(lambda p_O2 / kappa_n^2) q S
/// with q the quenching factor and S the per-leaf source. With Robin
/// boundaries the pair is first solved uncoupled, then corrected with the
/// lagged cross terms (phi_1 first, phi_2 with the updated phi_1).
[[nodiscard]] GroupSolution sp3_solve_group(const Forest& forest, const LeafMap& leaves, const PhotoGroup& group,
                                            const PhysicalParams& params, std::span<const double> source,
                                            const Sp3Options& options = {});

/// Psi = (gamma_2 phi_1 - gamma_1 phi_2) / (gamma_2 - gamma_1).
[[nodiscard]] std::vector<double> photon_isotropic(std::span<const double> phi1, std::span<const double> phi2);

/// S_ph = sum_l A_l xi p_O2 c Psi_l.
[[nodiscard]] std::vector<double> photo_source(std::span<const std::vector<double>> psi,
                                               std::span<const PhotoGroup> groups, const PhysicalParams& params);

} // namespace mrpoisson
