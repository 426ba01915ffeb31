#pragma once

// Post-processing: eigenenergy surface grids, the delayed-Gaussian
// adiabaticity inequality, fidelities, reduced density matrices and
// entanglement measures.

#include <Eigen/Dense>

#include <utility>
#include <vector>

#include "scrap/errors.hpp"
#include "scrap/joint_state.hpp"

namespace scrap {

// Eigenenergies over the (G, S) plane in units of the static detuning
// (delta = 1). e_plus(i, j) belongs to g_axis(i), s_axis(j).
struct SurfaceGrid {
    Eigen::VectorXd g_axis;
    Eigen::VectorXd s_axis;
    Eigen::MatrixXd e_plus;
    Eigen::MatrixXd e_minus;
};

SurfaceGrid surface_grid(std::pair<double, double> g_range,
                         std::pair<double, double> s_range, int resolution);

// exp(-8 tau^2/T_C^2)  <<  (delta/(G0^2 T_S)) sqrt(ln(S0/delta))  <<  1,
// with "<<" read as a factor of margin_factor.
struct AdiabaticityReport {
    double left_term = 0.0;
    double middle_term = 0.0;
    double margin_lower = 0.0;  // middle/left
    double margin_upper = 0.0;  // 1/middle
    double margin_factor = 0.0;
    bool satisfied = false;
};

AdiabaticityReport check_adiabaticity(const PulseSchedule& sched, const SystemParams& sys,
                                      double margin_factor = 10.0);

// |<a|b>|^2 for normalized states.
double fidelity(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b);

// Fidelity maximized over one relative phase applied to the masked
// components of b: (|sum_masked conj(a_i) b_i| + |sum_rest conj(a_i) b_i|)^2.
double fidelity(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b,
                const std::vector<bool>& phase_mask);

// Reduced density matrix over the kept sites (ascending site order in the
// selector defines the row bit order). Trace equals the squared norm.
Eigen::MatrixXcd partial_trace(const JointState& state, const std::vector<int>& keep_sites);

// Wootters concurrence of a two-qubit density matrix.
double concurrence(const Eigen::Matrix4cd& rho);

// Von Neumann entropy in bits, -sum lambda log2 lambda.
double entanglement_entropy(const Eigen::MatrixXcd& rho);

}  // namespace scrap
