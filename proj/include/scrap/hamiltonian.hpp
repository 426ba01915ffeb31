#pragma once

// Effective two-level Hamiltonian on the single-excitation subspace
// spanned by (|+,0>, |-,1>), its closed-form eigensystem and the
// rotating-wave sanity check.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "scrap/pulses.hpp"

namespace scrap {

using Complex = std::complex<double>;

struct HamiltonianSample {
    Eigen::Matrix2cd matrix;  // ordered basis (|+,0>, |-,1>)
    double g = 0.0;           // instantaneous coupling G(t) [1/T]
    double s = 0.0;           // instantaneous Stark shift S(t) <= 0 [1/T]
    double delta_eff = 0.0;   // Delta(t) = delta + S(t) [1/T]

    bool damped() const { return matrix(1, 1).imag() != 0.0; }
};

struct EigenSample {
    double e_plus = 0.0;
    double e_minus = 0.0;
    // Mixing angle 0.5*atan(G/Delta) on the branch (-pi/4, pi/4], pi/4 at
    // Delta = 0. Diagnostic only; dynamics and tracking use the eigenvectors.
    double theta = 0.0;
    Eigen::Vector2cd v_plus;
    Eigen::Vector2cd v_minus;
};

// H(t) = [[Delta(t), G(t)], [G(t), 0]]; cavity damping enters as a
// non-Hermitian -i/t_cav on the |-,1> diagonal and nowhere else.
inline HamiltonianSample sample_hamiltonian(const PulseSchedule& sched,
                                            const SystemParams& sys, double t) {
    HamiltonianSample h;
    h.g = cavity_rabi(sched, t);
    h.s = stark_shift(sched, t);
    h.delta_eff = sys.delta + h.s;
    h.matrix << Complex(h.delta_eff, 0.0), Complex(h.g, 0.0),
                Complex(h.g, 0.0), Complex(0.0, 0.0);
    if (sys.t_cav) h.matrix(1, 1) = Complex(0.0, -1.0 / *sys.t_cav);
    return h;
}

// Closed-form eigensystem E_± = (Delta ± sqrt(Delta^2 + 4G^2))/2 of a
// lossless sample. Eigenvectors are exact: v_+ ∝ (E_+, G), v_- ∝ (-G, E_+).
inline EigenSample eigensystem(const HamiltonianSample& h) {
    if (h.damped())
        throw std::invalid_argument("eigensystem: damped (non-Hermitian) sample");

    EigenSample e;
    const double g = h.g;
    const double d = h.delta_eff;
    const double root = std::hypot(d, 2.0 * g);
    e.e_plus = 0.5 * (d + root);
    e.e_minus = 0.5 * (d - root);
    e.theta = d != 0.0 ? 0.5 * std::atan(g / d)
                       : (g > 0.0 ? 0.25 * std::numbers::pi : 0.0);

    if (g == 0.0) {
        // Bare states; ordering by energy.
        const bool plus_on_top = d >= 0.0;
        e.v_plus = plus_on_top ? Eigen::Vector2cd(1, 0) : Eigen::Vector2cd(0, 1);
        e.v_minus = plus_on_top ? Eigen::Vector2cd(0, 1) : Eigen::Vector2cd(1, 0);
    } else {
        Eigen::Vector2d vp(e.e_plus, g);
        Eigen::Vector2d vm(-g, e.e_plus);
        vp.normalize();
        vm.normalize();
        e.v_plus = vp.cast<Complex>();
        e.v_minus = vm.cast<Complex>();
    }
    return e;
}

// Checks max|G| << omega_0, omega_C and |omega_0 - omega_C| << omega_C at a
// conservative 1% reading of "<<". Advisory only; never blocks a run.
inline std::vector<std::string> validate_rwa(const PulseSchedule& sched,
                                             double omega0, double omega_c) {
    if (!(omega0 > 0.0) || !(omega_c > 0.0))
        throw std::invalid_argument("validate_rwa: omega0 and omega_c must be > 0");

    constexpr double ratio_threshold = 0.01;
    std::vector<std::string> warnings;
    const double omega_min = std::min(omega0, omega_c);
    if (sched.g0 > ratio_threshold * omega_min) {
        std::ostringstream msg;
        msg << "rotating-wave approximation strained: g0 = " << sched.g0
            << " exceeds 1% of min(omega0; omega_C) = " << omega_min;
        warnings.push_back(msg.str());
    }
    const double delta_implied = omega0 - omega_c;
    if (std::abs(delta_implied) > ratio_threshold * omega_c) {
        std::ostringstream msg;
        msg << "static detuning |omega0 - omega_C| = " << std::abs(delta_implied)
            << " is not small against omega_C = " << omega_c;
        warnings.push_back(msg.str());
    }
    return warnings;
}

}  // namespace scrap
