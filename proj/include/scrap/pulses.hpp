#pragma once

// Gaussian pulse envelopes and static parameters of the atom-cavity
// passage model. All quantities are dimensionless in units of the
// reference pulse duration T; rates and detunings are in 1/T.

#include <cmath>
#include <optional>
#include <stdexcept>

namespace scrap {

// Which pulse the flying atom meets first: path (a) has the Stark peak
// at t = -tau before the cavity peak at t = 0, path (b) the reverse.
enum class PulsePath { StarkFirst, CavityFirst };

struct PulseSchedule {
    double g0 = 0.0;   // peak cavity Rabi frequency [1/T]
    double t_c = 1.0;  // cavity pulse duration T_C [T]
    double s0 = 0.0;   // peak Stark-shift magnitude, stored >= 0 [1/T]
    double t_s = 1.0;  // Stark pulse duration T_S [T]
    double tau = 0.0;  // pulse delay tau = d/v [T]
    PulsePath path = PulsePath::StarkFirst;

    void validate() const {
        if (!(g0 >= 0.0)) throw std::invalid_argument("PulseSchedule: g0 must be >= 0");
        if (!(s0 >= 0.0)) throw std::invalid_argument("PulseSchedule: s0 must be >= 0");
        if (!(t_c > 0.0)) throw std::invalid_argument("PulseSchedule: t_c must be > 0");
        if (!(t_s > 0.0)) throw std::invalid_argument("PulseSchedule: t_s must be > 0");
        if (!(tau >= 0.0)) throw std::invalid_argument("PulseSchedule: tau must be >= 0");
    }
};

struct SystemParams {
    double delta = 0.0;                // static detuning omega_0 - omega_C [1/T]
    std::optional<double> t_cav{};     // cavity lifetime [T]; absent = lossless

    bool lossless() const { return !t_cav.has_value(); }

    void validate() const {
        if (t_cav && !(*t_cav > 0.0))
            throw std::invalid_argument("SystemParams: t_cav must be > 0 when present");
    }
};

// Cavity-mode Rabi frequency G(t) = g0 exp(-(t/t_c)^2), peaked at t = 0.
inline double cavity_rabi(const PulseSchedule& sched, double t) {
    const double x = t / sched.t_c;
    return sched.g0 * std::exp(-x * x);
}

// Stark shift S(t) = -s0 exp(-((t +/- tau)/t_s)^2). Emitted non-positive:
// the Stark field lowers the |+> level toward one-photon resonance.
inline double stark_shift(const PulseSchedule& sched, double t) {
    const double sign = sched.path == PulsePath::StarkFirst ? 1.0 : -1.0;
    const double x = (t + sign * sched.tau) / sched.t_s;
    return -sched.s0 * std::exp(-x * x);
}

}  // namespace scrap
