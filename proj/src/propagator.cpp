#include "scrap/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace scrap {

namespace {

constexpr Complex kImag(0.0, 1.0);

Eigen::Vector2cd schrodinger_rhs(const PulseSchedule& sched, const SystemParams& sys,
                                 double t, const Eigen::Vector2cd& psi) {
    return -kImag * (sample_hamiltonian(sched, sys, t).matrix * psi);
}

// Window checks: the 3-sigma coverage rule plus the boundary-truncation
// diagnostic. Pulses with zero amplitude need no window.
void window_warnings(const PulseSchedule& sched, const IntegratorOptions& opts,
                     std::vector<std::string>& warnings) {
    double cover = 0.0;
    if (sched.g0 > 0.0) cover = std::max(cover, 3.0 * sched.t_c);
    if (sched.s0 > 0.0) cover = std::max(cover, 3.0 * sched.t_s + sched.tau);
    if (std::abs(opts.t_start) < cover || opts.t_end < cover) {
        std::ostringstream msg;
        msg << "window [" << opts.t_start << ", " << opts.t_end
            << "] does not cover both pulses (need |t_start|, t_end >= " << cover << ")";
        warnings.push_back(msg.str());
    }
    constexpr double truncation_limit = 1e-6;
    double truncation = 0.0;
    for (double tb : {opts.t_start, opts.t_end}) {
        if (sched.g0 > 0.0)
            truncation = std::max(truncation, cavity_rabi(sched, tb) / sched.g0);
        if (sched.s0 > 0.0)
            truncation = std::max(truncation, std::abs(stark_shift(sched, tb)) / sched.s0);
    }
    if (truncation > truncation_limit) {
        std::ostringstream msg;
        msg << "WindowTooNarrow: a pulse is truncated at " << truncation
            << " of its peak at a window boundary";
        warnings.push_back(msg.str());
    }
}

}  // namespace

void IntegratorOptions::validate() const {
    if (!(t_start < t_end))
        throw std::invalid_argument("IntegratorOptions: t_start must be < t_end");
    if (!(dt > 0.0)) throw std::invalid_argument("IntegratorOptions: dt must be > 0");
    if (!(dt <= (t_end - t_start) / 100.0))
        throw std::invalid_argument("IntegratorOptions: dt must be <= (t_end - t_start)/100");
    if (!(norm_tolerance > 0.0))
        throw std::invalid_argument("IntegratorOptions: norm_tolerance must be > 0");
    if (record_stride < 1)
        throw std::invalid_argument("IntegratorOptions: record_stride must be >= 1");
}

IntegratorOptions default_window(const PulseSchedule& sched) {
    const double t_ref = std::max(sched.t_c, sched.t_s);
    IntegratorOptions opts;
    opts.t_start = -5.0 * t_ref;
    opts.t_end = 5.0 * t_ref + sched.tau;
    opts.dt = 1e-3 * t_ref;
    return opts;
}

Trajectory propagate(const Eigen::Vector2cd& initial, const PulseSchedule& sched,
                     const SystemParams& sys, const IntegratorOptions& opts) {
    sched.validate();
    sys.validate();
    opts.validate();
    if (std::abs(initial.norm() - 1.0) > 1e-10)
        throw std::invalid_argument("propagate: initial state must be normalized to 1e-10");

    Trajectory traj;
    traj.damped = !sys.lossless();
    window_warnings(sched, opts, traj.warnings);

    const double span = opts.t_end - opts.t_start;
    const long long nsteps = std::max<long long>(1, std::llround(span / opts.dt));
    const double h = span / static_cast<double>(nsteps);

    const auto record = [&](double t, const Eigen::Vector2cd& psi) {
        traj.times.push_back(t);
        traj.states.push_back(psi);
        const Eigen::Vector2d pops(std::norm(psi(0)), std::norm(psi(1)));
        traj.populations.push_back(pops);
        traj.norms.push_back(pops.sum());
    };

    Eigen::Vector2cd psi = initial;
    record(opts.t_start, psi);

    double prev_norm = traj.norms.front();
    for (long long i = 0; i < nsteps; ++i) {
        const double t = opts.t_start + static_cast<double>(i) * h;
        const Eigen::Vector2cd k1 = schrodinger_rhs(sched, sys, t, psi);
        const Eigen::Vector2cd k2 = schrodinger_rhs(sched, sys, t + 0.5 * h, psi + 0.5 * h * k1);
        const Eigen::Vector2cd k3 = schrodinger_rhs(sched, sys, t + 0.5 * h, psi + 0.5 * h * k2);
        const Eigen::Vector2cd k4 = schrodinger_rhs(sched, sys, t + h, psi + h * k3);
        psi += (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4);

        const double norm = psi.squaredNorm();
        if (traj.damped && norm > prev_norm + opts.norm_tolerance) {
            std::ostringstream msg;
            msg << "NonConvergent: damped norm increased by " << norm - prev_norm
                << " in one step at t = " << t + h;
            throw NonConvergent(msg.str());
        }
        prev_norm = norm;

        if ((i + 1) % opts.record_stride == 0 || i + 1 == nsteps)
            record(opts.t_start + static_cast<double>(i + 1) * h, psi);
    }

    if (!traj.damped) {
        for (double n : traj.norms)
            traj.max_norm_drift = std::max(traj.max_norm_drift, std::abs(n - 1.0));
        if (traj.max_norm_drift > opts.norm_tolerance) {
            std::ostringstream msg;
            msg << "NonConvergent: lossless norm drifted by " << traj.max_norm_drift
                << " (tolerance " << opts.norm_tolerance << "); dt is too large";
            throw NonConvergent(msg.str());
        }
    }
    return traj;
}

PassColumns propagate_basis_columns(const PulseSchedule& sched, const SystemParams& sys,
                                    const IntegratorOptions& opts) {
    PassColumns cols;
    cols.plus0 = propagate(Eigen::Vector2cd(1, 0), sched, sys, opts);
    cols.minus1 = propagate(Eigen::Vector2cd(0, 1), sched, sys, opts);
    cols.matrix.col(0) = cols.plus0.states.back();
    cols.matrix.col(1) = cols.minus1.states.back();
    return cols;
}

Eigen::Matrix2cd propagate_unitary(const PulseSchedule& sched, const SystemParams& sys,
                                   const IntegratorOptions& opts) {
    return propagate_basis_columns(sched, sys, opts).matrix;
}

TrackedEigenbasis track_adiabatic(Trajectory& traj, const PulseSchedule& sched,
                                  const SystemParams& sys) {
    if (traj.damped)
        throw std::invalid_argument("track_adiabatic: requires a lossless trajectory");
    if (traj.size() < 2)
        throw std::invalid_argument("track_adiabatic: trajectory has fewer than 2 samples");

    const std::size_t n = traj.size();
    TrackedEigenbasis tracked;
    traj.adiabatic_pops.assign(n, Eigen::Vector2d::Zero());

    int parity = 0;  // 0: slot0 = v_plus; 1: slot0 = v_minus
    double suppress_until = -std::numeric_limits<double>::infinity();
    double prev_delta = 0.0;
    std::array<Eigen::Vector2cd, 2> prev_slots;

    for (std::size_t i = 0; i < n; ++i) {
        const double t = traj.times[i];
        const HamiltonianSample h = sample_hamiltonian(sched, sys, t);
        const EigenSample es = eigensystem(h);

        if (i > 0 && prev_delta != 0.0 && std::signbit(h.delta_eff) != std::signbit(prev_delta)) {
            // Delta changed sign between samples. Decide adiabatic vs
            // diabatic continuation from the Landau-Zener exponent at the
            // interpolated crossing.
            const double t_prev = traj.times[i - 1];
            const double slope = (h.delta_eff - prev_delta) / (t - t_prev);
            const double t_cross = t_prev - prev_delta / slope;
            const double g_cross = cavity_rabi(sched, t_cross);
            const double p_diabatic =
                slope != 0.0 ? std::exp(-2.0 * std::numbers::pi * g_cross * g_cross / std::abs(slope))
                             : 0.0;
            if (p_diabatic > 0.5) {
                parity ^= 1;
                tracked.diabatic_crossing_times.push_back(t_cross);
                // Eigenvectors rotate through the whole mixing zone
                // |Delta| < 6 G; the overlap-ambiguity check is suspended
                // there (labels are ill-defined mid-crossing).
                const double half_width =
                    std::max(6.0 * g_cross / std::max(std::abs(slope), 1e-300), 2.0 * (t - t_prev));
                suppress_until = t_cross + half_width;
            }
        }
        prev_delta = h.delta_eff;

        std::array<Eigen::Vector2cd, 2> slots = {parity == 0 ? es.v_plus : es.v_minus,
                                                 parity == 0 ? es.v_minus : es.v_plus};

        Eigen::Vector2d overlaps(1.0, 1.0);
        if (i > 0) {
            for (int k = 0; k < 2; ++k)
                overlaps(k) = std::min(1.0, std::abs(prev_slots[k].dot(slots[k])));
            if (overlaps(0) < 0.5 && overlaps(1) < 0.5 && t > suppress_until)
                throw AmbiguousTracking(
                    "track_adiabatic: both eigenvector overlaps fell below 0.5; "
                    "sampling is too coarse near an avoided crossing");
        } else {
            tracked.labels[0] = std::abs(slots[0](0)) >= std::abs(slots[0](1)) ? "plus0" : "minus1";
            tracked.labels[1] = tracked.labels[0] == "plus0" ? "minus1" : "plus0";
        }
        tracked.overlap_history.push_back(overlaps);

        const Eigen::Vector2cd& psi = traj.states[i];
        traj.adiabatic_pops[i] =
            Eigen::Vector2d(std::norm(slots[0].dot(psi)), std::norm(slots[1].dot(psi)));
        prev_slots = slots;
    }
    return tracked;
}

}  // namespace scrap
