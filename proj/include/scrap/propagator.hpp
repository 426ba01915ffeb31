#pragma once

// Fixed-step RK4 integration of i d|Phi>/dt = H_eff(t)|Phi> over one pass,
// with population recording and continuity-tracked instantaneous eigenstates.

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "scrap/errors.hpp"
#include "scrap/hamiltonian.hpp"

namespace scrap {

struct IntegratorOptions {
    double t_start = -5.0;         // window start [T]
    double t_end = 5.0;            // window end [T]
    double dt = 1e-3;              // fixed step [T]
    double norm_tolerance = 1e-6;  // max norm drift allowed on lossless runs
    int record_stride = 10;        // keep every Nth step (plus the final one)

    void validate() const;
};

// Default simulation window [-5 T_ref, 5 T_ref + tau] with
// T_ref = max(t_c, t_s); dt = 1e-3 T_ref.
IntegratorOptions default_window(const PulseSchedule& sched);

struct Trajectory {
    std::vector<double> times;
    std::vector<Eigen::Vector2cd> states;
    std::vector<Eigen::Vector2d> populations;  // (|<+,0|Phi>|^2, |<-,1|Phi>|^2)
    std::vector<double> norms;                 // squared norm = population sum
    // Projection weights onto the two tracked eigenstates; filled by
    // track_adiabatic (lossless runs only), empty otherwise.
    std::vector<Eigen::Vector2d> adiabatic_pops;
    std::vector<std::string> warnings;
    bool damped = false;
    double max_norm_drift = 0.0;  // lossless diagnostic, max |norm - 1|

    std::size_t size() const { return times.size(); }
};

struct TrackedEigenbasis {
    // Dominant bare-state character of each slot at the window start,
    // "plus0" or "minus1".
    std::array<std::string, 2> labels;
    // |<slot_k(t_{i-1})|slot_k(t_i)>| per recorded sample; first entry is 1.
    std::vector<Eigen::Vector2d> overlap_history;
    // Times where label continuity followed a diabatic crossing.
    std::vector<double> diabatic_crossing_times;
};

// Integrates one pass. The initial state must be normalized to 1e-10.
// Lossless runs must conserve the norm within opts.norm_tolerance and
// damped runs must lose norm monotonically, else NonConvergent is thrown.
Trajectory propagate(const Eigen::Vector2cd& initial, const PulseSchedule& sched,
                     const SystemParams& sys, const IntegratorOptions& opts);

// Pass propagator: columns are the final states reached from |+,0> and
// |-,1>. Unitary (to integration accuracy) when lossless, a contraction
// when damped.
Eigen::Matrix2cd propagate_unitary(const PulseSchedule& sched, const SystemParams& sys,
                                   const IntegratorOptions& opts);

// Both basis-column trajectories plus the pass matrix; protocol passes
// reuse the columns to synthesize arbitrary initial pairs by linearity.
struct PassColumns {
    Trajectory plus0;
    Trajectory minus1;
    Eigen::Matrix2cd matrix;
};
PassColumns propagate_basis_columns(const PulseSchedule& sched, const SystemParams& sys,
                                    const IntegratorOptions& opts);

// Matches instantaneous eigenvectors sample-to-sample by maximal |overlap|,
// following crossings diabatically when the sweep is fast against the gap
// (Landau-Zener diabaticity > 1/2). Fills traj.adiabatic_pops.
TrackedEigenbasis track_adiabatic(Trajectory& traj, const PulseSchedule& sched,
                                  const SystemParams& sys);

}  // namespace scrap
