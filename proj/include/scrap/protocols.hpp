#pragma once

// Multi-pass protocols on the joint (atoms x cavities) register: Fock-state
// generation, half-SCRAP atom-photon entanglement, two-atom entanglement,
// and quantum state transfer between atoms and between cavity nodes.

#include <Eigen/Dense>

#include <vector>

#include "scrap/joint_state.hpp"
#include "scrap/propagator.hpp"

namespace scrap {

enum class PassMode { Scrap, HalfScrap };

struct PassSpec {
    int atom_index = 0;
    int cavity_index = 0;
    PulseSchedule sched;
    SystemParams sys;
    PassMode mode = PassMode::Scrap;

    // HalfScrap requires delta = 0; Scrap requires delta > 0 and s0 > delta
    // so that the dynamics crosses the conical intersection.
    void validate() const;
};

struct PassResult {
    JointState before;
    JointState state;
    // Evolution of the normalized active pair (|+,0>, |-,1>) of the
    // all-spectators-ground block; weightless (pair_weight = 0) passes keep
    // the |+,0> column for reference.
    Trajectory active_trajectory;
    Eigen::Matrix2cd pass_matrix;
    double pair_weight = 0.0;
    // Global basis indices of the active pair within the spectator-ground
    // block, for mapping the pair trajectory back onto joint labels.
    std::size_t plus0_index = 0;
    std::size_t minus1_index = 0;
};

// Applies one cavity pass to the joint register. Amplitudes of the active
// (|+,0>, |-,1>) pairs are mapped by the pass propagator; every basis state
// with the active atom in |-> and the active cavity empty is untouched
// bit-for-bit (stationary, zero energy). Throws ExcitationOverflow if any
// populated basis state would need two excitations in the active pair.
PassResult apply_pass(const JointState& state, const PassSpec& pass,
                      const IntegratorOptions& opts);

struct FockReport {
    PassResult pass;
    double p_plus0 = 0.0;
    double p_minus1 = 0.0;
    double final_norm = 0.0;
    // dP(|-,1>)/dt at the window edge; the damped value depends on where
    // the window ends, so the sensitivity is always reported next to it.
    double edge_sensitivity = 0.0;
};

// Single-photon generation: SCRAP pass on one atom starting from |+,0>.
FockReport generate_fock(const PassSpec& pass, const IntegratorOptions& opts);

struct AtomPhotonReport {
    PassResult pass;
    double p_plus0 = 0.0;
    double p_minus1 = 0.0;
    double fidelity_raw = 0.0;        // against (|+,0> + |-,1>)/sqrt(2)
    double fidelity_optimized = 0.0;  // same, after one relative-phase turn
    double atom_entropy_bits = 0.0;
    double final_norm = 0.0;
};

// Half-SCRAP (delta = 0, Stark-cavity order) from |+,0> into the equal
// superposition of |+,0> and |-,1>.
AtomPhotonReport atom_photon_entangle(const PassSpec& pass, const IntegratorOptions& opts);

struct EntangleAtomsReport {
    PassResult pass1;
    PassResult pass2;
    double p_plus_minus_0_mid = 0.0;   // after pass 1
    double p_minus_minus_1_mid = 0.0;  // after pass 1
    Eigen::Matrix4cd rho_atoms;        // cavity traced out, normalized
    double concurrence = 0.0;
    double p_vacuum = 0.0;  // cavity back to |0>: the catalyst property
    double final_norm = 0.0;
};

// Half-SCRAP on atom 0 followed by SCRAP on atom 1, starting from |+,-,0>.
EntangleAtomsReport entangle_atoms(const PassSpec& pass1, const PassSpec& pass2,
                                   const IntegratorOptions& opts);

struct QstAtomReport {
    PassResult pass1;
    PassResult pass2;
    double cavity_fidelity_raw = 0.0;  // cavity holds alpha|0> + beta|1> mid-protocol
    double cavity_fidelity_optimized = 0.0;
    double atom2_fidelity_raw = 0.0;  // atom 2 ends in alpha|-> + beta|+>
    double atom2_fidelity_optimized = 0.0;
    double atom1_p_minus = 0.0;
    double p_vacuum = 0.0;
    double final_norm = 0.0;
};

// Transfers alpha|-> + beta|+> from atom 0 to atom 1 through the cavity:
// two sequential SCRAP passes.
QstAtomReport qst_atom_to_atom(Complex alpha, Complex beta, const PassSpec& pass1,
                               const PassSpec& pass2, const IntegratorOptions& opts);

struct QstCavityReport {
    PassResult pass_pickup;
    PassResult pass_deposit;
    double cavity2_fidelity_raw = 0.0;  // cavity 2 ends in alpha|0> + beta|1>
    double cavity2_fidelity_optimized = 0.0;
    double cavity1_p_vacuum = 0.0;
    double atom_p_minus = 0.0;
    double final_norm = 0.0;
};

// Transfers alpha|0> + beta|1> from cavity 0 to cavity 1 via one messenger
// atom (two SCRAP passes on the same atom).
QstCavityReport qst_cavity_to_cavity(Complex alpha, Complex beta, const PassSpec& pass_pickup,
                                     const PassSpec& pass_deposit,
                                     const IntegratorOptions& opts);

struct NetworkReport {
    std::vector<PassResult> passes;
    std::vector<double> hop_fidelity_raw;        // holder-cavity fidelity after each hop
    std::vector<double> hop_fidelity_optimized;
    double final_fidelity_optimized = 0.0;
    double final_norm = 0.0;
};

// Chain of node_count cavities; node_count - 1 messenger atoms carry
// alpha|0> + beta|1> from the first cavity to the last. passes[2j] picks up
// from cavity j with atom j, passes[2j+1] deposits into cavity j+1.
NetworkReport network_chain(Complex alpha, Complex beta, int node_count,
                            const std::vector<PassSpec>& passes, const IntegratorOptions& opts);

}  // namespace scrap
