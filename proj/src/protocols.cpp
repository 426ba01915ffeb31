#include "scrap/protocols.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "scrap/analysis.hpp"

namespace scrap {

namespace {

// Basis index with exactly one site bit set.
std::size_t one_hot(const JointState& st, int site) {
    return std::size_t(1) << (st.site_count() - 1 - site);
}

Eigen::VectorXcd normalized_or_throw(const JointState& st, const char* who) {
    const double norm = st.amplitudes().norm();
    if (norm < 1e-12)
        throw DomainError(std::string(who) + ": state fully decayed, fidelity undefined");
    return st.amplitudes() / norm;
}

std::vector<bool> site_mask(const JointState& st, int site) {
    std::vector<bool> mask(st.dim(), false);
    for (std::size_t i = 0; i < st.dim(); ++i) mask[i] = st.site_bit(i, site);
    return mask;
}

double edge_sensitivity(const PassResult& pass) {
    const Trajectory& traj = pass.active_trajectory;
    if (traj.size() < 2 || pass.pair_weight <= 0.0) return 0.0;
    const std::size_t n = traj.size();
    return pass.pair_weight *
           (traj.populations[n - 1](1) - traj.populations[n - 2](1)) /
           (traj.times[n - 1] - traj.times[n - 2]);
}

}  // namespace

void PassSpec::validate() const {
    sched.validate();
    sys.validate();
    if (atom_index < 0) throw std::invalid_argument("PassSpec: atom_index must be >= 0");
    if (cavity_index < 0) throw std::invalid_argument("PassSpec: cavity_index must be >= 0");
    if (mode == PassMode::HalfScrap && sys.delta != 0.0)
        throw std::invalid_argument("PassSpec: half-SCRAP requires delta = 0");
    if (mode == PassMode::Scrap) {
        if (!(sys.delta > 0.0))
            throw std::invalid_argument("PassSpec: SCRAP requires delta > 0");
        if (!(sched.s0 > sys.delta))
            throw std::invalid_argument("PassSpec: SCRAP requires s0 > delta");
    }
}

PassResult apply_pass(const JointState& state, const PassSpec& pass,
                      const IntegratorOptions& opts) {
    pass.validate();
    if (pass.atom_index >= state.atom_count())
        throw std::invalid_argument("apply_pass: atom_index out of range");
    if (pass.cavity_index >= state.cavity_count())
        throw std::invalid_argument("apply_pass: cavity_index out of range");

    const int atom_site = pass.atom_index;
    const int cavity_site = state.atom_count() + pass.cavity_index;

    // A populated |atom: +, cavity: 1> state would couple to two photons.
    for (std::size_t i = 0; i < state.dim(); ++i) {
        if (state.site_bit(i, atom_site) && state.site_bit(i, cavity_site) &&
            std::abs(state.amplitudes()(static_cast<Eigen::Index>(i))) > 1e-14) {
            std::ostringstream msg;
            msg << "apply_pass: basis state " << state.label(i)
                << " would leave the single-excitation block (photon number >= 2)";
            throw ExcitationOverflow(msg.str());
        }
    }

    const PassColumns cols = propagate_basis_columns(pass.sched, pass.sys, opts);
    const Eigen::Matrix2cd& u = cols.matrix;

    Eigen::VectorXcd out = state.amplitudes();
    for (std::size_t i = 0; i < state.dim(); ++i) {
        if (!state.site_bit(i, atom_site) || state.site_bit(i, cavity_site)) continue;
        const std::size_t partner = state.flip_site(state.flip_site(i, atom_site), cavity_site);
        const Complex a_plus0 = state.amplitudes()(static_cast<Eigen::Index>(i));
        const Complex a_minus1 = state.amplitudes()(static_cast<Eigen::Index>(partner));
        out(static_cast<Eigen::Index>(i)) = u(0, 0) * a_plus0 + u(0, 1) * a_minus1;
        out(static_cast<Eigen::Index>(partner)) = u(1, 0) * a_plus0 + u(1, 1) * a_minus1;
    }

    PassResult result{state,
                      JointState::unnormalized(state.atom_count(), state.cavity_count(),
                                               std::move(out)),
                      Trajectory{}, u, 0.0, 0, 0};
    result.plus0_index = one_hot(state, atom_site);
    result.minus1_index = one_hot(state, cavity_site);

    // Synthesize the active-pair trajectory from the basis columns; the
    // integrator is linear, so this reproduces a direct propagation.
    const Complex a_p = state.amplitudes()(static_cast<Eigen::Index>(result.plus0_index));
    const Complex a_m = state.amplitudes()(static_cast<Eigen::Index>(result.minus1_index));
    result.pair_weight = std::norm(a_p) + std::norm(a_m);
    Complex c_p(1.0, 0.0);
    Complex c_m(0.0, 0.0);
    if (result.pair_weight > 1e-15) {
        const double scale = 1.0 / std::sqrt(result.pair_weight);
        c_p = a_p * scale;
        c_m = a_m * scale;
    }
    Trajectory traj = cols.plus0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        traj.states[i] = c_p * cols.plus0.states[i] + c_m * cols.minus1.states[i];
        traj.populations[i] =
            Eigen::Vector2d(std::norm(traj.states[i](0)), std::norm(traj.states[i](1)));
        traj.norms[i] = traj.populations[i].sum();
    }
    traj.max_norm_drift = 0.0;
    if (!traj.damped)
        for (double n : traj.norms)
            traj.max_norm_drift = std::max(traj.max_norm_drift, std::abs(n - 1.0));
    result.active_trajectory = std::move(traj);
    return result;
}

FockReport generate_fock(const PassSpec& pass, const IntegratorOptions& opts) {
    if (pass.mode != PassMode::Scrap)
        throw std::invalid_argument("generate_fock: pass must be a SCRAP pass");
    const JointState initial = JointState::basis(1, 1, 0b10);
    FockReport report{apply_pass(initial, pass, opts), 0, 0, 0, 0};
    report.p_plus0 = report.pass.state.population(0b10);
    report.p_minus1 = report.pass.state.population(0b01);
    report.final_norm = report.pass.state.norm_sq();
    report.edge_sensitivity = edge_sensitivity(report.pass);
    return report;
}

AtomPhotonReport atom_photon_entangle(const PassSpec& pass, const IntegratorOptions& opts) {
    if (pass.mode != PassMode::HalfScrap)
        throw std::invalid_argument("atom_photon_entangle: pass must be a half-SCRAP pass");
    if (pass.sys.delta != 0.0)
        throw std::invalid_argument("atom_photon_entangle: requires delta = 0");
    if (pass.sched.path != PulsePath::StarkFirst)
        throw std::invalid_argument(
            "atom_photon_entangle: requires the Stark-cavity pulse order; the reverse "
            "order adds an uncontrolled dynamical phase");

    const JointState initial = JointState::basis(1, 1, 0b10);
    AtomPhotonReport report{apply_pass(initial, pass, opts), 0, 0, 0, 0, 0, 0};
    const JointState& final_state = report.pass.state;
    report.p_plus0 = final_state.population(0b10);
    report.p_minus1 = final_state.population(0b01);
    report.final_norm = final_state.norm_sq();

    Eigen::VectorXcd target = Eigen::VectorXcd::Zero(4);
    target(0b10) = Complex(std::numbers::sqrt2 / 2.0, 0.0);
    target(0b01) = Complex(std::numbers::sqrt2 / 2.0, 0.0);
    const Eigen::VectorXcd psi = normalized_or_throw(final_state, "atom_photon_entangle");
    report.fidelity_raw = fidelity(psi, target);
    report.fidelity_optimized = fidelity(psi, target, site_mask(final_state, 1));

    const JointState normalized = JointState::unnormalized(1, 1, psi);
    report.atom_entropy_bits = entanglement_entropy(partial_trace(normalized, {0}));
    return report;
}

EntangleAtomsReport entangle_atoms(const PassSpec& pass1, const PassSpec& pass2,
                                   const IntegratorOptions& opts) {
    if (pass1.mode != PassMode::HalfScrap || pass1.atom_index != 0)
        throw std::invalid_argument("entangle_atoms: pass1 must be half-SCRAP on atom 0");
    if (pass2.mode != PassMode::Scrap || pass2.atom_index != 1)
        throw std::invalid_argument("entangle_atoms: pass2 must be SCRAP on atom 1");

    // |+,-,0>
    const JointState initial = JointState::basis(2, 1, 0b100);
    EntangleAtomsReport report{apply_pass(initial, pass1, opts),
                               PassResult{initial, initial, {}, {}, 0, 0, 0},
                               0, 0, Eigen::Matrix4cd::Zero(), 0, 0, 0};
    report.p_plus_minus_0_mid = report.pass1.state.population(0b100);
    report.p_minus_minus_1_mid = report.pass1.state.population(0b001);

    report.pass2 = apply_pass(report.pass1.state, pass2, opts);
    const JointState& final_state = report.pass2.state;
    report.final_norm = final_state.norm_sq();

    const JointState normalized =
        JointState::unnormalized(2, 1, normalized_or_throw(final_state, "entangle_atoms"));
    report.rho_atoms = partial_trace(normalized, {0, 1});
    report.concurrence = concurrence(report.rho_atoms);
    report.p_vacuum = normalized.site_probability(2, false);
    return report;
}

QstAtomReport qst_atom_to_atom(Complex alpha, Complex beta, const PassSpec& pass1,
                               const PassSpec& pass2, const IntegratorOptions& opts) {
    if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > 1e-10)
        throw std::invalid_argument("qst_atom_to_atom: (alpha, beta) must be normalized to 1e-10");
    if (pass1.mode != PassMode::Scrap || pass2.mode != PassMode::Scrap)
        throw std::invalid_argument("qst_atom_to_atom: both passes must be SCRAP passes");
    if (pass1.atom_index != 0 || pass2.atom_index != 1)
        throw std::invalid_argument("qst_atom_to_atom: pass1 acts on atom 0, pass2 on atom 1");

    // alpha|-,-,0> + beta|+,-,0>
    Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(8);
    amps(0b000) = alpha;
    amps(0b100) = beta;
    const JointState initial(2, 1, std::move(amps));

    QstAtomReport report{apply_pass(initial, pass1, opts),
                         PassResult{initial, initial, {}, {}, 0, 0, 0}, 0, 0, 0, 0, 0, 0, 0};

    {
        // Mid-protocol the cavity should hold alpha|0> + beta|1>.
        Eigen::VectorXcd target = Eigen::VectorXcd::Zero(8);
        target(0b000) = alpha;
        target(0b001) = beta;
        const Eigen::VectorXcd psi = normalized_or_throw(report.pass1.state, "qst_atom_to_atom");
        report.cavity_fidelity_raw = fidelity(psi, target);
        report.cavity_fidelity_optimized =
            fidelity(psi, target, site_mask(report.pass1.state, 2));
    }

    report.pass2 = apply_pass(report.pass1.state, pass2, opts);
    const JointState& final_state = report.pass2.state;
    report.final_norm = final_state.norm_sq();

    Eigen::VectorXcd target = Eigen::VectorXcd::Zero(8);
    target(0b000) = alpha;
    target(0b010) = beta;
    const Eigen::VectorXcd psi = normalized_or_throw(final_state, "qst_atom_to_atom");
    report.atom2_fidelity_raw = fidelity(psi, target);
    report.atom2_fidelity_optimized = fidelity(psi, target, site_mask(final_state, 1));
    const JointState normalized = JointState::unnormalized(2, 1, psi);
    report.atom1_p_minus = normalized.site_probability(0, false);
    report.p_vacuum = normalized.site_probability(2, false);
    return report;
}

QstCavityReport qst_cavity_to_cavity(Complex alpha, Complex beta, const PassSpec& pass_pickup,
                                     const PassSpec& pass_deposit,
                                     const IntegratorOptions& opts) {
    if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > 1e-10)
        throw std::invalid_argument(
            "qst_cavity_to_cavity: (alpha, beta) must be normalized to 1e-10");
    if (pass_pickup.mode != PassMode::Scrap || pass_deposit.mode != PassMode::Scrap)
        throw std::invalid_argument("qst_cavity_to_cavity: both passes must be SCRAP passes");
    if (pass_pickup.atom_index != 0 || pass_pickup.cavity_index != 0)
        throw std::invalid_argument("qst_cavity_to_cavity: pickup pass is atom 0 with cavity 0");
    if (pass_deposit.atom_index != 0 || pass_deposit.cavity_index != 1)
        throw std::invalid_argument("qst_cavity_to_cavity: deposit pass is atom 0 with cavity 1");

    // alpha|-,0,0> + beta|-,1,0>
    Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(8);
    amps(0b000) = alpha;
    amps(0b010) = beta;
    const JointState initial(1, 2, std::move(amps));

    QstCavityReport report{apply_pass(initial, pass_pickup, opts),
                           PassResult{initial, initial, {}, {}, 0, 0, 0}, 0, 0, 0, 0, 0};
    report.pass_deposit = apply_pass(report.pass_pickup.state, pass_deposit, opts);
    const JointState& final_state = report.pass_deposit.state;
    report.final_norm = final_state.norm_sq();

    Eigen::VectorXcd target = Eigen::VectorXcd::Zero(8);
    target(0b000) = alpha;
    target(0b001) = beta;
    const Eigen::VectorXcd psi = normalized_or_throw(final_state, "qst_cavity_to_cavity");
    report.cavity2_fidelity_raw = fidelity(psi, target);
    report.cavity2_fidelity_optimized = fidelity(psi, target, site_mask(final_state, 2));
    const JointState normalized = JointState::unnormalized(1, 2, psi);
    report.cavity1_p_vacuum = normalized.site_probability(1, false);
    report.atom_p_minus = normalized.site_probability(0, false);
    return report;
}

NetworkReport network_chain(Complex alpha, Complex beta, int node_count,
                            const std::vector<PassSpec>& passes, const IntegratorOptions& opts) {
    if (node_count < 2) throw std::invalid_argument("network_chain: node_count must be >= 2");
    if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > 1e-10)
        throw std::invalid_argument("network_chain: (alpha, beta) must be normalized to 1e-10");
    const int hops = node_count - 1;
    if (passes.size() != static_cast<std::size_t>(2 * hops))
        throw std::invalid_argument("network_chain: expected 2*(node_count - 1) passes");
    for (int j = 0; j < hops; ++j) {
        const PassSpec& pickup = passes[static_cast<std::size_t>(2 * j)];
        const PassSpec& deposit = passes[static_cast<std::size_t>(2 * j + 1)];
        if (pickup.mode != PassMode::Scrap || deposit.mode != PassMode::Scrap)
            throw std::invalid_argument("network_chain: all passes must be SCRAP passes");
        if (pickup.atom_index != j || pickup.cavity_index != j)
            throw std::invalid_argument("network_chain: pass 2j must couple atom j to cavity j");
        if (deposit.atom_index != j || deposit.cavity_index != j + 1)
            throw std::invalid_argument(
                "network_chain: pass 2j+1 must couple atom j to cavity j+1");
    }

    const int atoms = hops;
    const int cavities = node_count;
    Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(Eigen::Index(1) << (atoms + cavities));
    amps(0) = alpha;
    const std::size_t first_photon = std::size_t(1) << (cavities - 1);
    amps(static_cast<Eigen::Index>(first_photon)) = beta;
    JointState state(atoms, cavities, std::move(amps));

    NetworkReport report;
    for (int j = 0; j < hops; ++j) {
        report.passes.push_back(apply_pass(state, passes[static_cast<std::size_t>(2 * j)], opts));
        report.passes.push_back(
            apply_pass(report.passes.back().state, passes[static_cast<std::size_t>(2 * j + 1)], opts));
        state = report.passes.back().state;

        // Holder after hop j is cavity j+1.
        Eigen::VectorXcd target = Eigen::VectorXcd::Zero(state.amplitudes().size());
        target(0) = alpha;
        const std::size_t holder = std::size_t(1) << (cavities - 1 - (j + 1));
        target(static_cast<Eigen::Index>(holder)) = beta;
        const Eigen::VectorXcd psi = normalized_or_throw(state, "network_chain");
        report.hop_fidelity_raw.push_back(fidelity(psi, target));
        report.hop_fidelity_optimized.push_back(
            fidelity(psi, target, site_mask(state, atoms + j + 1)));
    }
    report.final_fidelity_optimized = report.hop_fidelity_optimized.back();
    report.final_norm = state.norm_sq();
    return report;
}

}  // namespace scrap
