#include "scrap/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <set>
#include <sstream>

namespace scrap {

namespace {

void check_density_matrix(const Eigen::MatrixXcd& rho, const char* who) {
    if (rho.rows() != rho.cols())
        throw std::invalid_argument(std::string(who) + ": matrix is not square");
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-8)
        throw std::invalid_argument(std::string(who) + ": matrix is not Hermitian");
    if (std::abs(rho.trace().real() - 1.0) > 1e-8 || std::abs(rho.trace().imag()) > 1e-8)
        throw std::invalid_argument(std::string(who) + ": trace is not 1");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -1e-8)
        throw std::invalid_argument(std::string(who) + ": matrix is not positive semidefinite");
}

}  // namespace

SurfaceGrid surface_grid(std::pair<double, double> g_range,
                         std::pair<double, double> s_range, int resolution) {
    if (resolution < 2)
        throw std::invalid_argument("surface_grid: resolution must be >= 2 per axis");
    SurfaceGrid grid;
    grid.g_axis = Eigen::VectorXd::LinSpaced(resolution, g_range.first, g_range.second);
    grid.s_axis = Eigen::VectorXd::LinSpaced(resolution, s_range.first, s_range.second);
    grid.e_plus.resize(resolution, resolution);
    grid.e_minus.resize(resolution, resolution);
    for (int i = 0; i < resolution; ++i) {
        for (int j = 0; j < resolution; ++j) {
            // delta = 1 normalization: Delta = 1 + S.
            const double d = 1.0 + grid.s_axis(j);
            const double root = std::hypot(d, 2.0 * grid.g_axis(i));
            grid.e_plus(i, j) = 0.5 * (d + root);
            grid.e_minus(i, j) = 0.5 * (d - root);
        }
    }
    return grid;
}

AdiabaticityReport check_adiabaticity(const PulseSchedule& sched, const SystemParams& sys,
                                      double margin_factor) {
    sched.validate();
    sys.validate();
    if (!(margin_factor >= 1.0))
        throw std::invalid_argument("check_adiabaticity: margin_factor must be >= 1");
    if (!(sys.delta > 0.0))
        throw DomainError("check_adiabaticity: requires delta > 0");
    if (!(sched.s0 > sys.delta))
        throw DomainError("check_adiabaticity: requires S0 > delta (the dynamics must "
                          "cross the conical intersection)");
    if (!(sched.g0 > 0.0))
        throw DomainError("check_adiabaticity: requires g0 > 0");

    AdiabaticityReport report;
    report.margin_factor = margin_factor;
    report.left_term = std::exp(-8.0 * sched.tau * sched.tau / (sched.t_c * sched.t_c));
    report.middle_term =
        sys.delta / (sched.g0 * sched.g0 * sched.t_s) * std::sqrt(std::log(sched.s0 / sys.delta));
    report.margin_lower = report.middle_term / report.left_term;
    report.margin_upper = 1.0 / report.middle_term;
    report.satisfied = report.left_term * margin_factor <= report.middle_term &&
                       report.middle_term * margin_factor <= 1.0;
    return report;
}

double fidelity(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
    if (a.size() != b.size()) throw std::invalid_argument("fidelity: dimension mismatch");
    if (std::abs(a.norm() - 1.0) > 1e-6 || std::abs(b.norm() - 1.0) > 1e-6)
        throw std::invalid_argument("fidelity: states must be normalized");
    return std::norm(a.dot(b));
}

double fidelity(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b,
                const std::vector<bool>& phase_mask) {
    if (a.size() != b.size()) throw std::invalid_argument("fidelity: dimension mismatch");
    if (phase_mask.size() != static_cast<std::size_t>(a.size()))
        throw std::invalid_argument("fidelity: mask dimension mismatch");
    if (std::abs(a.norm() - 1.0) > 1e-6 || std::abs(b.norm() - 1.0) > 1e-6)
        throw std::invalid_argument("fidelity: states must be normalized");
    Complex masked(0, 0);
    Complex rest(0, 0);
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        const Complex term = std::conj(a(i)) * b(i);
        (phase_mask[static_cast<std::size_t>(i)] ? masked : rest) += term;
    }
    const double amplitude = std::abs(masked) + std::abs(rest);
    return amplitude * amplitude;
}

Eigen::MatrixXcd partial_trace(const JointState& state, const std::vector<int>& keep_sites) {
    const int sites = state.site_count();
    std::set<int> keep(keep_sites.begin(), keep_sites.end());
    if (keep.empty() || keep.size() != keep_sites.size())
        throw std::invalid_argument("partial_trace: selector must be nonempty and unique");
    if (*keep.begin() < 0 || *keep.rbegin() >= sites)
        throw std::invalid_argument("partial_trace: site out of range");

    std::vector<int> kept(keep.begin(), keep.end());
    std::vector<int> traced;
    for (int s = 0; s < sites; ++s)
        if (!keep.count(s)) traced.push_back(s);

    const int m = static_cast<int>(kept.size());
    const int e = static_cast<int>(traced.size());
    const auto full_index = [&](std::size_t kept_bits, std::size_t env_bits) {
        std::size_t idx = 0;
        for (int p = 0; p < m; ++p)
            if ((kept_bits >> (m - 1 - p)) & 1u) idx |= std::size_t(1) << (sites - 1 - kept[p]);
        for (int p = 0; p < e; ++p)
            if ((env_bits >> (e - 1 - p)) & 1u) idx |= std::size_t(1) << (sites - 1 - traced[p]);
        return idx;
    };

    const std::size_t dim_keep = std::size_t(1) << m;
    const std::size_t dim_env = std::size_t(1) << e;
    const Eigen::VectorXcd& amps = state.amplitudes();
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim_keep, dim_keep);
    for (std::size_t r = 0; r < dim_keep; ++r)
        for (std::size_t c = 0; c < dim_keep; ++c)
            for (std::size_t env = 0; env < dim_env; ++env)
                rho(r, c) += amps(static_cast<Eigen::Index>(full_index(r, env))) *
                             std::conj(amps(static_cast<Eigen::Index>(full_index(c, env))));
    return rho;
}

double concurrence(const Eigen::Matrix4cd& rho) {
    check_density_matrix(rho, "concurrence");
    Eigen::Matrix4cd spin_flip = Eigen::Matrix4cd::Zero();
    spin_flip(0, 3) = -1;
    spin_flip(1, 2) = 1;
    spin_flip(2, 1) = 1;
    spin_flip(3, 0) = -1;
    const Eigen::Matrix4cd product = rho * spin_flip * rho.conjugate() * spin_flip;
    Eigen::ComplexEigenSolver<Eigen::Matrix4cd> solver(product, false);
    std::array<double, 4> lambdas{};
    for (int i = 0; i < 4; ++i)
        lambdas[static_cast<std::size_t>(i)] =
            std::sqrt(std::max(0.0, solver.eigenvalues()(i).real()));
    std::sort(lambdas.begin(), lambdas.end(), std::greater<>());
    return std::clamp(lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3], 0.0, 1.0);
}

double entanglement_entropy(const Eigen::MatrixXcd& rho) {
    check_density_matrix(rho, "entanglement_entropy");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho, Eigen::EigenvaluesOnly);
    double bits = 0.0;
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
        const double lambda = solver.eigenvalues()(i);
        if (lambda > 0.0) bits -= lambda * std::log2(lambda);
    }
    return std::max(0.0, bits);
}

}  // namespace scrap
