#include "scrap/joint_state.hpp"

#include <cmath>
#include <stdexcept>

namespace scrap {

namespace {

void check_counts(int atoms, int cavities, Eigen::Index dim) {
    if (atoms < 1) throw std::invalid_argument("JointState: atom_count must be >= 1");
    if (cavities < 1) throw std::invalid_argument("JointState: cavity_count must be >= 1");
    if (atoms + cavities > 20)
        throw std::invalid_argument("JointState: register too large");
    if (dim != Eigen::Index(1) << (atoms + cavities))
        throw std::invalid_argument("JointState: amplitude vector has wrong dimension");
}

}  // namespace

JointState::JointState(int atom_count, int cavity_count, Eigen::VectorXcd amplitudes) {
    check_counts(atom_count, cavity_count, amplitudes.size());
    if (std::abs(amplitudes.norm() - 1.0) > 1e-10)
        throw std::invalid_argument("JointState: amplitudes must be normalized to 1e-10");
    atoms_ = atom_count;
    cavities_ = cavity_count;
    amps_ = std::move(amplitudes);
}

JointState JointState::basis(int atom_count, int cavity_count, std::size_t index) {
    Eigen::VectorXcd amps =
        Eigen::VectorXcd::Zero(Eigen::Index(1) << (atom_count + cavity_count));
    amps(static_cast<Eigen::Index>(index)) = Complex(1.0, 0.0);
    return JointState(atom_count, cavity_count, std::move(amps));
}

JointState JointState::unnormalized(int atom_count, int cavity_count,
                                    Eigen::VectorXcd amplitudes) {
    check_counts(atom_count, cavity_count, amplitudes.size());
    JointState st;
    st.atoms_ = atom_count;
    st.cavities_ = cavity_count;
    st.amps_ = std::move(amplitudes);
    return st;
}

bool JointState::site_bit(std::size_t index, int site) const {
    if (site < 0 || site >= site_count())
        throw std::invalid_argument("JointState: site out of range");
    const int shift = site_count() - 1 - site;
    return (index >> shift) & 1u;
}

std::size_t JointState::flip_site(std::size_t index, int site) const {
    const int shift = site_count() - 1 - site;
    return index ^ (std::size_t(1) << shift);
}

int JointState::excitation(std::size_t index) const {
    int count = 0;
    for (int s = 0; s < site_count(); ++s) count += site_bit(index, s) ? 1 : 0;
    return count;
}

double JointState::excitation_expectation() const {
    double sum = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) sum += excitation(i) * population(i);
    return sum;
}

double JointState::site_probability(int site, bool value) const {
    double p = 0.0;
    for (std::size_t i = 0; i < dim(); ++i)
        if (site_bit(i, site) == value) p += population(i);
    return p;
}

std::string JointState::label(std::size_t index) const {
    std::string out;
    for (int a = 0; a < atoms_; ++a) out += site_bit(index, a) ? "plus" : "minus";
    for (int c = 0; c < cavities_; ++c) out += site_bit(index, atoms_ + c) ? '1' : '0';
    return out;
}

}  // namespace scrap
