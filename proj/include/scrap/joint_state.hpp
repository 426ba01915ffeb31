#pragma once

// Joint register of k two-level atoms and c single-mode cavities with the
// photon number of each cavity truncated to {0,1}. The truncation is exact
// for every protocol here: all initial states carry at most one excitation
// and each pass conserves the total excitation number.

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

#include "scrap/hamiltonian.hpp"

namespace scrap {

class JointState {
public:
    // Basis index packs atom bits (1 = |+>) then cavity bits (1 = one
    // photon), first site most significant:
    //   index = a_1 ... a_k n_1 ... n_c   (binary).
    JointState(int atom_count, int cavity_count, Eigen::VectorXcd amplitudes);

    // Computational basis state |index>.
    static JointState basis(int atom_count, int cavity_count, std::size_t index);
    // Same, bypassing the normalization check (pass outputs may be lossy).
    static JointState unnormalized(int atom_count, int cavity_count,
                                   Eigen::VectorXcd amplitudes);

    int atom_count() const { return atoms_; }
    int cavity_count() const { return cavities_; }
    int site_count() const { return atoms_ + cavities_; }
    std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }

    const Eigen::VectorXcd& amplitudes() const { return amps_; }
    Eigen::VectorXcd& amplitudes() { return amps_; }

    double norm_sq() const { return amps_.squaredNorm(); }
    double population(std::size_t index) const { return std::norm(amps_(static_cast<Eigen::Index>(index))); }

    // Site addressing: sites 0..k-1 are atoms, k..k+c-1 cavities.
    bool site_bit(std::size_t index, int site) const;
    std::size_t flip_site(std::size_t index, int site) const;
    // '+' atoms plus photons in basis state |index|.
    int excitation(std::size_t index) const;
    double excitation_expectation() const;

    // Probability that a site holds a given bit (atom: 1 = |+>; cavity:
    // photon number).
    double site_probability(int site, bool value) const;

    // Human-readable label, e.g. "plusminus0" for |+,-,0>. Atoms print as
    // plus/minus words, cavities as photon digits.
    std::string label(std::size_t index) const;

private:
    JointState() = default;
    int atoms_ = 0;
    int cavities_ = 0;
    Eigen::VectorXcd amps_;
};

}  // namespace scrap
