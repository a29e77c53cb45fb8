#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <vector>

namespace retnqs::ham {

/// One- and two-electron integrals over spatial orbitals.
///
/// `h2` is stored in chemist notation (pq|rs) with the full 8-fold symmetry
/// already expanded.
class MolecularIntegrals {
  public:
    MolecularIntegrals() = default;
    MolecularIntegrals(std::size_t n_orbitals, std::size_t n_electrons, int ms2 = 0);

    auto n_orbitals() const noexcept -> std::size_t { return n_orbitals_; }
    auto n_electrons() const noexcept -> std::size_t { return n_electrons_; }
    auto ms2() const noexcept -> int { return ms2_; }
    auto n_up() const noexcept -> std::size_t;
    auto n_down() const noexcept -> std::size_t;

    auto core_energy() const noexcept -> double { return core_energy_; }
    void set_core_energy(double e) noexcept { core_energy_ = e; }

    auto h1(std::size_t p, std::size_t q) const -> double { return h1_[p * n_orbitals_ + q]; }
    auto h2(std::size_t p, std::size_t q, std::size_t r, std::size_t s) const -> double
    {
        return h2_[((p * n_orbitals_ + q) * n_orbitals_ + r) * n_orbitals_ + s];
    }

    /// Sets h1[p][q] and h1[q][p].
    void set_h1(std::size_t p, std::size_t q, double value);
    /// Sets all eight permutation-equivalent entries of (pq|rs).
    void set_h2(std::size_t p, std::size_t q, std::size_t r, std::size_t s, double value);

    /// Checks the symmetry invariants and electron count; throws ConfigError.
    void validate(double tol = 1e-10) const;

  private:
    std::size_t n_orbitals_ = 0;
    std::size_t n_electrons_ = 0;
    int ms2_ = 0;
    double core_energy_ = 0.0;
    std::vector<double> h1_;
    std::vector<double> h2_;
};

/// Reads a Molpro-style FCIDUMP file (1-based indices in the file).
auto parse_fcidump(std::filesystem::path const& path) -> MolecularIntegrals;
auto parse_fcidump(std::istream& in) -> MolecularIntegrals;

} // namespace retnqs::ham
