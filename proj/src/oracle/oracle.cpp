#include "retnqs/oracle/oracle.hpp"

#include "retnqs/util/errors.hpp"
#include "retnqs/util/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

namespace retnqs::oracle {

namespace {

constexpr std::uint64_t even_bits = 0x5555555555555555ULL;
constexpr std::uint64_t odd_bits = 0xAAAAAAAAAAAAAAAAULL;

auto index_of(std::span<SpinConfiguration const> basis, SpinConfiguration x) -> std::optional<std::size_t>
{
    auto it = std::lower_bound(basis.begin(), basis.end(), x);
    if (it == basis.end() || *it != x) { return std::nullopt; }
    return static_cast<std::size_t>(it - basis.begin());
}

/// y = H x restricted to `basis`.
void apply(QubitHamiltonian const& h, std::span<SpinConfiguration const> basis, Eigen::VectorXd const& x,
           Eigen::VectorXd& y)
{
    y.setZero(x.size());
    parallel_for(basis.size(), default_worker_count(), [&](std::size_t begin, std::size_t end) {
        std::vector<ham::Connection> row;
        for (auto i = begin; i < end; ++i) {
            h.connected(basis[i], row);
            double acc = 0.0;
            for (auto const& c : row) {
                if (auto j = index_of(basis, c.config)) { acc += c.value * x[static_cast<Eigen::Index>(*j)]; }
            }
            y[static_cast<Eigen::Index>(i)] = acc;
        }
    });
}

auto lanczos(QubitHamiltonian const& h, std::span<SpinConfiguration const> basis, LanczosOptions const& opts)
    -> GroundState
{
    auto const dim = static_cast<Eigen::Index>(basis.size());
    auto const m_max = static_cast<Eigen::Index>(std::min<std::size_t>(opts.krylov_dim, basis.size()));

    std::mt19937_64 rng{0x1a2c05};
    std::normal_distribution<double> normal;
    Eigen::VectorXd start(dim);
    for (Eigen::Index i = 0; i < dim; ++i) { start[i] = normal(rng); }
    start.normalize();

    std::size_t total = 0;
    double previous = std::numeric_limits<double>::infinity();
    double residual = std::numeric_limits<double>::infinity();
    Eigen::MatrixXd v(dim, m_max);
    Eigen::VectorXd w(dim);
    while (total < opts.max_iterations) {
        // One Lanczos cycle from `start`, fully reorthogonalized.
        std::vector<double> alpha;
        std::vector<double> beta;
        v.col(0) = start;
        Eigen::Index m = 0;
        double ritz = 0.0;
        Eigen::VectorXd coeffs;
        bool invariant = false;
        for (; m < m_max && total < opts.max_iterations; ++m, ++total) {
            apply(h, basis, v.col(m), w);
            alpha.push_back(v.col(m).dot(w));
            for (int pass = 0; pass < 2; ++pass) {
                w -= v.leftCols(m + 1) * (v.leftCols(m + 1).transpose() * w);
            }
            auto const b = w.norm();

            Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m + 1, m + 1);
            for (Eigen::Index i = 0; i <= m; ++i) {
                t(i, i) = alpha[static_cast<std::size_t>(i)];
                if (i > 0) { t(i, i - 1) = t(i - 1, i) = beta[static_cast<std::size_t>(i - 1)]; }
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{t};
            ritz = es.eigenvalues()[0];
            coeffs = es.eigenvectors().col(0);
            residual = b * std::abs(coeffs[m]);
            auto const converged = std::abs(ritz - previous) < opts.tolerance && residual < 1e-6;
            previous = ritz;
            if (converged || b < 1e-12 || m + 1 == dim) {
                invariant = true;
                ++m;
                ++total;
                break;
            }
            beta.push_back(b);
            if (m + 1 < m_max) { v.col(m + 1) = w / b; }
        }
        Eigen::VectorXd x = v.leftCols(m) * coeffs.head(m);
        x.normalize();
        if (invariant) {
            apply(h, basis, x, w);
            residual = (w - ritz * x).norm();
            GroundState gs;
            gs.energy = ritz;
            gs.solver = Solver::lanczos;
            gs.iterations = total;
            gs.residual = residual;
            gs.state.basis.assign(basis.begin(), basis.end());
            gs.state.amplitudes.resize(basis.size());
            for (Eigen::Index i = 0; i < dim; ++i) { gs.state.amplitudes[static_cast<std::size_t>(i)] = x[i]; }
            return gs;
        }
        start = x;
    }
    throw NumericalError{"Lanczos did not converge after " + std::to_string(total)
                         + " iterations (residual norm " + std::to_string(residual) + ")"};
}

} // namespace

auto DenseState::norm() const -> double
{
    double s = 0.0;
    for (auto const& a : amplitudes) { s += std::norm(a); }
    return std::sqrt(s);
}

auto basis_configs(std::size_t n_qubits, std::optional<Sector> sector) -> std::vector<SpinConfiguration>
{
    if (n_qubits > 30) { throw ConfigError{"basis enumeration limited to 30 qubits"}; }
    std::vector<SpinConfiguration> out;
    for (SpinConfiguration x = 0; x < (SpinConfiguration{1} << n_qubits); ++x) {
        if (sector) {
            if (static_cast<std::size_t>(std::popcount(x & even_bits)) != sector->n_up
                || static_cast<std::size_t>(std::popcount(x & odd_bits)) != sector->n_down) {
                continue;
            }
        }
        out.push_back(x);
    }
    return out;
}

auto dense_matrix(QubitHamiltonian const& h) -> Eigen::MatrixXd
{
    if (h.n_qubits() > 12) { throw ConfigError{"dense matrix limited to 12 qubits"}; }
    auto basis = basis_configs(h.n_qubits(), std::nullopt);
    return projected_matrix(h, basis);
}

auto projected_matrix(QubitHamiltonian const& h, std::span<SpinConfiguration const> basis) -> Eigen::MatrixXd
{
    auto const n = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    std::vector<ham::Connection> row;
    for (Eigen::Index i = 0; i < n; ++i) {
        h.connected(basis[static_cast<std::size_t>(i)], row);
        for (auto const& c : row) {
            if (auto j = index_of(basis, c.config)) { m(i, static_cast<Eigen::Index>(*j)) += c.value; }
        }
    }
    return m;
}

auto ground_state(QubitHamiltonian const& h, std::optional<Sector> sector, Solver solver, LanczosOptions const& opts)
    -> GroundState
{
    if (h.n_qubits() > 20) { throw ConfigError{"exact diagonalization limited to 20 qubits"}; }
    auto basis = basis_configs(h.n_qubits(), sector);
    if (basis.empty()) { throw ConfigError{"the requested sector contains no configurations"}; }
    if (solver == Solver::automatic) { solver = basis.size() <= dense_basis_limit ? Solver::dense : Solver::lanczos; }
    if (solver == Solver::lanczos) { return lanczos(h, basis, opts); }
    if (basis.size() > 4096) { throw ConfigError{"dense eigensolve limited to 4096 basis states"}; }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{projected_matrix(h, basis)};
    if (es.info() != Eigen::Success) { throw NumericalError{"dense eigensolver failed"}; }
    GroundState gs;
    gs.energy = es.eigenvalues()[0];
    gs.solver = Solver::dense;
    gs.state.basis = std::move(basis);
    gs.state.amplitudes.resize(gs.state.basis.size());
    for (std::size_t i = 0; i < gs.state.basis.size(); ++i) {
        gs.state.amplitudes[i] = es.eigenvectors()(static_cast<Eigen::Index>(i), 0);
    }
    return gs;
}

auto exact_expectation(QubitHamiltonian const& h, DenseState const& psi) -> double
{
    std::complex<double> num = 0.0;
    std::vector<ham::Connection> row;
    for (std::size_t i = 0; i < psi.basis.size(); ++i) {
        if (psi.amplitudes[i] == 0.0) { continue; }
        h.connected(psi.basis[i], row);
        std::complex<double> h_psi = 0.0;
        for (auto const& c : row) {
            if (auto j = index_of(psi.basis, c.config)) { h_psi += c.value * psi.amplitudes[*j]; }
        }
        num += std::conj(psi.amplitudes[i]) * h_psi;
    }
    auto const nrm = psi.norm();
    if (nrm == 0.0) { throw NumericalError{"expectation of a zero state"}; }
    return num.real() / (nrm * nrm);
}

auto exact_entropy(DenseState const& psi) -> double
{
    auto const nrm2 = psi.norm() * psi.norm();
    if (nrm2 == 0.0) { throw NumericalError{"entropy of a zero state"}; }
    double s = 0.0;
    for (auto const& a : psi.amplitudes) {
        auto const p = std::norm(a) / nrm2;
        if (p > 0.0) { s -= p * std::log(p); }
    }
    return s;
}

auto enumerate_state(ansatz::Ansatz const& model) -> DenseState
{
    auto const& sys = model.system();
    if (sys.n_qubits > 24) { throw ConfigError{"state enumeration limited to 24 qubits"}; }
    DenseState psi;
    psi.basis = basis_configs(sys.n_qubits, Sector{sys.n_up, sys.n_down});
    auto amps = model.log_amplitudes(psi.basis);
    psi.amplitudes.reserve(amps.size());
    for (auto const& a : amps) { psi.amplitudes.push_back(a.value()); }
    return psi;
}

auto enumerate_full_state(ansatz::Ansatz const& model) -> DenseState
{
    auto const n = model.system().n_qubits;
    if (n > 16) { throw ConfigError{"full state enumeration limited to 16 qubits"}; }
    DenseState psi;
    psi.basis = basis_configs(n, std::nullopt);
    auto amps = model.log_amplitudes(psi.basis);
    psi.amplitudes.reserve(amps.size());
    for (auto const& a : amps) { psi.amplitudes.push_back(a.value()); }
    return psi;
}

auto exact_expectation(QubitHamiltonian const& h, ansatz::Ansatz const& model) -> double
{
    return exact_expectation(h, enumerate_state(model));
}

auto exact_entropy(ansatz::Ansatz const& model) -> double { return exact_entropy(enumerate_state(model)); }

auto fd_gradient(std::function<double(std::span<double const>)> const& f, std::span<double const> x, double step)
    -> std::vector<double>
{
    std::vector<double> point(x.begin(), x.end());
    std::vector<double> grad(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        point[i] = x[i] + step;
        auto const up = f(point);
        point[i] = x[i] - step;
        auto const down = f(point);
        point[i] = x[i];
        grad[i] = (up - down) / (2.0 * step);
    }
    return grad;
}

auto fd_gradient(ansatz::Ansatz const& model, std::function<double(ansatz::Ansatz const&)> const& f, double step)
    -> std::vector<double>
{
    auto probe = model;
    auto const flat = model.parameters().flatten();
    return fd_gradient(
        [&](std::span<double const> p) {
            probe.parameters().assign_flat(p);
            return f(probe);
        },
        flat, step);
}

auto creation_matrix(std::size_t mode, std::size_t n_modes) -> Eigen::MatrixXd
{
    if (n_modes > 12 || mode >= n_modes) { throw ConfigError{"creation_matrix: mode outside a <=12-mode space"}; }
    auto const dim = Eigen::Index{1} << n_modes;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index s = 0; s < dim; ++s) {
        auto const occ = static_cast<std::uint64_t>(s);
        if ((occ >> mode) & 1U) { continue; }
        auto const below = std::popcount(occ & ((std::uint64_t{1} << mode) - 1));
        a(static_cast<Eigen::Index>(occ | (std::uint64_t{1} << mode)), s) = (below % 2 == 0) ? 1.0 : -1.0;
    }
    return a;
}

auto annihilation_matrix(std::size_t mode, std::size_t n_modes) -> Eigen::MatrixXd
{
    return creation_matrix(mode, n_modes).transpose();
}

auto dense_fermionic_hamiltonian(ham::MolecularIntegrals const& mi) -> Eigen::MatrixXd
{
    auto const n_orb = mi.n_orbitals();
    auto const n_modes = 2 * n_orb;
    if (n_modes > 8) { throw ConfigError{"dense fermionic construction limited to 8 spin orbitals"}; }
    auto const dim = Eigen::Index{1} << n_modes;
    std::vector<Eigen::MatrixXd> cre(n_modes);
    std::vector<Eigen::MatrixXd> ann(n_modes);
    for (std::size_t m = 0; m < n_modes; ++m) {
        cre[m] = creation_matrix(m, n_modes);
        ann[m] = cre[m].transpose();
    }
    auto mode = [](std::size_t p, std::size_t spin) { return 2 * p + spin; };

    Eigen::MatrixXd h = mi.core_energy() * Eigen::MatrixXd::Identity(dim, dim);
    for (std::size_t p = 0; p < n_orb; ++p) {
        for (std::size_t q = 0; q < n_orb; ++q) {
            auto const t = mi.h1(p, q);
            if (t == 0.0) { continue; }
            for (std::size_t s = 0; s < 2; ++s) { h += t * cre[mode(p, s)] * ann[mode(q, s)]; }
        }
    }
    // Chemist-notation integrals (pq|rs): 1/2 sum a+_p,s a+_r,t a_s,t a_q,s.
    for (std::size_t p = 0; p < n_orb; ++p) {
        for (std::size_t q = 0; q < n_orb; ++q) {
            for (std::size_t r = 0; r < n_orb; ++r) {
                for (std::size_t s = 0; s < n_orb; ++s) {
                    auto const v = mi.h2(p, q, r, s);
                    if (v == 0.0) { continue; }
                    for (std::size_t a = 0; a < 2; ++a) {
                        for (std::size_t b = 0; b < 2; ++b) {
                            h += 0.5 * v * cre[mode(p, a)] * cre[mode(r, b)] * ann[mode(s, b)] * ann[mode(q, a)];
                        }
                    }
                }
            }
        }
    }
    return h;
}

} // namespace retnqs::oracle
