#include "helpers.hpp"

#include "retnqs/hamiltonian/fcidump.hpp"
#include "retnqs/hamiltonian/jordan_wigner.hpp"
#include "retnqs/hamiltonian/qubit_hamiltonian.hpp"
#include "retnqs/util/errors.hpp"

#include <doctest.h>

#include <complex>
#include <filesystem>
#include <map>
#include <sstream>

using namespace retnqs;
using namespace retnqs::ham;

namespace {

using Complex = std::complex<double>;
using Dense = std::vector<std::vector<Complex>>;

auto pauli_matrix(char op) -> Dense
{
    Complex const i{0.0, 1.0};
    switch (op) {
    case 'X': return {{0, 1}, {1, 0}};
    case 'Y': return {{0, -i}, {i, 0}};
    case 'Z': return {{1, 0}, {0, -1}};
    default: return {{1, 0}, {0, 1}};
    }
}

// Kronecker product with qubit 0 as the least significant bit of the index.
auto kron_string(std::string const& ops) -> Dense
{
    Dense m{{1.0}};
    for (char op : ops) {
        auto p = pauli_matrix(op);
        auto const n = m.size();
        Dense out(2 * n, std::vector<Complex>(2 * n));
        for (std::size_t a = 0; a < 2; ++a) {
            for (std::size_t b = 0; b < 2; ++b) {
                for (std::size_t r = 0; r < n; ++r) {
                    for (std::size_t c = 0; c < n; ++c) { out[a * n + r][b * n + c] = p[a][b] * m[r][c]; }
                }
            }
        }
        m = std::move(out);
    }
    return m;
}

auto dense_of(std::vector<PauliTerm> const& terms, std::size_t n, double offset) -> Dense
{
    auto const dim = std::size_t{1} << n;
    Dense h(dim, std::vector<Complex>(dim));
    for (std::size_t k = 0; k < dim; ++k) { h[k][k] = offset; }
    for (auto const& t : terms) {
        auto p = kron_string(t.ops);
        for (std::size_t r = 0; r < dim; ++r) {
            for (std::size_t c = 0; c < dim; ++c) { h[r][c] += t.coefficient * p[r][c]; }
        }
    }
    return h;
}

auto as_map(std::vector<PauliTerm> const& terms) -> std::map<std::string, double>
{
    std::map<std::string, double> m;
    for (auto const& t : terms) { m[t.ops] += t.coefficient; }
    return m;
}

auto parse_text(std::string const& text) -> MolecularIntegrals
{
    std::istringstream in{text};
    return parse_fcidump(in);
}

} // namespace

TEST_CASE("fcidump parsing")
{
    auto h2 = parse_fcidump(test_support::fixture("h2.fcidump"));
    CHECK(h2.n_orbitals() == 2);
    CHECK(h2.n_electrons() == 2);
    CHECK(h2.n_up() == 1);
    CHECK(h2.n_down() == 1);

    auto single = parse_text("&FCI NORB=1,NELEC=1 &END\n0.5 1 1 0 0\n");
    CHECK(single.h1(0, 0) == 0.5);
    CHECK(single.core_energy() == 0.0);

    auto sym = parse_text("&FCI NORB=2,NELEC=2,MS2=0, &END\n0.25 1 2 2 2\n-1.5 0 0 0 0\n");
    CHECK(sym.core_energy() == -1.5);
    CHECK(sym.h2(2 - 1, 2 - 1, 1 - 1, 2 - 1) == 0.25);
    CHECK(sym.h2(1, 1, 1, 0) == 0.25);

    CHECK_THROWS_AS(parse_text("&FCI NORB=2,NELEC=2 &END\n1.0 3 1 0 0\n"), ParseError);
    CHECK_THROWS_AS(parse_text("&FCI NELEC=2 &END\n1.0 1 1 0 0\n"), ParseError);
    CHECK_THROWS_AS(parse_text("&FCI NORB=2,NELEC=2 &END\nabc 1 1 0 0\n"), ParseError);
    CHECK_THROWS_AS(parse_fcidump(std::filesystem::path{"/nonexistent/file"}), ParseError);
    try {
        parse_text("&FCI NORB=2,NELEC=2 &END\n0.1 1 1 0 0\n1.0 3 1 0 0\n");
    } catch (ParseError const& e) {
        CHECK(std::string{e.what()}.find("line 3") != std::string::npos);
    }
}

TEST_CASE("jordan-wigner identities")
{
    auto number = jordan_wigner({FermionTerm{1.0, {{0, true}, {0, false}}}}, 2);
    auto m = as_map(number);
    CHECK(m.size() == 2);
    CHECK(m["II"] == doctest::Approx(0.5));
    CHECK(m["ZI"] == doctest::Approx(-0.5));

    auto hop = as_map(jordan_wigner(
        {FermionTerm{1.0, {{0, true}, {1, false}}}, FermionTerm{1.0, {{1, true}, {0, false}}}}, 2));
    CHECK(hop.size() == 2);
    CHECK(hop["XX"] == doctest::Approx(0.5));
    CHECK(hop["YY"] == doctest::Approx(0.5));

    // a_0 a_0 = 0 vanishes after combination.
    CHECK(jordan_wigner({FermionTerm{1.0, {{0, false}, {0, false}}}}, 1).empty());
}

TEST_CASE("matrix elements follow the Pauli action")
{
    QubitHamiltonian id{1, 0, 0, {{2.0, "I"}}};
    CHECK(id.matrix_element(0, 0) == 2.0);
    CHECK(id.matrix_element(0, 1) == 0.0);
    CHECK(id.connected(1).size() == 1);
    CHECK(id.connected(1)[0].value == 2.0);

    QubitHamiltonian z{1, 0, 0, {{1.0, "Z"}}};
    CHECK(z.matrix_element(0, 0) == 1.0);
    CHECK(z.matrix_element(1, 1) == -1.0);

    QubitHamiltonian x{2, 0, 0, {{1.0, "XI"}}};
    auto conn = x.connected(config_from_string("00"));
    REQUIRE(conn.size() == 1);
    CHECK(config_to_string(conn[0].config, 2) == "10");
    CHECK(conn[0].value == 1.0);

    CHECK_THROWS_AS(matrix_element(x, "0", "00"), DimensionError);
    CHECK_THROWS_AS(QubitHamiltonian(1, 0, 0, {{1.0, "Y"}}), ConfigError);

    std::mt19937_64 rng{11};
    std::uniform_int_distribution<int> pick{0, 3};
    std::normal_distribution<double> normal;
    std::vector<PauliTerm> terms;
    while (terms.size() < 30) {
        std::string ops;
        int ys = 0;
        for (int q = 0; q < 4; ++q) {
            ops += "IXYZ"[pick(rng)];
            ys += ops.back() == 'Y';
        }
        if (ys % 2 == 0) { terms.push_back({normal(rng), ops}); }
    }
    QubitHamiltonian h{4, 2, 0, terms, 0.3};
    auto dense = dense_of(terms, 4, 0.3);
    double worst = 0.0;
    for (std::uint64_t r = 0; r < 16; ++r) {
        for (std::uint64_t c = 0; c < 16; ++c) {
            CHECK(std::abs(dense[r][c].imag()) < 1e-12);
            worst = std::max(worst, std::abs(h.matrix_element(r, c) - dense[r][c].real()));
        }
        for (auto const& conn_entry : h.connected(r)) {
            CHECK(std::abs(conn_entry.value - dense[r][conn_entry.config].real()) < 1e-12);
        }
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("hamiltonian storage and serialization")
{
    auto mi = parse_fcidump(test_support::fixture("h2o.fcidump"));
    auto h = second_quantize_jw(mi);
    CHECK(h.n_qubits() == 14);
    CHECK(h.n_electrons() == 10);
    CHECK(h.flip_mask_count() <= h.term_count());
    CHECK(h.term_count() > 1000);
    for (auto const& g : h.groups()) {
        for (auto const& t : g.terms) { CHECK(t.y_count % 2 == 0); }
    }
    auto const hf = (std::uint64_t{1} << 10) - 1;
    CHECK(h.connected(hf).size() <= h.flip_mask_count());

    auto path = std::filesystem::temp_directory_path() / "retnqs_h2o_roundtrip.txt";
    h.save(path);
    auto back = QubitHamiltonian::load(path);
    std::filesystem::remove(path);
    CHECK(back.n_qubits() == 14);
    CHECK(back.n_electrons() == 10);
    CHECK(back.term_count() == h.term_count());
    CHECK(back.identity_offset() == doctest::Approx(h.identity_offset()).epsilon(1e-15));
    for (std::uint64_t y : {hf, hf ^ std::uint64_t{0b11000000011}, hf ^ std::uint64_t{0b100000000001}}) {
        CHECK(std::abs(back.matrix_element(hf, y) - h.matrix_element(hf, y)) < 1e-15);
    }

    std::istringstream bad{"2 2\n0.5\tXQ\n"};
    PauliFileHeader header;
    CHECK_THROWS_AS(read_pauli_text(bad, header), ParseError);
}
