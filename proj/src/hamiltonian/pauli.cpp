#include "retnqs/hamiltonian/pauli.hpp"

#include "retnqs/util/errors.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace retnqs::ham {

auto to_masks(std::string const& ops) -> PauliMasks
{
    if (ops.size() > 64) { throw DimensionError{"Pauli strings are limited to 64 qubits"}; }
    PauliMasks m;
    for (std::size_t k = 0; k < ops.size(); ++k) {
        auto const bit = std::uint64_t{1} << k;
        switch (ops[k]) {
        case 'I': break;
        case 'X': m.flip |= bit; break;
        case 'Y':
            m.flip |= bit;
            m.sign |= bit;
            ++m.y_count;
            break;
        case 'Z': m.sign |= bit; break;
        default: throw ConfigError{std::string{"invalid Pauli operator '"} + ops[k] + "'"};
        }
    }
    return m;
}

auto to_string(PauliMasks const& masks, std::size_t n_qubits) -> std::string
{
    std::string s(n_qubits, 'I');
    for (std::size_t k = 0; k < n_qubits; ++k) {
        auto const bit = std::uint64_t{1} << k;
        auto const f = (masks.flip & bit) != 0;
        auto const z = (masks.sign & bit) != 0;
        s[k] = f ? (z ? 'Y' : 'X') : (z ? 'Z' : 'I');
    }
    return s;
}

void SymplecticSum::append(SymplecticSum const& other)
{
    terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
}

void SymplecticSum::scale(std::complex<double> factor)
{
    for (auto& t : terms_) { t.c *= factor; }
}

auto SymplecticSum::times(SymplecticSum const& rhs) const -> SymplecticSum
{
    std::vector<Monomial> out;
    out.reserve(terms_.size() * rhs.terms_.size());
    for (auto const& a : terms_) {
        for (auto const& b : rhs.terms_) {
            // Z^za X^xb = (-1)^{|za & xb|} X^xb Z^za
            auto const sign = (std::popcount(a.z & b.x) & 1) != 0 ? -1.0 : 1.0;
            out.push_back({a.x ^ b.x, a.z ^ b.z, sign * a.c * b.c});
        }
    }
    return SymplecticSum{std::move(out)};
}

void SymplecticSum::combine()
{
    std::sort(terms_.begin(), terms_.end(), [](Monomial const& a, Monomial const& b) {
        return a.x != b.x ? a.x < b.x : a.z < b.z;
    });
    std::vector<Monomial> merged;
    for (auto const& t : terms_) {
        if (!merged.empty() && merged.back().x == t.x && merged.back().z == t.z) {
            merged.back().c += t.c;
        } else {
            merged.push_back(t);
        }
    }
    terms_ = std::move(merged);
}

auto SymplecticSum::to_pauli_terms(std::size_t n_qubits, double prune, double imag_tol) const
    -> std::vector<PauliTerm>
{
    SymplecticSum copy = *this;
    copy.combine();
    std::vector<PauliTerm> out;
    for (auto const& t : copy.terms_) {
        // X^x Z^z = (-i)^{|x & z|} P with Y wherever both bits are set.
        auto const y = std::popcount(t.x & t.z);
        static constexpr std::complex<double> phases[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
        auto const alpha = t.c * phases[y % 4];
        if (std::abs(alpha.imag()) > imag_tol) {
            throw NumericalError{"non-Hermitian Pauli coefficient (imaginary part "
                                 + std::to_string(alpha.imag()) + ")"};
        }
        if (std::abs(alpha.real()) < prune) { continue; }
        out.push_back({alpha.real(), to_string(PauliMasks{t.x, t.z, y}, n_qubits)});
    }
    return out;
}

void write_pauli_text(std::ostream& out, PauliFileHeader const& header, std::vector<PauliTerm> const& terms)
{
    out << header.n_qubits << ' ' << header.n_electrons;
    if (header.ms2 != 0) { out << ' ' << header.ms2; }
    out << '\n';
    char buf[64];
    for (auto const& t : terms) {
        std::snprintf(buf, sizeof buf, "%.17g", t.coefficient);
        out << buf << '\t' << t.ops << '\n';
    }
}

auto read_pauli_text(std::istream& in, PauliFileHeader& header) -> std::vector<PauliTerm>
{
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") != std::string::npos) { break; }
    }
    {
        std::istringstream h{line};
        long n_qubits = -1;
        long n_electrons = -1;
        if (!(h >> n_qubits >> n_electrons) || n_qubits <= 0 || n_qubits > 64 || n_electrons < 0) {
            throw ParseError{"expected header 'n_qubits n_electrons [ms2]'", line_no};
        }
        long ms2 = n_electrons % 2;
        if (h >> ms2) {
            // explicit spin projection
        }
        header = {static_cast<std::size_t>(n_qubits), static_cast<std::size_t>(n_electrons), static_cast<int>(ms2)};
    }
    std::vector<PauliTerm> terms;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream fields{line};
        std::string coef;
        std::string ops;
        if (!(fields >> coef)) { continue; }
        if (!(fields >> ops)) { throw ParseError{"missing Pauli string", line_no}; }
        double value = 0.0;
        try {
            std::size_t used = 0;
            value = std::stod(coef, &used);
            if (used != coef.size()) { throw std::invalid_argument{coef}; }
        } catch (std::exception const&) {
            throw ParseError{"non-numeric coefficient '" + coef + "'", line_no};
        }
        if (ops.size() != header.n_qubits) {
            throw ParseError{"Pauli string length " + std::to_string(ops.size()) + " != n_qubits "
                                 + std::to_string(header.n_qubits),
                             line_no};
        }
        if (ops.find_first_not_of("IXYZ") != std::string::npos) {
            throw ParseError{"invalid Pauli string '" + ops + "'", line_no};
        }
        terms.push_back({value, ops});
    }
    return terms;
}

} // namespace retnqs::ham
