#include "retnqs/hamiltonian/fcidump.hpp"

#include "retnqs/util/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

namespace retnqs::ham {

MolecularIntegrals::MolecularIntegrals(std::size_t n_orbitals, std::size_t n_electrons, int ms2)
    : n_orbitals_{n_orbitals}
    , n_electrons_{n_electrons}
    , ms2_{ms2}
    , h1_(n_orbitals * n_orbitals, 0.0)
    , h2_(n_orbitals * n_orbitals * n_orbitals * n_orbitals, 0.0)
{
    if (n_orbitals == 0) { throw ConfigError{"integrals: need at least one orbital"}; }
    if (n_electrons > 2 * n_orbitals) {
        throw ConfigError{"integrals: " + std::to_string(n_electrons) + " electrons do not fit in "
                          + std::to_string(n_orbitals) + " spatial orbitals"};
    }
    auto const n = static_cast<long>(n_electrons);
    if (std::abs(ms2) > n || (n + ms2) % 2 != 0) {
        throw ConfigError{"integrals: MS2=" + std::to_string(ms2) + " inconsistent with "
                          + std::to_string(n_electrons) + " electrons"};
    }
    if (n_up() > n_orbitals || n_down() > n_orbitals) {
        throw ConfigError{"integrals: spin sector does not fit the orbital count"};
    }
}

auto MolecularIntegrals::n_up() const noexcept -> std::size_t
{
    return static_cast<std::size_t>((static_cast<long>(n_electrons_) + ms2_) / 2);
}

auto MolecularIntegrals::n_down() const noexcept -> std::size_t
{
    return static_cast<std::size_t>((static_cast<long>(n_electrons_) - ms2_) / 2);
}

void MolecularIntegrals::set_h1(std::size_t p, std::size_t q, double value)
{
    h1_[p * n_orbitals_ + q] = value;
    h1_[q * n_orbitals_ + p] = value;
}

void MolecularIntegrals::set_h2(std::size_t p, std::size_t q, std::size_t r, std::size_t s, double value)
{
    auto const n = n_orbitals_;
    auto put = [&](std::size_t a, std::size_t b, std::size_t c, std::size_t d) {
        h2_[((a * n + b) * n + c) * n + d] = value;
    };
    put(p, q, r, s);
    put(q, p, r, s);
    put(p, q, s, r);
    put(q, p, s, r);
    put(r, s, p, q);
    put(s, r, p, q);
    put(r, s, q, p);
    put(s, r, q, p);
}

void MolecularIntegrals::validate(double tol) const
{
    auto const n = n_orbitals_;
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = 0; q < n; ++q) {
            if (std::abs(h1(p, q) - h1(q, p)) > tol) {
                throw ConfigError{"integrals: h1 is not symmetric at (" + std::to_string(p) + ","
                                  + std::to_string(q) + ")"};
            }
            for (std::size_t r = 0; r < n; ++r) {
                for (std::size_t s = 0; s < n; ++s) {
                    auto const v = h2(p, q, r, s);
                    for (auto w : {h2(q, p, r, s), h2(p, q, s, r), h2(r, s, p, q)}) {
                        if (std::abs(v - w) > tol) {
                            throw ConfigError{"integrals: h2 violates 8-fold permutational symmetry"};
                        }
                    }
                }
            }
        }
    }
    if (n_electrons_ > 2 * n) { throw ConfigError{"integrals: too many electrons"}; }
}

namespace {

auto upper(std::string s) -> std::string
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
    return s;
}

auto parse_int(std::string const& token, std::size_t line) -> long
{
    long value = 0;
    auto const* end = token.data() + token.size();
    auto const [ptr, ec] = std::from_chars(token.data(), end, value);
    if (ec != std::errc{} || ptr != end) { throw ParseError{"expected an integer, got '" + token + "'", line}; }
    return value;
}

auto parse_real(std::string token, std::size_t line) -> double
{
    // Fortran double-precision exponents.
    std::replace(token.begin(), token.end(), 'D', 'E');
    std::replace(token.begin(), token.end(), 'd', 'e');
    try {
        std::size_t used = 0;
        auto const value = std::stod(token, &used);
        if (used != token.size()) { throw std::invalid_argument{token}; }
        return value;
    } catch (std::exception const&) {
        throw ParseError{"expected a numeric value, got '" + token + "'", line};
    }
}

struct Header {
    std::map<std::string, std::vector<std::string>> fields;
    std::size_t end_line = 0;
};

auto read_header(std::istream& in, std::size_t& line_no) -> Header
{
    std::string text;
    std::string line;
    bool started = false;
    bool finished = false;
    while (!finished && std::getline(in, line)) {
        ++line_no;
        auto const up = upper(line);
        if (!started) {
            auto const pos = up.find("&FCI");
            if (pos == std::string::npos) {
                if (up.find_first_not_of(" \t\r") == std::string::npos) { continue; }
                throw ParseError{"FCIDUMP header must start with &FCI", line_no};
            }
            started = true;
            text += up.substr(pos + 4);
        } else {
            text += " " + up;
        }
        for (auto const* terminator : {"&END", "/"}) {
            auto const pos = text.find(terminator);
            if (pos != std::string::npos) {
                text.erase(pos);
                finished = true;
                break;
            }
        }
    }
    if (!started) { throw ParseError{"missing &FCI header", line_no}; }
    if (!finished) { throw ParseError{"unterminated FCIDUMP header (no &END or /)", line_no}; }

    std::replace(text.begin(), text.end(), ',', ' ');
    std::string spaced;
    for (char c : text) {
        if (c == '=') {
            spaced += " = ";
        } else {
            spaced += c;
        }
    }
    std::istringstream tokens_in{spaced};
    std::vector<std::string> tokens;
    for (std::string t; tokens_in >> t;) { tokens.push_back(t); }

    Header header;
    header.end_line = line_no;
    std::string key;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i + 1 < tokens.size() && tokens[i + 1] == "=") {
            key = tokens[i];
            header.fields[key];
            ++i;
        } else if (tokens[i] == "=") {
            throw ParseError{"malformed FCIDUMP header near '='", line_no};
        } else {
            if (key.empty()) { throw ParseError{"malformed FCIDUMP header token '" + tokens[i] + "'", line_no}; }
            header.fields[key].push_back(tokens[i]);
        }
    }
    return header;
}

auto header_int(Header const& h, std::string const& key, std::size_t line, bool required, long fallback = 0)
    -> long
{
    auto const it = h.fields.find(key);
    if (it == h.fields.end() || it->second.empty()) {
        if (required) { throw ParseError{"FCIDUMP header is missing " + key + "=", line}; }
        return fallback;
    }
    return parse_int(it->second.front(), line);
}

} // namespace

auto parse_fcidump(std::istream& in) -> MolecularIntegrals
{
    std::size_t line_no = 0;
    auto const header = read_header(in, line_no);
    auto const norb = header_int(header, "NORB", header.end_line, true);
    auto const nelec = header_int(header, "NELEC", header.end_line, true);
    auto const ms2 = header_int(header, "MS2", header.end_line, false, nelec % 2);
    if (norb <= 0 || norb > 32) {
        throw ParseError{"NORB must lie in [1, 32], got " + std::to_string(norb), header.end_line};
    }
    if (nelec < 0) { throw ParseError{"NELEC must be non-negative", header.end_line}; }

    MolecularIntegrals mi = [&] {
        try {
            return MolecularIntegrals{static_cast<std::size_t>(norb), static_cast<std::size_t>(nelec),
                                      static_cast<int>(ms2)};
        } catch (ConfigError const& e) {
            throw ParseError{e.what(), header.end_line};
        }
    }();

    std::string line;
    double core = 0.0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream fields{line};
        std::vector<std::string> tokens;
        for (std::string t; fields >> t;) { tokens.push_back(t); }
        if (tokens.empty()) { continue; }
        if (tokens.size() != 5) {
            throw ParseError{"expected 'value i j k l', got " + std::to_string(tokens.size()) + " fields", line_no};
        }
        auto const value = parse_real(tokens[0], line_no);
        long idx[4];
        for (int k = 0; k < 4; ++k) {
            idx[k] = parse_int(tokens[static_cast<std::size_t>(k) + 1], line_no);
            if (idx[k] < 0 || idx[k] > norb) {
                throw ParseError{"orbital index " + std::to_string(idx[k]) + " out of range [0, "
                                     + std::to_string(norb) + "]",
                                 line_no};
            }
        }
        auto const [i, j, k, l] = idx;
        if (i == 0 && j == 0 && k == 0 && l == 0) {
            core += value;
        } else if (i > 0 && j > 0 && k == 0 && l == 0) {
            mi.set_h1(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1), value);
        } else if (i > 0 && j > 0 && k > 0 && l > 0) {
            mi.set_h2(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1),
                      static_cast<std::size_t>(k - 1), static_cast<std::size_t>(l - 1), value);
        } else if (i > 0 && j == 0 && k == 0 && l == 0) {
            // orbital energy record; not part of the Hamiltonian
        } else {
            throw ParseError{"unsupported index pattern", line_no};
        }
    }
    mi.set_core_energy(core);
    return mi;
}

auto parse_fcidump(std::filesystem::path const& path) -> MolecularIntegrals
{
    std::ifstream in{path};
    if (!in) { throw ParseError{"cannot open FCIDUMP file '" + path.string() + "'", 0}; }
    return parse_fcidump(in);
}

} // namespace retnqs::ham
