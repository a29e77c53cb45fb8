#include "retnqs/ansatz/encoding.hpp"

#include "retnqs/util/errors.hpp"

#include <bit>

namespace retnqs::ansatz {

namespace {
constexpr std::uint64_t up_mask = 0x5555555555555555ULL;   // even qubits
constexpr std::uint64_t down_mask = 0xAAAAAAAAAAAAAAAAULL; // odd qubits
} // namespace

auto encode(SpinConfiguration x, std::size_t n_qubits) -> OrbitalSequence
{
    if (n_qubits % 2 != 0) {
        throw ConfigError{"cannot pair " + std::to_string(n_qubits) + " qubits into orbitals"};
    }
    auto const n_orb = n_qubits / 2;
    OrbitalSequence tokens(n_orb);
    for (std::size_t j = 0; j < n_orb; ++j) {
        auto const p = n_orb - 1 - j;
        auto const up = (x >> (2 * p)) & 1U;
        auto const down = (x >> (2 * p + 1)) & 1U;
        tokens[j] = static_cast<std::uint8_t>(2 * up + down);
    }
    return tokens;
}

auto decode(std::span<std::uint8_t const> tokens) -> SpinConfiguration
{
    auto const n_orb = tokens.size();
    SpinConfiguration x = 0;
    for (std::size_t j = 0; j < n_orb; ++j) {
        auto const p = n_orb - 1 - j;
        x |= static_cast<SpinConfiguration>(token_up(tokens[j])) << (2 * p);
        x |= static_cast<SpinConfiguration>(token_down(tokens[j])) << (2 * p + 1);
    }
    return x;
}

auto feasible_tokens(SystemInfo const& sys, PrefixCounts const& prefix) -> std::array<std::uint8_t, vocab_size>
{
    auto const remaining_after = sys.n_orbitals() - prefix.length - 1;
    std::array<std::uint8_t, vocab_size> ok{};
    for (std::size_t t = 0; t < vocab_size; ++t) {
        auto const up = prefix.up + token_up(t);
        auto const down = prefix.down + token_down(t);
        ok[t] = static_cast<std::uint8_t>(up <= sys.n_up && down <= sys.n_down && sys.n_up - up <= remaining_after
                                          && sys.n_down - down <= remaining_after);
    }
    return ok;
}

auto in_sector(SystemInfo const& sys, SpinConfiguration x) -> bool
{
    if (sys.n_qubits < 64 && (x >> sys.n_qubits) != 0) { return false; }
    return static_cast<std::size_t>(std::popcount(x & up_mask)) == sys.n_up
           && static_cast<std::size_t>(std::popcount(x & down_mask)) == sys.n_down;
}

auto sector_configs(SystemInfo const& sys) -> std::vector<SpinConfiguration>
{
    if (sys.n_qubits > 40) { throw ConfigError{"sector enumeration limited to 40 qubits"}; }
    // Enumerate up and down occupations independently.
    auto const n_orb = sys.n_orbitals();
    auto subsets = [n_orb](std::size_t k) {
        std::vector<std::uint64_t> out;
        for (std::uint64_t m = 0; m < (std::uint64_t{1} << n_orb); ++m) {
            if (static_cast<std::size_t>(std::popcount(m)) == k) { out.push_back(m); }
        }
        return out;
    };
    auto spread = [n_orb](std::uint64_t m, std::size_t offset) {
        std::uint64_t x = 0;
        for (std::size_t p = 0; p < n_orb; ++p) {
            if (((m >> p) & 1U) != 0) { x |= std::uint64_t{1} << (2 * p + offset); }
        }
        return x;
    };
    std::vector<SpinConfiguration> out;
    for (auto u : subsets(sys.n_up)) {
        for (auto d : subsets(sys.n_down)) { out.push_back(spread(u, 0) | spread(d, 1)); }
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace retnqs::ansatz
