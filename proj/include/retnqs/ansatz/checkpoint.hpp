#pragma once

#include "retnqs/ansatz/ansatz.hpp"

#include <filesystem>
#include <iosfwd>

namespace retnqs::ansatz {

/// Training bookkeeping stored next to the parameters.
struct CheckpointMeta {
    std::uint64_t step = 0;
    double baseline = 0.0;
    double best_energy = 0.0;
    bool has_best = false;
};

struct Checkpoint {
    Ansatz ansatz;
    CheckpointMeta meta;
};

/// JSON document holding the ansatz config, sector, named parameter arrays
/// and their Adam moments.
void save_checkpoint(std::ostream& out, Ansatz const& ansatz, CheckpointMeta const& meta = {});
void save_checkpoint(std::filesystem::path const& path, Ansatz const& ansatz, CheckpointMeta const& meta = {});

/// Throws ParseError for malformed documents and DimensionError when a stored
/// array does not match the shape implied by the config.
auto load_checkpoint(std::istream& in) -> Checkpoint;
auto load_checkpoint(std::filesystem::path const& path) -> Checkpoint;

} // namespace retnqs::ansatz
