#pragma once

#include <cstddef>
#include <functional>

namespace retnqs {

/// Worker count from RETNQS_WORKERS when set, otherwise 1.
auto default_worker_count() -> std::size_t;

/// Splits [0, n) into at most `workers` contiguous chunks and runs `body` on
/// each. Chunk boundaries depend only on (n, workers), so results that are
/// written per index are independent of scheduling.
void parallel_for(std::size_t n, std::size_t workers,
                  std::function<void(std::size_t begin, std::size_t end)> const& body);

} // namespace retnqs
