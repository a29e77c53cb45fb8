#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace retnqs::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 1;
inline constexpr int exit_runtime = 2;

/// Entry point shared by the executable and the tests. args excludes argv[0].
auto run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err) -> int;

} // namespace retnqs::cli
