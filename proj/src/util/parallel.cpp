#include "retnqs/util/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace retnqs {

auto default_worker_count() -> std::size_t
{
    if (auto const* env = std::getenv("RETNQS_WORKERS")) {
        try {
            auto const n = std::stoul(env);
            if (n > 0) { return n; }
        } catch (std::exception const&) {
            // fall through to the default
        }
    }
    return 1;
}

void parallel_for(std::size_t n, std::size_t workers,
                  std::function<void(std::size_t, std::size_t)> const& body)
{
    if (n == 0) { return; }
    workers = std::clamp<std::size_t>(workers, 1, n);
    if (workers == 1) {
        body(0, n);
        return;
    }
    auto const chunk = (n + workers - 1) / workers;
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        auto const begin = w * chunk;
        auto const end = std::min(n, begin + chunk);
        if (begin >= end) { break; }
        threads.emplace_back([&, w, begin, end] {
            try {
                body(begin, end);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) { t.join(); }
    for (auto const& e : errors) {
        if (e) { std::rethrow_exception(e); }
    }
}

} // namespace retnqs
