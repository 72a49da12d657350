#include "hofa/config.hpp"

#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace hofa {

RunConfig RunConfig::from_env() {
    RunConfig cfg;
    if (const char* s = std::getenv("HOFA_BUDGET")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(s, &end, 10);
        if (end && *end == '\0' && v > 0) cfg.budget = v;
    }
    return cfg;
}

std::uint64_t parallel_chunk_count(std::uint64_t n) {
    // fixed fan-out so that per-chunk partial sums combine identically
    // regardless of how many workers execute them
    if (n < 1024) return n == 0 ? 0 : 1;
    return 64;
}

void parallel_for(std::uint64_t n, int threads,
                  const std::function<void(std::uint64_t, std::uint64_t, std::uint64_t)>& body) {
    const std::uint64_t chunks = parallel_chunk_count(n);
    if (chunks == 0) return;
    if (chunks == 1) {
        body(0, 0, n);
        return;
    }
    unsigned workers = threads > 0 ? static_cast<unsigned>(threads)
                                   : std::max(1u, std::thread::hardware_concurrency());
    if (workers > chunks) workers = static_cast<unsigned>(chunks);

    auto run_range = [&](std::uint64_t c0, std::uint64_t c1) {
        for (std::uint64_t c = c0; c < c1; ++c) {
            std::uint64_t begin = n * c / chunks;
            std::uint64_t end = n * (c + 1) / chunks;
            body(c, begin, end);
        }
    };
    if (workers <= 1) {
        run_range(0, chunks);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        std::uint64_t c0 = chunks * w / workers;
        std::uint64_t c1 = chunks * (w + 1) / workers;
        pool.emplace_back(run_range, c0, c1);
    }
    for (auto& t : pool) t.join();
}

} // namespace hofa
