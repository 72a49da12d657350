#pragma once

#include <cstdint>
#include <functional>

namespace hofa {

/// Runtime limits shared by the exhaustive enumeration routines.
///
/// The budget caps the number of grid terms a single call is allowed to
/// evaluate; callers that would exceed it fail fast with resource_error
/// instead of silently running for hours. The default can be adjusted with
/// the HOFA_BUDGET environment variable, or per call site.
struct RunConfig {
    std::uint64_t budget = 10'000'000;
    int threads = 0; // 0 means one worker per hardware thread

    static RunConfig from_env();
};

/// Splits [0, n) into a fixed number of contiguous chunks and runs `body`
/// on each, possibly concurrently. The chunk boundaries depend only on n,
/// never on the worker count, so any per-chunk accumulation is
/// deterministic across machines and thread settings.
void parallel_for(std::uint64_t n, int threads,
                  const std::function<void(std::uint64_t chunk, std::uint64_t begin,
                                           std::uint64_t end)>& body);

/// Number of chunks parallel_for will use for a range of length n.
std::uint64_t parallel_chunk_count(std::uint64_t n);

} // namespace hofa
