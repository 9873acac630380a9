#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace quadboost {

/// Raised for every contract violation reported to callers: malformed input
/// files, dimension mismatches, out-of-domain arguments.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Runs fn(i) for i in [0, count) on up to `threads` worker threads.
/// Work items are claimed dynamically; callers must write results into
/// per-index slots so the outcome does not depend on scheduling.
/// threads == 0 selects std::thread::hardware_concurrency().
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace quadboost
