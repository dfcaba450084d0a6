#pragma once

#include <cstddef>
#include <functional>

namespace kfar {

enum class Execution { serial, parallel };

struct RunOptions {
  Execution execution = Execution::parallel;
  int threads = 0;  // 0: OpenMP default
};

/// Calls fn(i) for i in [0, n). The serial path is a plain loop and is the
/// reference the parallel path is tested against. Work items must only write
/// to their own slot; if several throw, the lowest index wins.
void for_each_index(std::size_t n, const RunOptions& options,
                    const std::function<void(std::size_t)>& fn);

}  // namespace kfar
