#pragma once

#include <functional>

namespace napmin {

// Static block partition over [0, n); results must be written to per-index
// slots so the outcome is independent of scheduling. threads <= 1 runs inline.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

}  // namespace napmin
