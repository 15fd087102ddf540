#pragma once

#include <functional>

namespace flowcert {

/// Runs fn(0..n-1), splitting the index range over up to `threads` workers.
/// Work items must be independent; results keyed by index stay deterministic
/// regardless of thread count.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

}  // namespace flowcert
