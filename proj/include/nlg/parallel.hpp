#pragma once

#include <functional>

namespace nlg {

/// Number of worker threads for elementwise loops: the NLG_THREADS
/// environment variable, clamped to [1, hardware_concurrency]. Defaults to 1.
int worker_threads();

/// Runs fn(begin..end) split across worker_threads() disjoint ranges.
/// Each range writes its own elements only, so results are deterministic.
void parallel_for(int begin, int end, const std::function<void(int, int)>& fn);

} // namespace nlg
