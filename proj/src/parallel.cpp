#include "nlg/parallel.hpp"

#include <cstdlib>
#include <thread>
#include <vector>

namespace nlg {

int worker_threads() {
    static int n = [] {
        const char* env = std::getenv("NLG_THREADS");
        if (env == nullptr) return 1;
        int v = std::atoi(env);
        int hw = static_cast<int>(std::thread::hardware_concurrency());
        if (hw <= 0) hw = 1;
        if (v < 1) v = 1;
        if (v > hw) v = hw;
        return v;
    }();
    return n;
}

void parallel_for(int begin, int end, const std::function<void(int, int)>& fn) {
    int n = end - begin;
    int nt = worker_threads();
    if (nt <= 1 || n < 4 * nt) {
        fn(begin, end);
        return;
    }
    std::vector<std::thread> threads;
    threads.reserve(static_cast<size_t>(nt));
    int chunk = (n + nt - 1) / nt;
    for (int t = 0; t < nt; ++t) {
        int lo = begin + t * chunk;
        int hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        threads.emplace_back(fn, lo, hi);
    }
    for (auto& th : threads) th.join();
}

} // namespace nlg
