#pragma once

#include <exception>
#include <thread>
#include <vector>

namespace gspcd {

/// Runs fn(row_begin, row_end) over a contiguous partition of [0, rows).
/// The partition depends only on (rows, threads), and every row is handled by
/// exactly one worker, so any per-row computation writing disjoint output
/// produces the same result for every thread count.
template <class Fn>
void parallel_for_rows(int rows, int threads, Fn&& fn) {
    if (rows <= 0) return;
    int t = threads < 1 ? 1 : threads;
    if (t > rows) t = rows;
    if (t == 1) {
        fn(0, rows);
        return;
    }
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(t));
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(t));
    const int base = rows / t;
    const int extra = rows % t;
    int begin = 0;
    for (int i = 0; i < t; ++i) {
        const int end = begin + base + (i < extra ? 1 : 0);
        workers.emplace_back([&fn, &errors, i, begin, end] {
            try {
                fn(begin, end);
            } catch (...) {
                errors[static_cast<std::size_t>(i)] = std::current_exception();
            }
        });
        begin = end;
    }
    for (auto& w : workers) w.join();
    for (auto& err : errors)
        if (err) std::rethrow_exception(err);
}

}  // namespace gspcd
