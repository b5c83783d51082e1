#include "hypersurf/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>

#include <omp.h>

namespace hypersurf::kernels {

namespace {
std::atomic<int> g_threads{0};
}

void set_thread_count(int threads) { g_threads.store(threads < 1 ? 0 : threads); }

int thread_count() {
    const int t = g_threads.load();
    return t > 0 ? t : omp_get_max_threads();
}

namespace serial {

void rb_apply(const RbPlanView& plan, std::span<const double> f, std::span<double> out) {
    for (std::size_t p = 0; p < out.size(); ++p)
        out[p] = plan.g[p] + plan.scale[p] * (f[plan.pre[p]] - plan.b_pre[p]);
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

void piece_ranges(std::span<const double> values, std::span<const std::uint32_t> offsets,
                  std::span<const std::uint32_t> members, std::span<double> out) {
    for (std::size_t w = 0; w + 1 < offsets.size(); ++w) {
        double lo = values[members[offsets[w]]];
        double hi = lo;
        for (auto j = offsets[w] + 1; j < offsets[w + 1]; ++j) {
            lo = std::min(lo, values[members[j]]);
            hi = std::max(hi, values[members[j]]);
        }
        out[w] = hi - lo;
    }
}

void for_each(std::size_t n, const std::function<void(std::size_t)>& body) {
    for (std::size_t i = 0; i < n; ++i) body(i);
}

}  // namespace serial

namespace omp {

void rb_apply(const RbPlanView& plan, std::span<const double> f, std::span<double> out) {
    const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static) num_threads(thread_count())
    for (std::ptrdiff_t p = 0; p < n; ++p)
        out[p] = plan.g[p] + plan.scale[p] * (f[plan.pre[p]] - plan.b_pre[p]);
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    const auto n = static_cast<std::ptrdiff_t>(a.size());
    double m = 0.0;
#pragma omp parallel for schedule(static) reduction(max : m) num_threads(thread_count())
    for (std::ptrdiff_t i = 0; i < n; ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

void piece_ranges(std::span<const double> values, std::span<const std::uint32_t> offsets,
                  std::span<const std::uint32_t> members, std::span<double> out) {
    const auto n = static_cast<std::ptrdiff_t>(offsets.size()) - 1;
#pragma omp parallel for schedule(static) num_threads(thread_count())
    for (std::ptrdiff_t w = 0; w < n; ++w) {
        double lo = values[members[offsets[w]]];
        double hi = lo;
        for (auto j = offsets[w] + 1; j < offsets[w + 1]; ++j) {
            lo = std::min(lo, values[members[j]]);
            hi = std::max(hi, values[members[j]]);
        }
        out[w] = hi - lo;
    }
}

void for_each(std::size_t n, const std::function<void(std::size_t)>& body) {
    std::exception_ptr error;
    const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(thread_count())
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical(hypersurf_for_each_error)
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace omp

}  // namespace hypersurf::kernels
