#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>

namespace hypersurf {

/// Execution policy for the data-parallel kernels. Both policies produce
/// bit-identical results: parallel loops only write disjoint slots and every
/// reduction is either order-free (max) or performed serially afterwards.
enum class Exec { serial, parallel };

namespace kernels {

/// Worker count used by parallel kernels (OpenMP); values < 1 reset to the default.
void set_thread_count(int threads);
int thread_count();

/// Precomputed gather form of one Read-Bajraktarević step:
///     out[p] = g[p] + scale[p] * (f[pre[p]] - b_pre[p]).
struct RbPlanView {
    std::span<const double> g;
    std::span<const double> scale;
    std::span<const double> b_pre;
    std::span<const std::uint32_t> pre;
};

namespace serial {
void rb_apply(const RbPlanView& plan, std::span<const double> f, std::span<double> out);
double max_abs_diff(std::span<const double> a, std::span<const double> b);
/// out[w] = max - min of values over members[offsets[w] .. offsets[w + 1]).
void piece_ranges(std::span<const double> values, std::span<const std::uint32_t> offsets,
                  std::span<const std::uint32_t> members, std::span<double> out);
void for_each(std::size_t n, const std::function<void(std::size_t)>& body);
}  // namespace serial

namespace omp {
void rb_apply(const RbPlanView& plan, std::span<const double> f, std::span<double> out);
double max_abs_diff(std::span<const double> a, std::span<const double> b);
void piece_ranges(std::span<const double> values, std::span<const std::uint32_t> offsets,
                  std::span<const std::uint32_t> members, std::span<double> out);
/// Runs body(i) for i in [0, n) across workers; the first exception is rethrown.
void for_each(std::size_t n, const std::function<void(std::size_t)>& body);
}  // namespace omp

inline void rb_apply(Exec e, const RbPlanView& plan, std::span<const double> f, std::span<double> out) {
    e == Exec::serial ? serial::rb_apply(plan, f, out) : omp::rb_apply(plan, f, out);
}

inline double max_abs_diff(Exec e, std::span<const double> a, std::span<const double> b) {
    return e == Exec::serial ? serial::max_abs_diff(a, b) : omp::max_abs_diff(a, b);
}

inline void piece_ranges(Exec e, std::span<const double> values, std::span<const std::uint32_t> offsets,
                         std::span<const std::uint32_t> members, std::span<double> out) {
    e == Exec::serial ? serial::piece_ranges(values, offsets, members, out)
                      : omp::piece_ranges(values, offsets, members, out);
}

inline void for_each(Exec e, std::size_t n, const std::function<void(std::size_t)>& body) {
    e == Exec::serial ? serial::for_each(n, body) : omp::for_each(n, body);
}

}  // namespace kernels
}  // namespace hypersurf
