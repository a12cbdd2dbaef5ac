#include <atomic>
#include <cstdlib>
#include <string>

#include "fock/simd.hpp"

namespace fock::simd {

namespace {

Level probe()
{
#if defined(FOCK_HAVE_AVX2)
    __builtin_cpu_init();
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
        return Level::avx2;
    }
#endif
    return Level::scalar;
}

Level initial_level()
{
    const Level detected = detected_level();
    if (const char* env = std::getenv("FOCK_SIMD")) {
        if (std::string(env) == "scalar") {
            return Level::scalar;
        }
    }
    return detected;
}

std::atomic<Level>& current()
{
    static std::atomic<Level> level{initial_level()};
    return level;
}

} // namespace

Level detected_level()
{
    static const Level level = probe();
    return level;
}

Level active_level() { return current().load(std::memory_order_relaxed); }

void set_level(Level level)
{
    if (level == Level::avx2 && detected_level() != Level::avx2) {
        level = Level::scalar;
    }
    current().store(level, std::memory_order_relaxed);
}

std::string_view name(Level level)
{
    switch (level) {
    case Level::avx2:
        return "avx2";
    case Level::scalar:
        break;
    }
    return "scalar";
}

#if defined(FOCK_HAVE_AVX2)
#define FOCK_DISPATCH(fn, ...)                                                                 \
    return active_level() == Level::avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__)
#else
#define FOCK_DISPATCH(fn, ...) return scalar::fn(__VA_ARGS__)
#endif

void min_dist2(std::span<const double> px, std::span<const double> py,
               std::span<const double> cx, std::span<const double> cy, std::span<double> out)
{
    FOCK_DISPATCH(min_dist2, px, py, cx, cy, out);
}

void count_within(std::span<const double> px, std::span<const double> py,
                  std::span<const double> cx, std::span<const double> cy, double radius2,
                  std::span<int> out)
{
    FOCK_DISPATCH(count_within, px, py, cx, cy, radius2, out);
}

double gauss_sum(std::span<const double> x, std::span<const double> y, std::span<const double> w,
                 double cx, double cy, double rate)
{
    FOCK_DISPATCH(gauss_sum, x, y, w, cx, cy, rate);
}

std::complex<double> combo_damped(const ComboView& combo, double alpha, double zx, double zy)
{
    FOCK_DISPATCH(combo_damped, combo, alpha, zx, zy);
}

#undef FOCK_DISPATCH

} // namespace fock::simd
