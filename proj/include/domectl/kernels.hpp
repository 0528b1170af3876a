#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Data-parallel inner loops shared by the fuzzy engine (curve aggregation,
// centroid reductions), the density-map renderer (row accumulation, mass
// sums) and the kd-tree (leaf distance scans). Scalar reference
// implementations are always available; an AVX2 variant is selected at
// runtime on CPUs that support it. The two variants are equivalence-tested
// against each other; within one process the selected backend is fixed, so
// results are reproducible run to run on the same machine.

namespace domectl::kernels {

enum class Backend { Scalar, Avx2 };

/// Backend chosen at startup: AVX2 when the CPU supports it, else scalar.
/// The environment variable DOMECTL_KERNELS (values "scalar", "avx2")
/// overrides the automatic choice.
Backend active_backend();

/// Force a backend. Returns false (and leaves the selection unchanged) if
/// the requested backend is not supported on this CPU. Intended for tests
/// and benchmarks; call before spawning threads.
bool set_backend(Backend backend);

bool cpu_supports(Backend backend);

std::string_view backend_name(Backend backend);

/// sum(x)
double sum(std::span<const double> x);

/// dot(x, y); x and y must have equal length.
double dot(std::span<const double> x, std::span<const double> y);

/// y[i] += a * x[i]; x and y must have equal length.
void axpy(double a, std::span<const double> x, std::span<double> y);

/// dst[i] = max(dst[i], min(src[i], clip)) — Mamdani clip-and-max merge.
void clip_max(std::span<double> dst, std::span<const double> src, double clip);

/// out[i] = (xs[i] - px)^2 + (ys[i] - py)^2
void squared_distances(std::span<const double> xs, std::span<const double> ys, double px, double py,
                       std::span<double> out);

/// Reference implementations (fixed left-to-right evaluation order).
namespace scalar {
double sum(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);
void axpy(double a, std::span<const double> x, std::span<double> y);
void clip_max(std::span<double> dst, std::span<const double> src, double clip);
void squared_distances(std::span<const double> xs, std::span<const double> ys, double px, double py,
                       std::span<double> out);
} // namespace scalar

#if defined(__x86_64__) || defined(__i386__)
namespace avx2 {
double sum(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);
void axpy(double a, std::span<const double> x, std::span<double> y);
void clip_max(std::span<double> dst, std::span<const double> src, double clip);
void squared_distances(std::span<const double> xs, std::span<const double> ys, double px, double py,
                       std::span<double> out);
} // namespace avx2
#endif

} // namespace domectl::kernels
