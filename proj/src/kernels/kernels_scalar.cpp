#include "domectl/kernels.hpp"

#include <algorithm>
#include <cassert>

namespace domectl::kernels::scalar {

double sum(std::span<const double> x) {
    double acc = 0.0;
    for (double v : x) {
        acc += v;
    }
    return acc;
}

double dot(std::span<const double> x, std::span<const double> y) {
    assert(x.size() == y.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        acc += x[i] * y[i];
    }
    return acc;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
    assert(x.size() == y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        y[i] += a * x[i];
    }
}

void clip_max(std::span<double> dst, std::span<const double> src, double clip) {
    assert(dst.size() == src.size());
    for (std::size_t i = 0; i < dst.size(); ++i) {
        dst[i] = std::max(dst[i], std::min(src[i], clip));
    }
}

void squared_distances(std::span<const double> xs, std::span<const double> ys, double px, double py,
                       std::span<double> out) {
    assert(xs.size() == ys.size() && xs.size() == out.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - px;
        const double dy = ys[i] - py;
        out[i] = dx * dx + dy * dy;
    }
}

} // namespace domectl::kernels::scalar
