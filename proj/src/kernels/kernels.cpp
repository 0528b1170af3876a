#include "domectl/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace domectl::kernels {

namespace {

struct KernelTable {
    double (*sum)(std::span<const double>);
    double (*dot)(std::span<const double>, std::span<const double>);
    void (*axpy)(double, std::span<const double>, std::span<double>);
    void (*clip_max)(std::span<double>, std::span<const double>, double);
    void (*squared_distances)(std::span<const double>, std::span<const double>, double, double,
                              std::span<double>);
};

constexpr KernelTable kScalarTable = {scalar::sum, scalar::dot, scalar::axpy, scalar::clip_max,
                                      scalar::squared_distances};

#if defined(__x86_64__) || defined(__i386__)
constexpr KernelTable kAvx2Table = {avx2::sum, avx2::dot, avx2::axpy, avx2::clip_max,
                                    avx2::squared_distances};
#endif

struct Selection {
    Backend backend;
    const KernelTable* table;
};

Backend detect_backend() {
    Backend preferred = cpu_supports(Backend::Avx2) ? Backend::Avx2 : Backend::Scalar;
    if (const char* env = std::getenv("DOMECTL_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0) {
            preferred = Backend::Scalar;
        } else if (std::strcmp(env, "avx2") == 0 && cpu_supports(Backend::Avx2)) {
            preferred = Backend::Avx2;
        }
    }
    return preferred;
}

const KernelTable* table_for(Backend backend) {
#if defined(__x86_64__) || defined(__i386__)
    if (backend == Backend::Avx2) {
        return &kAvx2Table;
    }
#endif
    (void)backend;
    return &kScalarTable;
}

std::atomic<const KernelTable*>& active_table() {
    static std::atomic<const KernelTable*> table{table_for(detect_backend())};
    return table;
}

std::atomic<Backend>& active() {
    static std::atomic<Backend> backend{detect_backend()};
    return backend;
}

} // namespace

bool cpu_supports(Backend backend) {
    if (backend == Backend::Scalar) {
        return true;
    }
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

Backend active_backend() {
    return active().load(std::memory_order_relaxed);
}

bool set_backend(Backend backend) {
    if (!cpu_supports(backend)) {
        return false;
    }
    active().store(backend, std::memory_order_relaxed);
    active_table().store(table_for(backend), std::memory_order_relaxed);
    return true;
}

std::string_view backend_name(Backend backend) {
    switch (backend) {
    case Backend::Avx2:
        return "avx2";
    case Backend::Scalar:
        return "scalar";
    }
    return "unknown";
}

double sum(std::span<const double> x) {
    return active_table().load(std::memory_order_relaxed)->sum(x);
}

double dot(std::span<const double> x, std::span<const double> y) {
    return active_table().load(std::memory_order_relaxed)->dot(x, y);
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
    active_table().load(std::memory_order_relaxed)->axpy(a, x, y);
}

void clip_max(std::span<double> dst, std::span<const double> src, double clip) {
    active_table().load(std::memory_order_relaxed)->clip_max(dst, src, clip);
}

void squared_distances(std::span<const double> xs, std::span<const double> ys, double px, double py,
                       std::span<double> out) {
    active_table().load(std::memory_order_relaxed)->squared_distances(xs, ys, px, py, out);
}

} // namespace domectl::kernels
