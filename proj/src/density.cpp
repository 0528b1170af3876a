#include "domectl/density.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <ostream>

#include "domectl/kernels.hpp"

namespace domectl::density {

void HeadAnnotations::validate() const {
    if (width == 0 || height == 0)
        throw DataError("annotations: image size must be positive");
    for (std::size_t i = 0; i < points.size(); ++i) {
        const Point& p = points[i];
        if (!(std::isfinite(p.x) && std::isfinite(p.y)))
            throw DataError("annotations: point " + std::to_string(i) + " is not finite");
        if (p.x < 0.0 || p.x >= static_cast<double>(width) || p.y < 0.0 ||
            p.y >= static_cast<double>(height))
            throw DataError("annotations: point " + std::to_string(i) + " lies outside the image");
    }
}

void KernelParams::validate() const {
    if (k < 1) throw ConfigError("density: k must be >= 1");
    if (!(beta > 0.0)) throw ConfigError("density: beta must be > 0");
    if (!(fallback_sigma > 0.0)) throw ConfigError("density: fallback_sigma must be > 0");
    if (!(truncation_sigmas >= 2.0)) throw ConfigError("density: truncation_sigmas must be >= 2");
}

KdTree2D::KdTree2D(std::span<const Point> points) {
    const std::size_t n = points.size();
    xs_.resize(n);
    ys_.resize(n);
    ids_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs_[i] = points[i].x;
        ys_[i] = points[i].y;
        ids_[i] = static_cast<std::uint32_t>(i);
    }
    if (n > 0) {
        nodes_.reserve(2 * n / 16 + 8);
        root_ = build(0, static_cast<std::uint32_t>(n));
    }
    pos_.resize(n);
    for (std::size_t i = 0; i < n; ++i) pos_[ids_[i]] = static_cast<std::uint32_t>(i);
}

std::int32_t KdTree2D::build(std::uint32_t begin, std::uint32_t end) {
    constexpr std::uint32_t kLeafSize = 32;
    Node node;
    node.begin = begin;
    node.end = end;
    double xmin = xs_[begin], xmax = xs_[begin], ymin = ys_[begin], ymax = ys_[begin];
    for (std::uint32_t i = begin + 1; i < end; ++i) {
        xmin = std::min(xmin, xs_[i]);
        xmax = std::max(xmax, xs_[i]);
        ymin = std::min(ymin, ys_[i]);
        ymax = std::max(ymax, ys_[i]);
    }
    node.box[0] = xmin;
    node.box[1] = xmax;
    node.box[2] = ymin;
    node.box[3] = ymax;

    const std::int32_t id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back(node);
    if (end - begin <= kLeafSize) return id;

    // Split on the wider side at the median; ties keep the permutation stable
    // enough (exactness does not depend on partition order).
    const bool split_x = (xmax - xmin) >= (ymax - ymin);
    const std::uint32_t mid = begin + (end - begin) / 2;
    auto key = [&](std::uint32_t a, std::uint32_t b) {
        return split_x ? xs_[a] < xs_[b] : ys_[a] < ys_[b];
    };
    std::vector<std::uint32_t> order(end - begin);
    for (std::uint32_t i = 0; i < end - begin; ++i) order[i] = begin + i;
    std::nth_element(order.begin(), order.begin() + (mid - begin), order.end(), key);
    // Apply the permutation to the parallel arrays.
    std::vector<double> tx(end - begin), ty(end - begin);
    std::vector<std::uint32_t> tid(end - begin);
    for (std::uint32_t i = 0; i < end - begin; ++i) {
        tx[i] = xs_[order[i]];
        ty[i] = ys_[order[i]];
        tid[i] = ids_[order[i]];
    }
    std::copy(tx.begin(), tx.end(), xs_.begin() + begin);
    std::copy(ty.begin(), ty.end(), ys_.begin() + begin);
    std::copy(tid.begin(), tid.end(), ids_.begin() + begin);

    const std::int32_t left = build(begin, mid);
    const std::int32_t right = build(mid, end);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
}

namespace {

double box_sqdist(const double box[4], double px, double py) {
    const double dx = px < box[0] ? box[0] - px : (px > box[1] ? px - box[1] : 0.0);
    const double dy = py < box[2] ? box[2] - py : (py > box[3] ? py - box[3] : 0.0);
    return dx * dx + dy * dy;
}

} // namespace

void KdTree2D::knn_sqdist(std::size_t index, std::size_t k, std::vector<double>& out) const {
    out.clear();
    if (k == 0 || xs_.empty()) return;
    const std::uint32_t slot = pos_[index];
    const double qx = xs_[slot], qy = ys_[slot];

    // Bounded max-heap of the best k squared distances.
    std::vector<double> heap;
    heap.reserve(k);
    auto consider = [&](double d2) {
        if (heap.size() < k) {
            heap.push_back(d2);
            std::push_heap(heap.begin(), heap.end());
        } else if (d2 < heap.front()) {
            std::pop_heap(heap.begin(), heap.end());
            heap.back() = d2;
            std::push_heap(heap.begin(), heap.end());
        }
    };

    std::vector<double> scratch;
    std::vector<std::int32_t> stack{root_};
    while (!stack.empty()) {
        const std::int32_t ni = stack.back();
        stack.pop_back();
        const Node& node = nodes_[static_cast<std::size_t>(ni)];
        if (heap.size() == k && box_sqdist(node.box, qx, qy) > heap.front()) continue;
        if (node.left < 0) {
            const std::size_t len = node.end - node.begin;
            scratch.resize(len);
            kernels::squared_distances({xs_.data() + node.begin, len},
                                       {ys_.data() + node.begin, len}, qx, qy, scratch);
            for (std::size_t j = 0; j < len; ++j) {
                if (ids_[node.begin + j] == index) continue; // self
                consider(scratch[j]);
            }
        } else {
            // Nearer child first so pruning tightens early.
            const double dl = box_sqdist(nodes_[node.left].box, qx, qy);
            const double dr = box_sqdist(nodes_[node.right].box, qx, qy);
            if (dl <= dr) {
                stack.push_back(node.right);
                stack.push_back(node.left);
            } else {
                stack.push_back(node.left);
                stack.push_back(node.right);
            }
        }
    }

    out.assign(heap.begin(), heap.end());
    std::sort(out.begin(), out.end());
}

namespace {

double mean_of_sqrt(std::span<const double> sqdist_ascending) {
    double sum = 0.0;
    for (double d2 : sqdist_ascending) sum += std::sqrt(d2);
    return sum / static_cast<double>(sqdist_ascending.size());
}

} // namespace

std::optional<double> knn_mean_distance(std::span<const Point> points, std::size_t index, int k) {
    if (k < 1) throw ConfigError("knn_mean_distance: k must be >= 1");
    if (index >= points.size()) throw DataError("knn_mean_distance: index out of range");
    if (points.size() < static_cast<std::size_t>(k) + 1) return std::nullopt;
    KdTree2D tree(points);
    std::vector<double> sq;
    tree.knn_sqdist(index, static_cast<std::size_t>(k), sq);
    return mean_of_sqrt(sq);
}

std::vector<double> mean_knn_distances(std::span<const Point> points, int k) {
    if (k < 1) throw ConfigError("mean_knn_distances: k must be >= 1");
    if (points.size() < static_cast<std::size_t>(k) + 1) return {};
    KdTree2D tree(points);
    std::vector<double> out(points.size());
    std::vector<double> sq;
    for (std::size_t i = 0; i < points.size(); ++i) {
        tree.knn_sqdist(i, static_cast<std::size_t>(k), sq);
        out[i] = mean_of_sqrt(sq);
    }
    return out;
}

double adaptive_sigma(std::optional<double> mean_distance, const KernelParams& params) {
    if (!mean_distance) return params.fallback_sigma;
    return std::max(params.beta * *mean_distance, 0.5);
}

DensityMap render_density_map(const HeadAnnotations& annotations, const KernelParams& params) {
    annotations.validate();
    params.validate();

    DensityMap map;
    map.width = annotations.width;
    map.height = annotations.height;
    map.values.assign(static_cast<std::size_t>(map.width) * map.height, 0.0);

    const std::vector<double> means = mean_knn_distances(annotations.points, params.k);
    const bool sparse = means.empty();

    // Heads are rendered in annotation order; each kernel is separable,
    // truncated per axis and renormalized over its in-image window so its
    // mass is exactly one head.
    std::vector<double> wx, wy;
    for (std::size_t h = 0; h < annotations.points.size(); ++h) {
        const Point& p = annotations.points[h];
        const double sigma =
            adaptive_sigma(sparse ? std::nullopt : std::optional<double>(means[h]), params);
        const double radius = params.truncation_sigmas * sigma;
        const double inv2s2 = 1.0 / (2.0 * sigma * sigma);

        const std::int64_t x0 = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil(p.x - radius)));
        const std::int64_t x1 = std::min<std::int64_t>(map.width - 1, static_cast<std::int64_t>(std::floor(p.x + radius)));
        const std::int64_t y0 = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil(p.y - radius)));
        const std::int64_t y1 = std::min<std::int64_t>(map.height - 1, static_cast<std::int64_t>(std::floor(p.y + radius)));
        if (x1 < x0 || y1 < y0) continue; // cannot happen for in-image points

        wx.resize(static_cast<std::size_t>(x1 - x0 + 1));
        wy.resize(static_cast<std::size_t>(y1 - y0 + 1));
        for (std::int64_t x = x0; x <= x1; ++x) {
            const double d = static_cast<double>(x) - p.x;
            wx[static_cast<std::size_t>(x - x0)] = std::exp(-d * d * inv2s2);
        }
        for (std::int64_t y = y0; y <= y1; ++y) {
            const double d = static_cast<double>(y) - p.y;
            wy[static_cast<std::size_t>(y - y0)] = std::exp(-d * d * inv2s2);
        }
        const double mass = kernels::sum(wx) * kernels::sum(wy);
        if (!(mass > 0.0)) continue; // fully truncated; nothing to deposit
        const double inv_mass = 1.0 / mass;

        for (std::int64_t y = y0; y <= y1; ++y) {
            double* row = map.values.data() + static_cast<std::size_t>(y) * map.width + x0;
            kernels::axpy(wy[static_cast<std::size_t>(y - y0)] * inv_mass, wx,
                          {row, wx.size()});
        }
    }
    return map;
}

double count_from_map(const DensityMap& map) { return kernels::sum(map.values); }

CountMetrics evaluate_counts(std::span<const double> predicted, std::span<const double> truth) {
    if (predicted.size() != truth.size())
        throw DataError("evaluate_counts: predicted and truth lengths differ");
    if (predicted.empty()) throw DataError("evaluate_counts: empty series");
    double abs_sum = 0.0, sq_sum = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const double d = predicted[i] - truth[i];
        abs_sum += std::abs(d);
        sq_sum += d * d;
    }
    const double n = static_cast<double>(predicted.size());
    return {abs_sum / n, std::sqrt(sq_sum / n)};
}

namespace {

void put_u32_le(std::string& buf, std::uint32_t v) {
    buf.push_back(static_cast<char>(v & 0xff));
    buf.push_back(static_cast<char>((v >> 8) & 0xff));
    buf.push_back(static_cast<char>((v >> 16) & 0xff));
    buf.push_back(static_cast<char>((v >> 24) & 0xff));
}

std::uint32_t get_u32_le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

} // namespace

void write_dmap(const std::string& path, const DensityMap& map) {
    std::string buf;
    buf.reserve(16 + map.values.size() * 4);
    buf.append("DMAP", 4);
    put_u32_le(buf, kDmapVersion);
    put_u32_le(buf, map.width);
    put_u32_le(buf, map.height);
    for (double v : map.values) {
        const std::uint32_t bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
        put_u32_le(buf, bits);
    }
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw DataError("dmap: cannot open '" + path + "' for writing");
    os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!os) throw DataError("dmap: short write to '" + path + "'");
}

DensityMap read_dmap(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("dmap: cannot open '" + path + "'");
    std::string buf((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    if (buf.size() < 16) throw DataError("dmap: '" + path + "' is truncated");
    const unsigned char* p = reinterpret_cast<const unsigned char*>(buf.data());
    if (std::memcmp(p, "DMAP", 4) != 0) throw DataError("dmap: bad magic in '" + path + "'");
    const std::uint32_t version = get_u32_le(p + 4);
    if (version != kDmapVersion)
        throw DataError("dmap: unsupported version " + std::to_string(version));
    DensityMap map;
    map.width = get_u32_le(p + 8);
    map.height = get_u32_le(p + 12);
    const std::size_t cells = static_cast<std::size_t>(map.width) * map.height;
    if (buf.size() != 16 + cells * 4)
        throw DataError("dmap: payload size mismatch in '" + path + "'");
    map.values.resize(cells);
    for (std::size_t i = 0; i < cells; ++i) {
        const std::uint32_t bits = get_u32_le(p + 16 + i * 4);
        map.values[i] = static_cast<double>(std::bit_cast<float>(bits));
    }
    return map;
}

void write_text_grid(std::ostream& os, const DensityMap& map) {
    os << map.width << ' ' << map.height << '\n';
    char cell[32];
    for (std::uint32_t y = 0; y < map.height; ++y) {
        for (std::uint32_t x = 0; x < map.width; ++x) {
            std::snprintf(cell, sizeof(cell), "%.9g", map.at(x, y));
            if (x) os << ' ';
            os << cell;
        }
        os << '\n';
    }
}

} // namespace domectl::density
