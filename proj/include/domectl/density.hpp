#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "domectl/errors.hpp"

// Crowd-density ground truth: one truncated, renormalized Gaussian per
// annotated head, with sigma adapted to the mean distance of the k nearest
// other heads (k-NN over a kd-tree, exact against brute force). Cell sums
// equal the head count by construction.

namespace domectl::density {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct HeadAnnotations {
    std::uint32_t width = 0;  // px
    std::uint32_t height = 0; // px
    std::vector<Point> points;

    void validate() const; // throws DataError on out-of-image points or zero size
};

struct KernelParams {
    int k = 4;                     // neighbor count
    double beta = 0.3;             // sigma = beta * mean k-NN distance
    double fallback_sigma = 15.0;  // px, used when fewer than k+1 heads exist
    double truncation_sigmas = 4.0;

    void validate() const; // throws ConfigError
};

struct DensityMap {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::vector<double> values; // row-major, height*width cells, persons/px

    double at(std::uint32_t x, std::uint32_t y) const {
        return values[static_cast<std::size_t>(y) * width + x];
    }
};

/// Exact 2-D k-NN queries over a fixed point set. Splits on the wider box
/// side; leaves are scanned with the squared-distance kernel. Neighbour
/// distances come back sorted ascending so downstream sums are independent
/// of traversal order (and therefore match a brute-force scan bit for bit).
class KdTree2D {
public:
    explicit KdTree2D(std::span<const Point> points);

    std::size_t size() const { return xs_.size(); }

    /// Squared distances to the k nearest points other than `index`,
    /// ascending; fewer than k only when the set itself is too small.
    void knn_sqdist(std::size_t index, std::size_t k, std::vector<double>& out) const;

private:
    struct Node {
        double box[4]; // xmin, xmax, ymin, ymax
        std::uint32_t begin = 0, end = 0;
        std::int32_t left = -1, right = -1;
    };

    std::int32_t build(std::uint32_t begin, std::uint32_t end);

    std::vector<double> xs_, ys_;      // permuted coordinates
    std::vector<std::uint32_t> ids_;   // permuted original indexes
    std::vector<std::uint32_t> pos_;   // original index -> permuted slot
    std::vector<Node> nodes_;
    std::int32_t root_ = -1;
};

/// Mean Euclidean distance from points[index] to its k nearest other heads;
/// nullopt signals the sparse-set fallback (fewer than k+1 heads).
std::optional<double> knn_mean_distance(std::span<const Point> points, std::size_t index, int k);

/// Batched form building the tree once; empty result when the set is sparse.
std::vector<double> mean_knn_distances(std::span<const Point> points, int k);

/// beta * mean, floored at 0.5 px; the sparse-set signal selects fallback_sigma.
double adaptive_sigma(std::optional<double> mean_distance, const KernelParams& params);

DensityMap render_density_map(const HeadAnnotations& annotations, const KernelParams& params);

double count_from_map(const DensityMap& map);

struct CountMetrics {
    double mae = 0.0;
    double rmse = 0.0;
};

CountMetrics evaluate_counts(std::span<const double> predicted, std::span<const double> truth);

// --- DMAP container: 16-byte header (magic "DMAP", u32 version, u32 width,
// u32 height, little-endian) followed by row-major little-endian f32 cells.
inline constexpr std::uint32_t kDmapVersion = 1;

void write_dmap(const std::string& path, const DensityMap& map);   // throws DataError on I/O
DensityMap read_dmap(const std::string& path);                     // throws DataError

/// Plain-text inspection dump: "width height" then one row of cells per line.
void write_text_grid(std::ostream& os, const DensityMap& map);

} // namespace domectl::density
