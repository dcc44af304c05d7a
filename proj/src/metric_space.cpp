#include "uclt/metric_space.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

#include "uclt/errors.hpp"

namespace uclt {

namespace {

constexpr double kTriangleSlack = 1e-12;
// The triangle scan is cubic; larger spaces skip it.
constexpr std::size_t kTriangleCheckLimit = 512;

using Bits = std::vector<std::uint64_t>;

Bits ball_bits(const FiniteMetricSpace& space, std::size_t center, double eps) {
  const std::size_t n = space.size();
  Bits bits((n + 63) / 64, 0);
  for (std::size_t j = 0; j < n; ++j) {
    if (space(center, j) <= eps) bits[j / 64] |= std::uint64_t{1} << (j % 64);
  }
  return bits;
}

void require_nonempty(const FiniteMetricSpace& space) {
  if (space.size() == 0) throw EmptySpace("metric space has no points");
}

void require_eps(double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("covering radius eps must be positive");
}

std::vector<std::vector<std::string>> read_csv_rows(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument(fmt::format("cannot open {}", path.string()));
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

std::optional<double> parse_number(const std::string& text) {
  std::size_t used = 0;
  try {
    const double v = std::stod(text, &used);
    while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) ++used;
    if (used != text.size()) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::vector<std::vector<double>> numeric_rows(const std::filesystem::path& path) {
  auto rows = read_csv_rows(path);
  std::vector<std::vector<double>> out;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::vector<double> values;
    bool numeric = true;
    for (const auto& cell : rows[r]) {
      const auto v = parse_number(cell);
      if (!v) {
        numeric = false;
        break;
      }
      values.push_back(*v);
    }
    if (!numeric) {
      if (r == 0) continue;  // header
      throw InvalidArgument(fmt::format("{}: non-numeric row {}", path.string(), r + 1));
    }
    out.push_back(std::move(values));
  }
  return out;
}

}  // namespace

FiniteMetricSpace::FiniteMetricSpace(std::size_t n, std::vector<double> dist,
                                     std::vector<std::vector<double>> coordinates)
    : n_(n), dist_(std::move(dist)), coordinates_(std::move(coordinates)) {
  if (dist_.size() != n_ * n_) throw InvalidArgument("distance matrix must be n x n");
  if (!coordinates_.empty() && coordinates_.size() != n_) {
    throw InvalidArgument("coordinate count must match point count");
  }
  for (std::size_t i = 0; i < n_; ++i) {
    if (dist_[i * n_ + i] != 0.0) throw InvalidArgument("distance matrix diagonal must be zero");
    for (std::size_t j = 0; j < n_; ++j) {
      const double d = dist_[i * n_ + j];
      if (!(d >= 0.0) || !std::isfinite(d)) {
        throw InvalidArgument("distances must be finite and nonnegative");
      }
      if (d != dist_[j * n_ + i]) throw InvalidArgument("distance matrix must be symmetric");
    }
  }
  if (n_ > kTriangleCheckLimit) return;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i + 1; j < n_; ++j) {
      const double dij = dist_[i * n_ + j];
      for (std::size_t k = 0; k < n_; ++k) {
        if (dij > dist_[i * n_ + k] + dist_[k * n_ + j] + kTriangleSlack * (1.0 + dij)) {
          ++triangle_violations_;
          break;
        }
      }
    }
  }
}

std::optional<double> FiniteMetricSpace::min_positive_distance() const {
  std::optional<double> best;
  for (double d : dist_) {
    if (d > 0.0 && (!best || d < *best)) best = d;
  }
  return best;
}

double CoordinateMetric::operator()(const std::vector<double>& a,
                                    const std::vector<double>& b) const {
  if (a.size() != b.size()) throw InvalidArgument("coordinate dimension mismatch");
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = std::abs(a[k] - b[k]);
    acc = kind == Kind::Sup ? std::max(acc, diff) : acc + diff * diff;
  }
  switch (kind) {
    case Kind::Sup:
      return acc;
    case Kind::Euclidean:
      return std::sqrt(acc);
    case Kind::Holder:
      return std::pow(std::sqrt(acc), alpha);
  }
  return acc;
}

FiniteMetricSpace space_from_coordinates(std::vector<std::vector<double>> points,
                                         const CoordinateMetric& metric) {
  if (metric.kind == CoordinateMetric::Kind::Holder && !(metric.alpha > 0.0 && metric.alpha <= 1.0)) {
    throw InvalidArgument("holder metric exponent must lie in (0, 1]");
  }
  const std::size_t n = points.size();
  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = metric(points[i], points[j]);
      dist[i * n + j] = d;
      dist[j * n + i] = d;
    }
  }
  return FiniteMetricSpace(n, std::move(dist), std::move(points));
}

FiniteMetricSpace uniform_grid(std::size_t n, double low, double high,
                               const CoordinateMetric& metric) {
  std::vector<std::vector<double>> points;
  points.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = n == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(n - 1);
    points.push_back({low + t * (high - low)});
  }
  return space_from_coordinates(std::move(points), metric);
}

FiniteMetricSpace load_distance_csv(const std::filesystem::path& path) {
  const auto rows = numeric_rows(path);
  const std::size_t n = rows.size();
  std::vector<double> dist;
  dist.reserve(n * n);
  for (const auto& row : rows) {
    if (row.size() != n) {
      throw InvalidArgument(fmt::format("{}: distance matrix is not square", path.string()));
    }
    dist.insert(dist.end(), row.begin(), row.end());
  }
  return FiniteMetricSpace(n, std::move(dist));
}

FiniteMetricSpace load_coordinate_csv(const std::filesystem::path& path,
                                      const CoordinateMetric& metric) {
  auto rows = numeric_rows(path);
  for (const auto& row : rows) {
    if (row.size() != rows.front().size()) {
      throw InvalidArgument(fmt::format("{}: ragged coordinate rows", path.string()));
    }
  }
  return space_from_coordinates(std::move(rows), metric);
}

double diameter(const FiniteMetricSpace& space) {
  require_nonempty(space);
  return *std::max_element(space.matrix().begin(), space.matrix().end());
}

std::size_t covering_number_greedy(const FiniteMetricSpace& space, double eps) {
  require_nonempty(space);
  require_eps(eps);
  const std::size_t n = space.size();
  std::vector<Bits> balls;
  balls.reserve(n);
  for (std::size_t i = 0; i < n; ++i) balls.push_back(ball_bits(space, i, eps));

  Bits uncovered((n + 63) / 64, 0);
  for (std::size_t j = 0; j < n; ++j) uncovered[j / 64] |= std::uint64_t{1} << (j % 64);
  std::size_t remaining = n;
  std::size_t centers = 0;
  while (remaining > 0) {
    std::size_t best = 0;
    std::size_t best_gain = 0;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t gain = 0;
      for (std::size_t w = 0; w < uncovered.size(); ++w) {
        gain += static_cast<std::size_t>(std::popcount(balls[i][w] & uncovered[w]));
      }
      if (gain > best_gain) {  // strict: ties keep the lowest index
        best_gain = gain;
        best = i;
      }
    }
    for (std::size_t w = 0; w < uncovered.size(); ++w) uncovered[w] &= ~balls[best][w];
    remaining -= best_gain;
    ++centers;
  }
  return centers;
}

std::size_t covering_number_exact(const FiniteMetricSpace& space, double eps, std::size_t cap) {
  require_nonempty(space);
  require_eps(eps);
  const std::size_t n = space.size();
  if (n > cap || n > 32) {
    throw TooLarge(fmt::format("exact covering refused: {} points exceeds cap {}", n, cap));
  }
  std::vector<std::uint32_t> masks(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (space(i, j) <= eps) masks[i] |= std::uint32_t{1} << j;
    }
  }
  const std::uint32_t full = n == 32 ? ~std::uint32_t{0} : (std::uint32_t{1} << n) - 1;
  const std::size_t upper = covering_number_greedy(space, eps);

  // Enumerate k-subsets in lexicographic order; the greedy size bounds the search.
  std::vector<std::size_t> idx;
  for (std::size_t k = 1; k < upper; ++k) {
    idx.resize(k);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    while (true) {
      std::uint32_t cover = 0;
      for (std::size_t c : idx) cover |= masks[c];
      if (cover == full) return k;
      std::size_t pos = k;
      while (pos > 0 && idx[pos - 1] == n - k + pos - 1) --pos;
      if (pos == 0) break;
      ++idx[pos - 1];
      for (std::size_t t = pos; t < k; ++t) idx[t] = idx[t - 1] + 1;
    }
  }
  return upper;
}

double entropy(const FiniteMetricSpace& space, double eps, CoveringMode mode) {
  const std::size_t count = mode == CoveringMode::Greedy ? covering_number_greedy(space, eps)
                                                         : covering_number_exact(space, eps);
  return std::log(static_cast<double>(count));
}

double holder_covering_bound(int dim, double alpha, double c2, double eps) {
  if (dim < 1) throw InvalidArgument("holder_covering_bound: dim must be positive");
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw InvalidArgument("holder_covering_bound: alpha must lie in (0, 1]");
  }
  if (!(c2 > 0.0) || !(eps > 0.0)) {
    throw InvalidArgument("holder_covering_bound: c2 and eps must be positive");
  }
  return c2 * std::pow(eps, -static_cast<double>(dim) / alpha);
}

}  // namespace uclt
