#include "uclt/natural_distances.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

#include "uclt/errors.hpp"

namespace uclt {

namespace {

const double kMissing = std::numeric_limits<double>::quiet_NaN();

void check_index(std::size_t value, std::size_t bound, const char* what) {
  if (value >= bound) {
    throw InvalidArgument(fmt::format("{} {} out of range [0, {})", what, value, bound));
  }
}

std::string index_file(std::size_t i) { return fmt::format("index_{:05d}.csv", i); }

}  // namespace

PairwiseMomentField::PairwiseMomentField(std::vector<double> p_grid, std::size_t point_count,
                                         std::size_t index_count,
                                         MomentCurve::Provenance provenance)
    : p_grid_(std::move(p_grid)),
      point_count_(point_count),
      index_count_(index_count),
      provenance_(provenance) {
  if (p_grid_.empty()) throw InvalidArgument("moment field: empty p grid");
  if (point_count_ == 0 || index_count_ == 0) {
    throw InvalidArgument("moment field: need at least one point and one index");
  }
  for (std::size_t k = 0; k < p_grid_.size(); ++k) {
    if (!(p_grid_[k] >= 1.0) || (k > 0 && !(p_grid_[k] > p_grid_[k - 1]))) {
      throw InvalidArgument("moment field: p grid must be ascending and >= 1");
    }
  }
  const std::size_t np = p_grid_.size();
  point_norms_.assign(index_count_ * point_count_ * np, kMissing);
  point_se_.assign(point_norms_.size(), kMissing);
  pair_norms_.assign(index_count_ * pair_count() * np, kMissing);
  pair_se_.assign(pair_norms_.size(), kMissing);
  variances_.assign(index_count_ * point_count_, kMissing);
}

std::size_t PairwiseMomentField::pair_slot(std::size_t x1, std::size_t x2) const {
  const std::size_t a = std::min(x1, x2);
  const std::size_t b = std::max(x1, x2);
  return a * point_count_ - a * (a + 1) / 2 + (b - a - 1);
}

void PairwiseMomentField::set_point(std::size_t i, std::size_t x, const std::vector<double>& norms,
                                    const std::vector<double>& std_errors) {
  check_index(i, index_count_, "index");
  check_index(x, point_count_, "point");
  if (norms.size() != p_grid_.size() || (!std_errors.empty() && std_errors.size() != norms.size())) {
    throw InvalidArgument("moment field: curve length does not match the p grid");
  }
  const std::size_t offset = (i * point_count_ + x) * p_grid_.size();
  std::copy(norms.begin(), norms.end(), point_norms_.begin() + static_cast<std::ptrdiff_t>(offset));
  if (!std_errors.empty()) {
    std::copy(std_errors.begin(), std_errors.end(),
              point_se_.begin() + static_cast<std::ptrdiff_t>(offset));
  }
}

void PairwiseMomentField::set_pair(std::size_t i, std::size_t x1, std::size_t x2,
                                   const std::vector<double>& norms,
                                   const std::vector<double>& std_errors) {
  check_index(i, index_count_, "index");
  check_index(x1, point_count_, "point");
  check_index(x2, point_count_, "point");
  if (x1 == x2) throw InvalidArgument("moment field: diagonal pair curves are identically zero");
  if (norms.size() != p_grid_.size() || (!std_errors.empty() && std_errors.size() != norms.size())) {
    throw InvalidArgument("moment field: curve length does not match the p grid");
  }
  const std::size_t offset = (i * pair_count() + pair_slot(x1, x2)) * p_grid_.size();
  std::copy(norms.begin(), norms.end(), pair_norms_.begin() + static_cast<std::ptrdiff_t>(offset));
  if (!std_errors.empty()) {
    std::copy(std_errors.begin(), std_errors.end(),
              pair_se_.begin() + static_cast<std::ptrdiff_t>(offset));
  }
}

void PairwiseMomentField::set_variance(std::size_t i, std::size_t x, double variance) {
  check_index(i, index_count_, "index");
  check_index(x, point_count_, "point");
  if (!(variance >= 0.0) || !std::isfinite(variance)) {
    throw InvalidArgument("moment field: variance must be finite and nonnegative");
  }
  variances_[i * point_count_ + x] = variance;
}

MomentCurve PairwiseMomentField::curve_at(const std::vector<double>& norms,
                                          const std::vector<double>& se,
                                          std::size_t offset) const {
  const std::size_t np = p_grid_.size();
  std::vector<double> values(norms.begin() + static_cast<std::ptrdiff_t>(offset),
                             norms.begin() + static_cast<std::ptrdiff_t>(offset + np));
  if (std::any_of(values.begin(), values.end(), [](double v) { return std::isnan(v); })) {
    throw MissingData("moment field: curve was never set");
  }
  std::vector<double> errors(se.begin() + static_cast<std::ptrdiff_t>(offset),
                             se.begin() + static_cast<std::ptrdiff_t>(offset + np));
  if (std::any_of(errors.begin(), errors.end(), [](double v) { return std::isnan(v); })) {
    errors.clear();
  }
  return MomentCurve(p_grid_, std::move(values), provenance_, std::move(errors));
}

MomentCurve PairwiseMomentField::point_curve(std::size_t i, std::size_t x) const {
  check_index(i, index_count_, "index");
  check_index(x, point_count_, "point");
  return curve_at(point_norms_, point_se_, (i * point_count_ + x) * p_grid_.size());
}

MomentCurve PairwiseMomentField::pair_curve(std::size_t i, std::size_t x1, std::size_t x2) const {
  check_index(i, index_count_, "index");
  check_index(x1, point_count_, "point");
  check_index(x2, point_count_, "point");
  if (x1 == x2) return MomentCurve::zero(p_grid_);
  return curve_at(pair_norms_, pair_se_, (i * pair_count() + pair_slot(x1, x2)) * p_grid_.size());
}

double PairwiseMomentField::variance(std::size_t i, std::size_t x) const {
  check_index(i, index_count_, "index");
  check_index(x, point_count_, "point");
  const double v = variances_[i * point_count_ + x];
  if (std::isnan(v)) throw MissingData(fmt::format("moment field: no variance for ({}, {})", i, x));
  return v;
}

bool PairwiseMomentField::has_variance(std::size_t i, std::size_t x) const {
  return i < index_count_ && x < point_count_ && !std::isnan(variances_[i * point_count_ + x]);
}

PairwiseMomentField PairwiseMomentField::scaled(double c) const {
  if (!(c >= 0.0)) throw InvalidArgument("moment field: scale must be nonnegative");
  PairwiseMomentField out = *this;
  for (auto* v : {&out.point_norms_, &out.point_se_, &out.pair_norms_, &out.pair_se_}) {
    for (double& x : *v) x *= c;
  }
  for (double& x : out.variances_) x *= c * c;
  return out;
}

// ---------------------------------------------------------------------------------------------

PsiFunction natural_function(const PairwiseMomentField& field) {
  const auto& grid = field.p_grid();
  if (!(grid.front() > 1.0)) {
    throw InvalidArgument("natural_function: p grid must lie strictly above 1");
  }
  std::vector<double> psi(grid.size(), 0.0);
  for (std::size_t i = 0; i < field.index_count(); ++i) {
    for (std::size_t x = 0; x < field.point_count(); ++x) {
      const MomentCurve curve = field.point_curve(i, x);
      for (std::size_t k = 0; k < grid.size(); ++k) psi[k] = std::max(psi[k], curve.norms()[k]);
    }
  }
  if (std::any_of(psi.begin(), psi.end(), [](double v) { return !(v > 0.0); })) {
    throw InvalidArgument("natural_function: the field is identically zero at some p");
  }
  return PsiFunction::tabulated(grid, std::move(psi), 1.0, kInf);
}

double distance_di(const PairwiseMomentField& field, std::size_t i, std::size_t x1,
                   std::size_t x2, const PsiFunction& psi) {
  if (x1 == x2) return 0.0;
  return gls_norm(field.pair_curve(i, x1, x2), psi);
}

double distance_bar(const PairwiseMomentField& field, std::size_t x1, std::size_t x2,
                    const PsiFunction& psi, const std::vector<std::size_t>& n_grid) {
  if (n_grid.empty()) throw InvalidArgument("distance_bar: empty n grid");
  if (x1 == x2) return 0.0;
  const std::size_t n_max = *std::max_element(n_grid.begin(), n_grid.end());
  if (n_max > field.index_count() || n_max == 0) {
    throw MissingData(fmt::format("distance_bar: n = {} needs more indices than the field's {}",
                                  n_max, field.index_count()));
  }
  std::vector<double> cumulative(n_max + 1, 0.0);
  for (std::size_t i = 0; i < n_max; ++i) {
    const double d = distance_di(field, i, x1, x2, psi);
    cumulative[i + 1] = cumulative[i] + d * d;
  }
  double sup = 0.0;
  for (std::size_t n : n_grid) {
    if (n == 0) throw InvalidArgument("distance_bar: n must be positive");
    sup = std::max(sup, std::sqrt(cumulative[n] / static_cast<double>(n)));
  }
  return sup;
}

double pizier_distance(const PairwiseMomentField& field, std::size_t x1, std::size_t x2,
                       double r) {
  const auto& grid = field.p_grid();
  if (std::find(grid.begin(), grid.end(), r) == grid.end()) {
    throw MissingData(fmt::format("pizier_distance: p = {} is not on the field's grid", r));
  }
  if (x1 == x2) return 0.0;
  double sup = 0.0;
  for (std::size_t i = 0; i < field.index_count(); ++i) {
    sup = std::max(sup, *field.pair_curve(i, x1, x2).at(r));
  }
  return sup;
}

double rho_q_distance(const PairwiseMomentField& field, std::size_t x1, std::size_t x2,
                      double q) {
  if (x1 == x2) return 0.0;
  double sup = 0.0;
  for (std::size_t i = 0; i < field.index_count(); ++i) {
    sup = std::max(sup, subq_norm(field.pair_curve(i, x1, x2), q));
  }
  return sup;
}

SigmaSquared sigma_squared(const PairwiseMomentField& field, const std::vector<std::size_t>& n_grid,
                           double divergence_factor) {
  if (n_grid.empty()) throw InvalidArgument("sigma_squared: empty n grid");
  std::vector<std::size_t> grid = n_grid;
  std::sort(grid.begin(), grid.end());
  if (grid.front() == 0) throw InvalidArgument("sigma_squared: n must be positive");
  if (grid.back() > field.index_count()) {
    throw MissingData(fmt::format("sigma_squared: n = {} exceeds the field's {} indices",
                                  grid.back(), field.index_count()));
  }

  SigmaSquared result;
  result.value = kInf;
  result.truncated_value = kInf;
  for (std::size_t x = 0; x < field.point_count(); ++x) {
    double cumulative = 0.0;
    std::size_t consumed = 0;
    double running = 0.0;
    double previous = 0.0;
    for (std::size_t n : grid) {
      for (; consumed < n; ++consumed) cumulative += field.variance(consumed, x);
      previous = running;
      running = std::max(running, cumulative / static_cast<double>(n));
    }
    const bool flagged = grid.size() >= 2 && previous > 0.0 && running > divergence_factor * previous;
    if (flagged) {
      ++result.flagged_points;
    } else {
      result.value = std::min(result.value, running);
    }
    result.truncated_value = std::min(result.truncated_value, running);
  }
  result.unbounded_on_grid = result.flagged_points == field.point_count();
  return result;
}

std::vector<std::size_t> dyadic_grid(std::size_t max_n) {
  std::vector<std::size_t> grid;
  for (std::size_t n = 1; n <= max_n && n != 0; n *= 2) grid.push_back(n);
  return grid;
}

FiniteMetricSpace assemble_distance_space(
    std::size_t point_count, const std::function<double(std::size_t, std::size_t)>& distance,
    unsigned threads, std::vector<std::vector<double>> coordinates) {
  const std::size_t n = point_count;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) pairs.emplace_back(a, b);
  }
  std::vector<double> values(pairs.size(), 0.0);
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(pairs.size())));
  if (workers <= 1) {
    for (std::size_t k = 0; k < pairs.size(); ++k) values[k] = distance(pairs[k].first, pairs[k].second);
  } else {
    std::vector<std::exception_ptr> errors(workers);
    {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          try {
            for (std::size_t k = w; k < pairs.size(); k += workers) {
              values[k] = distance(pairs[k].first, pairs[k].second);
            }
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  std::vector<double> dist(n * n, 0.0);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    dist[pairs[k].first * n + pairs[k].second] = values[k];
    dist[pairs[k].second * n + pairs[k].first] = values[k];
  }
  return FiniteMetricSpace(n, std::move(dist), std::move(coordinates));
}

// ---------------------------------------------------------------------------------------------

void save_moment_field(const PairwiseMomentField& field, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  nlohmann::ordered_json manifest;
  manifest["format"] = "uclt-moment-field";
  manifest["version"] = 1;
  manifest["p_grid"] = field.p_grid();
  manifest["point_count"] = field.point_count();
  manifest["index_count"] = field.index_count();
  const auto& prov = field.provenance();
  manifest["provenance"] = {
      {"kind", prov.kind == MomentCurve::Provenance::Kind::Analytic ? "analytic" : "monte_carlo"},
      {"seed", prov.seed},
      {"replications", prov.replications}};
  std::vector<std::string> files;

  const auto write_curve = [](std::ostream& out, const char* kind, std::size_t a, std::size_t b,
                              const MomentCurve& curve, const std::string& variance) {
    for (std::size_t k = 0; k < curve.size(); ++k) {
      const std::string se =
          curve.std_errors().empty() ? std::string() : fmt::format("{:.17g}", curve.std_errors()[k]);
      out << fmt::format("{},{},{},{:.17g},{:.17g},{},{}\n", kind, a, b, curve.p_grid()[k],
                         curve.norms()[k], se, variance);
    }
  };

  for (std::size_t i = 0; i < field.index_count(); ++i) {
    const std::string name = index_file(i);
    files.push_back(name);
    std::ofstream out(dir / name, std::ios::binary);
    out << "kind,a,b,p,norm,std_error,variance\n";
    for (std::size_t x = 0; x < field.point_count(); ++x) {
      const std::string variance =
          field.has_variance(i, x) ? fmt::format("{:.17g}", field.variance(i, x)) : std::string();
      write_curve(out, "point", x, x, field.point_curve(i, x), variance);
    }
    for (std::size_t a = 0; a < field.point_count(); ++a) {
      for (std::size_t b = a + 1; b < field.point_count(); ++b) {
        write_curve(out, "pair", a, b, field.pair_curve(i, a, b), "");
      }
    }
  }
  manifest["files"] = files;
  std::ofstream(dir / "manifest.json", std::ios::binary) << manifest.dump(2) << "\n";
}

PairwiseMomentField load_moment_field(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw MissingData(fmt::format("no manifest.json in {}", dir.string()));
  const nlohmann::json manifest = nlohmann::json::parse(in);
  if (manifest.value("format", "") != "uclt-moment-field") {
    throw InvalidArgument("manifest.json is not a moment-field manifest");
  }
  const auto p_grid = manifest.at("p_grid").get<std::vector<double>>();
  const auto& prov_json = manifest.at("provenance");
  MomentCurve::Provenance prov;
  if (prov_json.at("kind").get<std::string>() == "monte_carlo") {
    prov = MomentCurve::Provenance::monte_carlo(prov_json.at("seed").get<std::uint64_t>(),
                                                prov_json.at("replications").get<std::int64_t>());
  }
  PairwiseMomentField field(p_grid, manifest.at("point_count").get<std::size_t>(),
                            manifest.at("index_count").get<std::size_t>(), prov);
  const auto files = manifest.at("files").get<std::vector<std::string>>();
  if (files.size() != field.index_count()) throw MissingData("manifest file list is incomplete");

  const std::size_t np = p_grid.size();
  for (std::size_t i = 0; i < files.size(); ++i) {
    std::ifstream csv(dir / files[i]);
    if (!csv) throw MissingData(fmt::format("missing {}", files[i]));
    std::string line;
    std::getline(csv, line);  // header
    // (kind, a, b) -> p-indexed norms and errors
    std::map<std::tuple<std::string, std::size_t, std::size_t>,
             std::pair<std::vector<double>, std::vector<double>>>
        curves;
    while (std::getline(csv, line)) {
      if (line.empty()) continue;
      std::vector<std::string> cells;
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) cells.push_back(cell);
      while (cells.size() < 7) cells.emplace_back();
      const std::size_t a = std::stoul(cells[1]);
      const std::size_t b = std::stoul(cells[2]);
      const double p = std::stod(cells[3]);
      const auto it = std::find(p_grid.begin(), p_grid.end(), p);
      if (it == p_grid.end()) throw InvalidArgument(fmt::format("{}: p = {} off grid", files[i], p));
      const auto k = static_cast<std::size_t>(it - p_grid.begin());
      auto& entry = curves[{cells[0], a, b}];
      if (entry.first.empty()) {
        entry.first.assign(np, kMissing);
        entry.second.assign(np, kMissing);
      }
      entry.first[k] = std::stod(cells[4]);
      if (!cells[5].empty()) entry.second[k] = std::stod(cells[5]);
      if (cells[0] == "point" && !cells[6].empty()) field.set_variance(i, a, std::stod(cells[6]));
    }
    for (const auto& [key, data] : curves) {
      const auto& [kind, a, b] = key;
      const bool has_se = std::none_of(data.second.begin(), data.second.end(),
                                       [](double v) { return std::isnan(v); });
      const std::vector<double> se = has_se ? data.second : std::vector<double>{};
      if (kind == "point") {
        field.set_point(i, a, data.first, se);
      } else {
        field.set_pair(i, a, b, data.first, se);
      }
    }
  }
  return field;
}

}  // namespace uclt
