#include "uclt/lab/checks.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include <fmt/format.h>

#include "uclt/errors.hpp"

namespace uclt::lab {

namespace {

std::vector<std::size_t> all_points(const MartingaleFieldModel& model) {
  std::vector<std::size_t> pts(model.point_count());
  for (std::size_t k = 0; k < pts.size(); ++k) pts[k] = k;
  return pts;
}

void check_n_values(const MartingaleFieldModel& model, const std::vector<std::size_t>& n_values,
                    const char* what) {
  if (n_values.empty()) throw InvalidArgument(fmt::format("{}: empty n list", what));
  for (std::size_t k = 0; k < n_values.size(); ++k) {
    if (n_values[k] == 0) throw InvalidArgument(fmt::format("{}: n must be at least 1", what));
    if (k > 0 && n_values[k] <= n_values[k - 1]) {
      throw InvalidArgument(fmt::format("{}: n values must be strictly ascending", what));
    }
  }
  if (n_values.back() > model.horizon()) {
    throw HorizonExceeded(fmt::format("{}: n = {} exceeds the model horizon {}", what,
                                      n_values.back(), model.horizon()));
  }
}

void check_replications(std::size_t replications, const char* what) {
  if (replications < 2) throw InvalidArgument(fmt::format("{}: need at least 2 replications", what));
}

/// |v|^p with 0^p = 0, given log|v|.
inline double abs_pow(double log_abs, double p) { return std::exp(p * log_abs); }

inline double safe_log_abs(double v) {
  return v == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(std::abs(v));
}

double lp_from_mean(double mean_abs_pow, double p) {
  return mean_abs_pow > 0.0 ? std::pow(mean_abs_pow, 1.0 / p) : 0.0;
}

constexpr double kTStat = 3.0;

}  // namespace

std::vector<double> EtaSamples::column(std::size_t k) const {
  std::vector<double> out(replications);
  for (std::size_t r = 0; r < replications; ++r) out[r] = at(r, k);
  return out;
}

std::vector<EtaSamples> simulate_eta_multi(const MartingaleFieldModel& model,
                                           const std::vector<std::size_t>& n_values,
                                           std::size_t replications, const LabOptions& options,
                                           Stream stream, std::vector<std::size_t> points) {
  check_n_values(model, n_values, "simulate_eta");
  if (points.empty()) points = all_points(model);
  const FieldSampler sampler(model, points);
  const std::size_t width = sampler.width();
  const std::size_t n_max = n_values.back();

  using Rows = std::vector<std::vector<double>>;
  const auto blocks = run_blocks<Rows>(
      replications, options, [&](std::size_t, std::size_t begin, std::size_t end) {
        Rows out(n_values.size());
        for (auto& o : out) o.reserve((end - begin) * width);
        std::vector<double> xi(width);
        std::vector<double> sum(width);
        for (std::size_t r = begin; r < end; ++r) {
          auto path = sampler.path(stream, r);
          std::fill(sum.begin(), sum.end(), 0.0);
          std::size_t next_n = 0;
          for (std::size_t i = 0; i < n_max; ++i) {
            path.next(xi.data());
            for (std::size_t k = 0; k < width; ++k) sum[k] += xi[k];
            if (i + 1 == n_values[next_n]) {
              const double norm = 1.0 / std::sqrt(static_cast<double>(n_values[next_n]));
              for (std::size_t k = 0; k < width; ++k) out[next_n].push_back(sum[k] * norm);
              ++next_n;
            }
          }
        }
        return out;
      });

  std::vector<EtaSamples> result(n_values.size());
  for (std::size_t j = 0; j < n_values.size(); ++j) {
    result[j].n = n_values[j];
    result[j].replications = replications;
    result[j].points = points;
    result[j].values.reserve(replications * width);
    for (const auto& b : blocks) {
      result[j].values.insert(result[j].values.end(), b[j].begin(), b[j].end());
    }
  }
  return result;
}

EtaSamples simulate_eta(const MartingaleFieldModel& model, std::size_t n, std::size_t replications,
                        const LabOptions& options, Stream stream, std::vector<std::size_t> points) {
  return std::move(simulate_eta_multi(model, {n}, replications, options, stream, std::move(points)).front());
}

PairwiseMomentField estimate_moment_curves(const MartingaleFieldModel& model,
                                           const std::vector<double>& p_grid,
                                           std::size_t replications, std::size_t index_count,
                                           const LabOptions& options) {
  check_replications(replications, "estimate_moment_curves");
  if (p_grid.empty()) throw InvalidArgument("estimate_moment_curves: empty p grid");
  if (index_count == 0) throw InvalidArgument("estimate_moment_curves: index_count must be positive");
  if (index_count > model.horizon()) {
    throw HorizonExceeded(fmt::format("estimate_moment_curves: {} indices exceed the horizon {}",
                                      index_count, model.horizon()));
  }
  PairwiseMomentField field(p_grid, model.point_count(), index_count,
                            MomentCurve::Provenance::monte_carlo(model.seed(),
                                                                 static_cast<std::int64_t>(replications)));
  const std::size_t m = model.point_count();
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) pairs.emplace_back(a, b);
  }
  const std::size_t slots = m + pairs.size();
  const std::size_t np = p_grid.size();
  const std::size_t norm_count = index_count * slots * np;
  const std::size_t total = norm_count + 2 * index_count * m;
  const FieldSampler sampler(model, all_points(model));

  const auto blocks = run_blocks<BlockSums>(
      replications, options, [&](std::size_t, std::size_t begin, std::size_t end) {
        BlockSums out;
        out.sums.assign(total, 0.0);
        out.count = end - begin;
        std::vector<double> xi(m);
        for (std::size_t r = begin; r < end; ++r) {
          auto path = sampler.path(Stream::Moments, r);
          for (std::size_t i = 0; i < index_count; ++i) {
            path.next(xi.data());
            double* row = out.sums.data() + i * slots * np;
            for (std::size_t x = 0; x < m; ++x) {
              const double l = safe_log_abs(xi[x]);
              for (std::size_t j = 0; j < np; ++j) row[x * np + j] += abs_pow(l, p_grid[j]);
              double* var = out.sums.data() + norm_count + 2 * (i * m + x);
              var[0] += xi[x];
              var[1] += xi[x] * xi[x];
            }
            for (std::size_t s = 0; s < pairs.size(); ++s) {
              const double l = safe_log_abs(xi[pairs[s].first] - xi[pairs[s].second]);
              for (std::size_t j = 0; j < np; ++j) row[(m + s) * np + j] += abs_pow(l, p_grid[j]);
            }
          }
        }
        return out;
      });

  const std::size_t outputs = norm_count + index_count * m;
  const auto est = jackknife_vector(
      blocks, outputs, [&](const std::vector<double>& s, double count, std::vector<double>& o) {
        for (std::size_t k = 0; k < norm_count; ++k) o[k] = lp_from_mean(s[k] / count, p_grid[k % np]);
        for (std::size_t c = 0; c < index_count * m; ++c) {
          const double mean = s[norm_count + 2 * c] / count;
          o[norm_count + c] = s[norm_count + 2 * c + 1] / count - mean * mean;
        }
      });

  std::vector<double> norms(np);
  std::vector<double> errors(np);
  for (std::size_t i = 0; i < index_count; ++i) {
    for (std::size_t slot = 0; slot < slots; ++slot) {
      for (std::size_t j = 0; j < np; ++j) {
        const auto& e = est[(i * slots + slot) * np + j];
        norms[j] = std::max(0.0, e.value);
        errors[j] = e.std_error;
      }
      if (slot < m) {
        field.set_point(i, slot, norms, errors);
      } else {
        const auto& pr = pairs[slot - m];
        field.set_pair(i, pr.first, pr.second, norms, errors);
      }
    }
    for (std::size_t x = 0; x < m; ++x) {
      field.set_variance(i, x, std::max(0.0, est[norm_count + i * m + x].value));
    }
  }
  return field;
}

std::string Target::label() const {
  return second ? fmt::format("pair({},{})", first, *second) : fmt::format("point({})", first);
}

bool OsekowskiReport::passed() const {
  return orthogonality_reproduced &&
         std::all_of(rows.begin(), rows.end(), [](const OsekowskiRow& r) { return r.within_constant; });
}

OsekowskiReport osekowski_check(const MartingaleFieldModel& model, const Target& target,
                                const std::vector<double>& p_grid,
                                const std::vector<std::size_t>& n_grid, std::size_t replications,
                                const LabOptions& options) {
  check_replications(replications, "osekowski_check");
  check_n_values(model, n_grid, "osekowski_check");
  if (p_grid.empty()) throw InvalidArgument("osekowski_check: empty p grid");
  for (double p : p_grid) {
    if (!(p >= 2.0) || !std::isfinite(p)) throw InvalidArgument("osekowski_check: p must be finite and >= 2");
  }
  std::vector<std::size_t> pts{target.first};
  if (target.second) pts.push_back(*target.second);
  const FieldSampler sampler(model, pts);
  const bool is_pair = target.second.has_value();
  const std::size_t np = p_grid.size();
  const std::size_t nn = n_grid.size();
  const std::size_t n_max = n_grid.back();
  const std::size_t a_size = np * nn;
  const std::size_t total = a_size + np * n_max;

  const auto blocks = run_blocks<BlockSums>(
      replications, options, [&](std::size_t, std::size_t begin, std::size_t end) {
        BlockSums out;
        out.sums.assign(total, 0.0);
        out.count = end - begin;
        double xi[2] = {0.0, 0.0};
        for (std::size_t r = begin; r < end; ++r) {
          auto path = sampler.path(Stream::Osekowski, r);
          double sum = 0.0;
          std::size_t next_n = 0;
          for (std::size_t k = 0; k < n_max; ++k) {
            path.next(xi);
            const double zeta = is_pair ? xi[0] - xi[1] : xi[0];
            sum += zeta;
            const double l = safe_log_abs(zeta);
            for (std::size_t j = 0; j < np; ++j) out.sums[a_size + j * n_max + k] += abs_pow(l, p_grid[j]);
            if (k + 1 == n_grid[next_n]) {
              const double le = safe_log_abs(sum / std::sqrt(static_cast<double>(k + 1)));
              for (std::size_t j = 0; j < np; ++j) out.sums[j * nn + next_n] += abs_pow(le, p_grid[j]);
              ++next_n;
            }
          }
        }
        return out;
      });

  // outputs per (p, n): lhs, rms norm, ratio
  const auto est = jackknife_vector(
      blocks, 3 * a_size, [&](const std::vector<double>& s, double count, std::vector<double>& o) {
        for (std::size_t j = 0; j < np; ++j) {
          const double p = p_grid[j];
          double running = 0.0;
          std::size_t next_n = 0;
          for (std::size_t k = 0; k < n_max && next_n < nn; ++k) {
            const double norm_k = lp_from_mean(s[a_size + j * n_max + k] / count, p);
            running += norm_k * norm_k;
            if (k + 1 == n_grid[next_n]) {
              const std::size_t idx = j * nn + next_n;
              const double lhs = lp_from_mean(s[idx] / count, p);
              const double rms = std::sqrt(running / static_cast<double>(k + 1));
              o[3 * idx] = lhs;
              o[3 * idx + 1] = rms;
              o[3 * idx + 2] = rms > 0.0 ? lhs / ((p / std::log(p)) * rms) : 0.0;
              ++next_n;
            }
          }
        }
      });

  OsekowskiReport report;
  report.model = model.name();
  report.target = target.label();
  report.independent = model.independent_in_time();
  const double orthogonal_ratio = std::numbers::ln2 / 2.0;
  for (std::size_t j = 0; j < np; ++j) {
    for (std::size_t t = 0; t < nn; ++t) {
      const std::size_t idx = j * nn + t;
      OsekowskiRow row;
      row.p = p_grid[j];
      row.n = n_grid[t];
      row.lhs = est[3 * idx].value;
      row.rms_norm = est[3 * idx + 1].value;
      row.ratio = est[3 * idx + 2];
      row.within_constant = row.ratio.value + kTStat * row.ratio.std_error <= kOsekowskiConstant;
      row.within_rosenthal = row.ratio.value <= kRosenthalConstant;
      if (row.p == 2.0 && row.rms_norm > 0.0 &&
          std::abs(row.ratio.value - orthogonal_ratio) > kTStat * row.ratio.std_error + 1e-12) {
        report.orthogonality_reproduced = false;
      }
      report.rows.push_back(row);
    }
  }
  return report;
}

bool TailDominationReport::passed() const {
  return std::all_of(rows.begin(), rows.end(), [](const TailRow& r) { return r.dominated; });
}

TailDominationReport tail_domination_check(const MartingaleFieldModel& model,
                                           const TailFunction& tail,
                                           const std::vector<double>& x_values,
                                           const std::vector<std::size_t>& n_values,
                                           std::size_t replications, std::size_t point,
                                           const LabOptions& options) {
  check_replications(replications, "tail_domination_check");
  check_n_values(model, n_values, "tail_domination_check");
  if (x_values.empty()) throw InvalidArgument("tail_domination_check: empty x list");
  for (double x : x_values) {
    if (!(x > 1.0)) throw InvalidArgument("tail_domination_check: every x must exceed 1");
  }
  const FieldSampler sampler(model, {point});
  const std::size_t nn = n_values.size();
  const std::size_t nx = x_values.size();
  const std::size_t n_max = n_values.back();

  // fixed unit weight vectors, one per n
  std::vector<std::vector<double>> weights(nn);
  for (std::size_t t = 0; t < nn; ++t) {
    auto engine = make_engine(model.seed(), Stream::Weights, n_values[t]);
    std::normal_distribution<double> normal;
    double norm2 = 0.0;
    weights[t].resize(n_values[t]);
    for (auto& w : weights[t]) {
      w = normal(engine);
      norm2 += w * w;
    }
    for (auto& w : weights[t]) w /= std::sqrt(norm2);
  }

  // sums[((t * 2 + w) * nx + k) * 2 + side]
  const std::size_t total = nn * 2 * nx * 2;
  const auto blocks = run_blocks<BlockSums>(
      replications, options, [&](std::size_t, std::size_t begin, std::size_t end) {
        BlockSums out;
        out.sums.assign(total, 0.0);
        out.count = end - begin;
        std::vector<double> weighted(nn);
        double xi = 0.0;
        for (std::size_t r = begin; r < end; ++r) {
          auto path = sampler.path(Stream::TailSum, r);
          double sum = 0.0;
          std::fill(weighted.begin(), weighted.end(), 0.0);
          std::size_t next_n = 0;
          for (std::size_t i = 0; i < n_max; ++i) {
            path.next(&xi);
            sum += xi;
            for (std::size_t t = next_n; t < nn; ++t) weighted[t] += weights[t][i] * xi;
            if (i + 1 == n_values[next_n]) {
              const double values[2] = {sum / std::sqrt(static_cast<double>(i + 1)), weighted[next_n]};
              for (std::size_t w = 0; w < 2; ++w) {
                for (std::size_t k = 0; k < nx; ++k) {
                  double* cell = out.sums.data() + ((next_n * 2 + w) * nx + k) * 2;
                  if (values[w] > x_values[k]) cell[0] += 1.0;
                  if (values[w] < -x_values[k]) cell[1] += 1.0;
                }
              }
              ++next_n;
            }
          }
        }
        return out;
      });

  const BlockSums pooled = pool(blocks);
  const double count = static_cast<double>(pooled.count);
  TailDominationReport report{model.name(), tail, {}};
  std::vector<double> bounds(nx);
  for (std::size_t k = 0; k < nx; ++k) bounds[k] = weighted_sum_tail_bound(tail, x_values[k]);
  for (std::size_t t = 0; t < nn; ++t) {
    for (std::size_t w = 0; w < 2; ++w) {
      for (std::size_t k = 0; k < nx; ++k) {
        const double* cell = pooled.sums.data() + ((t * 2 + w) * nx + k) * 2;
        TailRow row;
        row.n = n_values[t];
        row.x = x_values[k];
        row.weights = w == 0 ? "uniform" : "random-unit";
        row.upper = cell[0] / count;
        row.lower = cell[1] / count;
        row.empirical = std::max(row.upper, row.lower);
        row.std_error = std::sqrt(row.empirical * (1.0 - row.empirical) / count);
        row.bound = bounds[k];
        row.dominated = row.empirical <= row.bound + kTStat * row.std_error;
        report.rows.push_back(row);
      }
    }
  }
  return report;
}

bool MartingalePropertyReport::passed() const {
  return std::all_of(conditions.begin(), conditions.end(), [&](const MomentCondition& c) {
    return std::abs(c.t_stat) <= t_threshold;
  });
}

MartingalePropertyReport martingale_property_check(const MartingaleFieldModel& model,
                                                   std::size_t index_count,
                                                   std::size_t replications,
                                                   const LabOptions& options) {
  check_replications(replications, "martingale_property_check");
  if (index_count < 2) throw InvalidArgument("martingale_property_check: need at least 2 indices");
  if (index_count > model.horizon()) {
    throw HorizonExceeded(fmt::format("martingale_property_check: {} indices exceed the horizon {}",
                                      index_count, model.horizon()));
  }
  const std::size_t m = model.point_count();
  const FieldSampler sampler(model, all_points(model));
  constexpr std::size_t kFeatures = 3;
  const std::size_t cells = index_count * m;
  const std::size_t total = 2 * kFeatures + 2 * cells;

  const auto blocks = run_blocks<BlockSums>(
      replications, options, [&](std::size_t, std::size_t begin, std::size_t end) {
        BlockSums out;
        out.sums.assign(total, 0.0);
        out.count = end - begin;
        std::vector<double> xi(m);
        std::vector<double> previous(m);
        std::vector<double> partial(m);
        for (std::size_t r = begin; r < end; ++r) {
          auto path = sampler.path(Stream::MartingaleProperty, r);
          std::fill(previous.begin(), previous.end(), 0.0);
          std::fill(partial.begin(), partial.end(), 0.0);
          double u[kFeatures] = {0.0, 0.0, 0.0};
          for (std::size_t i = 0; i < index_count; ++i) {
            path.next(xi.data());
            const double norm = i > 0 ? 1.0 / std::sqrt(static_cast<double>(i)) : 0.0;
            for (std::size_t x = 0; x < m; ++x) {
              const double sgn = previous[x] > 0.0 ? 1.0 : (previous[x] < 0.0 ? -1.0 : 0.0);
              u[0] += xi[x];
              u[1] += xi[x] * sgn;
              u[2] += xi[x] * std::tanh(partial[x] * norm);
              double* cell = out.sums.data() + 2 * kFeatures + 2 * (i * m + x);
              cell[0] += xi[x];
              cell[1] += xi[x] * xi[x];
              previous[x] = xi[x];
              partial[x] += xi[x];
            }
          }
          for (std::size_t f = 0; f < kFeatures; ++f) {
            out.sums[2 * f] += u[f];
            out.sums[2 * f + 1] += u[f] * u[f];
          }
        }
        return out;
      });

  const BlockSums pooled = pool(blocks);
  const double count = static_cast<double>(pooled.count);
  const auto t_of = [&](double s1, double s2, MomentCondition& c) {
    c.mean = s1 / count;
    const double var = std::max(0.0, s2 / count - c.mean * c.mean) * count / (count - 1.0);
    c.std_error = std::sqrt(var / count);
    if (c.std_error > 0.0) {
      c.t_stat = c.mean / c.std_error;
    } else {
      c.t_stat = c.mean == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), c.mean);
    }
  };
  MartingalePropertyReport report;
  report.model = model.name();
  report.index_count = index_count;
  report.t_threshold = kTStat;
  const char* names[kFeatures] = {"constant", "sign-previous", "tanh-normalized-partial-sum"};
  for (std::size_t f = 0; f < kFeatures; ++f) {
    MomentCondition c;
    c.feature = names[f];
    t_of(pooled.sums[2 * f], pooled.sums[2 * f + 1], c);
    report.conditions.push_back(c);
  }
  for (std::size_t c = 0; c < cells; ++c) {
    MomentCondition cell;
    t_of(pooled.sums[2 * kFeatures + 2 * c], pooled.sums[2 * kFeatures + 2 * c + 1], cell);
    report.max_cell_t = std::max(report.max_cell_t, std::abs(cell.t_stat));
  }
  return report;
}

CovarianceReport covariance_estimate(const MartingaleFieldModel& model, std::size_t n,
                                     std::size_t replications, const LabOptions& options) {
  check_replications(replications, "covariance_estimate");
  const EtaSamples eta = simulate_eta(model, n, replications, options, Stream::Covariance);
  const std::size_t m = model.point_count();
  const double count = static_cast<double>(replications);
  CovarianceReport report;
  report.model = model.name();
  report.n = n;
  report.points = m;
  report.estimate.assign(m * m, 0.0);
  report.std_error.assign(m * m, 0.0);

  std::vector<double> mean(m, 0.0);
  for (std::size_t r = 0; r < replications; ++r) {
    for (std::size_t a = 0; a < m; ++a) mean[a] += eta.at(r, a);
  }
  for (auto& v : mean) v /= count;
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a; b < m; ++b) {
      double s1 = 0.0;
      double s2 = 0.0;
      for (std::size_t r = 0; r < replications; ++r) {
        const double prod = (eta.at(r, a) - mean[a]) * (eta.at(r, b) - mean[b]);
        s1 += prod;
        s2 += prod * prod;
      }
      const double cov = s1 / (count - 1.0);
      const double var_prod = std::max(0.0, s2 / count - (s1 / count) * (s1 / count));
      const double se = std::sqrt(var_prod / count);
      report.estimate[a * m + b] = report.estimate[b * m + a] = cov;
      report.std_error[a * m + b] = report.std_error[b * m + a] = se;
    }
  }

  if (model.analytic_covariance(0, 0)) {
    std::vector<double> analytic(m * m);
    double max_z = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = 0; b < m; ++b) {
        analytic[a * m + b] = *model.analytic_covariance(a, b);
        const double diff = std::abs(report.estimate[a * m + b] - analytic[a * m + b]);
        const double se = report.std_error[a * m + b];
        if (se > 0.0) {
          max_z = std::max(max_z, diff / se);
        } else if (diff > 1e-12) {
          max_z = std::numeric_limits<double>::infinity();
        }
      }
    }
    report.analytic = std::move(analytic);
    report.max_z = max_z;
  }
  return report;
}

CltReport clt_diagnostic(const MartingaleFieldModel& model, std::size_t n_small,
                         std::size_t n_large, std::size_t replications,
                         const LabOptions& options) {
  check_replications(replications, "clt_diagnostic");
  if (n_small > n_large) throw InvalidArgument("clt_diagnostic: need n_small <= n_large");
  const EtaSamples small = simulate_eta(model, n_small, replications, options, Stream::CltSmall);
  const EtaSamples large = simulate_eta(model, n_large, replications, options, Stream::CltLarge);
  const std::size_t m = model.point_count();

  const auto sup_norm = [&](const EtaSamples& s) {
    std::vector<double> out(replications);
    for (std::size_t r = 0; r < replications; ++r) {
      double v = 0.0;
      for (std::size_t k = 0; k < m; ++k) v = std::max(v, std::abs(s.at(r, k)));
      out[r] = v;
    }
    return out;
  };

  CltReport report;
  report.model = model.name();
  report.n_small = n_small;
  report.n_large = n_large;
  report.replications = replications;
  report.ks_supnorm = ks_two_sample(sup_norm(small), sup_norm(large));
  report.ks_critical = ks_critical_value(replications, replications);
  report.note =
      "KS stabilization of sup_x |eta_n(x)| is evidence of weak compactness, not a proof";

  if (model.analytic_covariance(0, 0)) {
    const auto per_point = [&](const EtaSamples& s) {
      std::vector<double> ks(m);
      for (std::size_t k = 0; k < m; ++k) {
        const double sigma = std::sqrt(*model.analytic_covariance(k, k));
        auto column = s.column(k);
        if (sigma == 0.0) {
          ks[k] = std::all_of(column.begin(), column.end(), [](double v) { return v == 0.0; }) ? 0.0 : 1.0;
        } else {
          ks[k] = ks_one_sample(std::move(column), [sigma](double x) { return normal_cdf(x, sigma); });
        }
      }
      return ks;
    };
    report.per_point_ks_small = per_point(small);
    report.per_point_ks_large = per_point(large);
  }
  return report;
}

bool EquicontinuityReport::passed() const {
  return std::all_of(rows.begin(), rows.end(), [](const EquicontinuityRow& r) { return r.dominated; });
}

EquicontinuityReport equicontinuity_check(
    const MartingaleFieldModel& model, const PairwiseMomentField& field, const PsiFunction& psi,
    const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
    const std::vector<std::size_t>& n_grid, std::size_t replications, const LabOptions& options) {
  check_replications(replications, "equicontinuity_check");
  check_n_values(model, n_grid, "equicontinuity_check");
  if (field.point_count() != model.point_count()) {
    throw InvalidArgument("equicontinuity_check: field and model disagree on the point count");
  }
  const PsiFunction psi_r = rosenthal_transform(psi);
  std::vector<double> p_grid;
  for (double p : field.p_grid()) {
    const double v = psi_r(p);
    if (std::isfinite(v) && v > 0.0) p_grid.push_back(p);
  }
  if (p_grid.empty()) throw EmptySupportOverlap("equicontinuity_check: ψ_R is infinite on the whole p grid");

  std::set<std::size_t> unique;
  for (const auto& [a, b] : pairs) {
    if (a >= model.point_count() || b >= model.point_count()) {
      throw InvalidArgument("equicontinuity_check: pair index out of range");
    }
    unique.insert(a);
    unique.insert(b);
  }
  std::vector<std::size_t> pts(unique.begin(), unique.end());
  std::map<std::size_t, std::size_t> slot_of;
  for (std::size_t k = 0; k < pts.size(); ++k) slot_of[pts[k]] = k;

  std::vector<std::size_t> dbar_grid;
  for (auto n : n_grid) {
    if (n <= field.index_count()) dbar_grid.push_back(n);
  }
  if (dbar_grid.empty()) dbar_grid.push_back(field.index_count());

  EquicontinuityReport report;
  report.model = model.name();
  if (pairs.empty()) return report;

  const FieldSampler sampler(model, pts);
  const std::size_t np = p_grid.size();
  const std::size_t nn = n_grid.size();
  const std::size_t n_max = n_grid.back();
  const std::size_t total = pairs.size() * nn * np;

  const auto blocks = run_blocks<BlockSums>(
      replications, options, [&](std::size_t, std::size_t begin, std::size_t end) {
        BlockSums out;
        out.sums.assign(total, 0.0);
        out.count = end - begin;
        std::vector<double> xi(pts.size());
        std::vector<double> sum(pts.size());
        for (std::size_t r = begin; r < end; ++r) {
          auto path = sampler.path(Stream::Equicontinuity, r);
          std::fill(sum.begin(), sum.end(), 0.0);
          std::size_t next_n = 0;
          for (std::size_t i = 0; i < n_max; ++i) {
            path.next(xi.data());
            for (std::size_t k = 0; k < pts.size(); ++k) sum[k] += xi[k];
            if (i + 1 == n_grid[next_n]) {
              const double norm = 1.0 / std::sqrt(static_cast<double>(i + 1));
              for (std::size_t s = 0; s < pairs.size(); ++s) {
                const double d = (sum[slot_of.at(pairs[s].first)] - sum[slot_of.at(pairs[s].second)]) * norm;
                const double l = safe_log_abs(d);
                for (std::size_t j = 0; j < np; ++j) {
                  out.sums[(s * nn + next_n) * np + j] += abs_pow(l, p_grid[j]);
                }
              }
              ++next_n;
            }
          }
        }
        return out;
      });

  const auto est = jackknife_vector(
      blocks, total, [&](const std::vector<double>& s, double count, std::vector<double>& o) {
        for (std::size_t k = 0; k < total; ++k) o[k] = lp_from_mean(s[k] / count, p_grid[k % np]);
      });

  for (std::size_t s = 0; s < pairs.size(); ++s) {
    EquicontinuityRow row;
    row.x1 = pairs[s].first;
    row.x2 = pairs[s].second;
    for (std::size_t t = 0; t < nn; ++t) {
      for (std::size_t j = 0; j < np; ++j) {
        const auto& e = est[(s * nn + t) * np + j];
        const double scale = psi_r(p_grid[j]);
        const double v = std::max(0.0, e.value) / scale;
        if (v > row.lhs) {
          row.lhs = v;
          row.lhs_std_error = e.std_error / scale;
        }
      }
    }
    row.dbar = row.x1 == row.x2 ? 0.0 : distance_bar(field, row.x1, row.x2, psi, dbar_grid);
    row.bound = kOsekowskiConstant * row.dbar;
    row.dominated = row.lhs - kTStat * row.lhs_std_error <= row.bound;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace uclt::lab
