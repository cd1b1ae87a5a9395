#include "franson/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "franson/constants.hpp"
#include "franson/errors.hpp"

namespace franson {

double closed_form_detuning(const SellmeierModel& fiber, double target_alice_nm, double target_bob_nm,
                            double path_diff_b_m) {
  const double ng_a = dispersion_sample(fiber, target_alice_nm).group_index;
  const double ng_b = dispersion_sample(fiber, target_bob_nm).group_index;
  return path_diff_b_m * (ng_b / ng_a - 1.0);
}

std::pair<double, double> default_target_wavelengths(std::span<const ChannelPair> pairs) {
  if (pairs.empty()) throw DomainError("no channel pairs to take target wavelengths from");
  double alice = 0.0;
  double bob = 0.0;
  for (const auto& p : pairs) {
    alice += p.alice.center_nm;
    bob += p.bob.center_nm;
  }
  const auto n = static_cast<double>(pairs.size());
  return {alice / n, bob / n};
}

double optimize_offset(std::span<const double> profile) {
  if (profile.empty()) throw std::invalid_argument("optimize_offset: empty profile");
  const auto [lo, hi] = std::minmax_element(profile.begin(), profile.end());
  return -0.5 * (*lo + *hi);
}

namespace {

double mod_two_pi(double x) {
  double r = std::fmod(x, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  return r;
}

struct Arc {
  double start;  // [0, 2π)
  double width;
};

}  // namespace

OffsetChoice auto_phase_offset(std::span<const ChannelPair> pairs, const InterferometerPair& interf,
                               double pump_nm, double threshold_phase_rad, EdgeRule rule) {
  if (pairs.empty()) return {};

  std::vector<double> points;
  std::vector<std::size_t> first;
  for (const auto& p : pairs) {
    first.push_back(points.size());
    for (double x : evaluation_points(p.alice, rule)) points.push_back(x);
  }
  first.push_back(points.size());
  std::vector<double> phase(points.size());
  two_photon_phase_batch(interf.with_phase_offset(0.0), pump_nm, points, phase);

  // Each pair occupies a short arc around its first evaluation point.
  std::vector<Arc> arcs;
  arcs.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double ref = phase[first[i]];
    double lo = 0.0;
    double hi = 0.0;
    for (std::size_t j = first[i]; j < first[i + 1]; ++j) {
      const double d = reduce_phase(phase[j] - ref);
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    arcs.push_back({mod_two_pi(ref + lo), hi - lo});
  }

  const double window = 2.0 * threshold_phase_rad;
  constexpr double kSlack = 1e-12;
  int best_count = 0;
  double best_spread = std::numeric_limits<double>::infinity();
  double best_start = 0.0;
  for (const Arc& candidate : arcs) {
    if (candidate.width > window + kSlack) continue;
    int count = 0;
    double spread = 0.0;
    for (const Arc& arc : arcs) {
      const double end = mod_two_pi(arc.start - candidate.start) + arc.width;
      if (end <= window + kSlack) {
        ++count;
        spread = std::max(spread, end);
      }
    }
    if (count > best_count || (count == best_count && spread < best_spread)) {
      best_count = count;
      best_spread = spread;
      best_start = candidate.start;
    }
  }

  if (best_count == 0) {
    // Nothing fits: minimax over every evaluated phase.
    return {wrap_offset(optimize_offset(phase)), 0};
  }
  const double profile[] = {best_start, best_start + best_spread};
  return {wrap_offset(optimize_offset(profile)), best_count};
}

std::vector<double> DetuningSearch::values() const {
  if (!(step_m > 0.0) || !(max_m >= min_m))
    throw DomainError(fmt::format("invalid detuning search [{}, {}] step {}", min_m, max_m, step_m));
  const auto steps = static_cast<long>(std::floor((max_m - min_m) / step_m + 1e-9));
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  for (long i = 0; i <= steps; ++i) out.push_back(min_m + static_cast<double>(i) * step_m);
  return out;
}

void OptimizationProblem::validate() const {
  source.validate();
  grid.validate();
  if (!(path_diff_b_m > 0.0)) throw DomainError("reference path difference must be positive");
  if (!(threshold_phase_rad >= 0.0)) throw DomainError("threshold phase must be non-negative");
  (void)search.values();
}

InterferometerPair configure_interferometers(const OptimizationProblem& problem,
                                             std::span<const ChannelPair> pairs, double detuning_m) {
  const InterferometerPair base(problem.fiber, problem.path_diff_b_m, detuning_m);
  if (problem.offset_mode.automatic) {
    const auto choice = auto_phase_offset(pairs, base, problem.source.pump_nm, problem.threshold_phase_rad,
                                          problem.edge_rule);
    return base.with_phase_offset(choice.phase_offset_rad);
  }
  const InterferometerPair cal = base.calibrated(problem.source.pump_nm, problem.source.degenerate_nm());
  return cal.with_phase_offset(cal.phase_offset() + problem.offset_mode.value_rad);
}

OptimizationResult evaluate_detuning(const OptimizationProblem& problem, std::span<const ChannelPair> pairs,
                                     double detuning_m, OptimizationMethod method) {
  const double pump = problem.source.pump_nm;
  const InterferometerPair interf = configure_interferometers(problem, pairs, detuning_m);
  auto counted = count_passing_pairs(pairs, interf, pump, problem.threshold_phase_rad, problem.edge_rule);

  OptimizationResult result;
  result.best_detuning_m = detuning_m;
  result.best_phase_offset_rad = interf.phase_offset();
  result.pair_count = counted.count;
  result.method = method;

  std::vector<double> centers;
  for (const auto& p : counted.pairs) centers.push_back(p.alice.center_nm);
  std::vector<double> phases(centers.size());
  two_photon_phase_batch(interf, pump, centers, phases);
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const auto& p = counted.pairs[i];
    result.profile.push_back({centers[i], conjugate_wavelength(pump, centers[i]), phases[i],
                              qber_from_phase(phases[i]), p.passes});
    if (p.passes) {
      if (!result.passing_band) result.passing_band = Band{p.alice.center_nm, p.alice.center_nm};
      result.passing_band->lo_nm = std::min(result.passing_band->lo_nm, p.alice.center_nm);
      result.passing_band->hi_nm = std::max(result.passing_band->hi_nm, p.alice.center_nm);
    }
  }
  result.pairs = std::move(counted.pairs);
  return result;
}

namespace {

std::vector<ChannelPair> problem_pairs(const OptimizationProblem& problem) {
  problem.validate();
  auto pairs = pair_channels(problem.grid, problem.source.pump_nm, emission_band(problem.source));
  if (pairs.empty()) throw DomainError("no grid channel pairs inside the source band");
  return pairs;
}

}  // namespace

namespace {

int count_at(const OptimizationProblem& problem, std::span<const ChannelPair> pairs, double detuning_m) {
  const auto interf = configure_interferometers(problem, pairs, detuning_m);
  return count_passing_pairs(pairs, interf, problem.source.pump_nm, problem.threshold_phase_rad, problem.edge_rule)
      .count;
}

// Evaluates every detuning, possibly on several threads; results land in
// input order so the reduction does not depend on scheduling.
std::vector<int> count_all(const OptimizationProblem& problem, std::span<const ChannelPair> pairs,
                           std::span<const double> deltas) {
  std::vector<int> counts(deltas.size(), 0);
  const std::size_t workers =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::max<std::size_t>(deltas.size(), 1));
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < deltas.size(); i += workers) counts[i] = count_at(problem, pairs, deltas[i]);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return counts;
}

bool better(int count, double delta, int best_count, double best_delta) {
  if (count != best_count) return count > best_count;
  const double a = std::abs(delta);
  const double b = std::abs(best_delta);
  return a < b || (a == b && delta < best_delta);
}

}  // namespace

OptimizationResult scan_optimize(const OptimizationProblem& problem) {
  const auto pairs = problem_pairs(problem);
  const auto grid = problem.search.values();
  const auto coarse = count_all(problem, pairs, grid);
  const int coarse_max = *std::max_element(coarse.begin(), coarse.end());

  // The count is piecewise constant in δ and its top plateau can be narrower
  // than the scan step, so every coarse maximum is refined at a tenth of the
  // step over its neighbouring intervals. The closed-form point joins too.
  std::vector<double> candidates(grid.begin(), grid.end());
  std::vector<int> counts(coarse.begin(), coarse.end());
  std::vector<double> extra;
  const double step = problem.search.step_m;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (coarse[i] != coarse_max) continue;
    for (int j = -DetuningSearch::kRefine + 1; j < DetuningSearch::kRefine; ++j) {
      const double d = grid[i] + step * j / DetuningSearch::kRefine;
      if (j != 0 && d >= problem.search.min_m && d <= problem.search.max_m) extra.push_back(d);
    }
  }
  const auto [alice, bob] = default_target_wavelengths(pairs);
  const double closed = closed_form_detuning(problem.fiber, alice, bob, problem.path_diff_b_m);
  if (closed >= problem.search.min_m && closed <= problem.search.max_m) extra.push_back(closed);
  const auto extra_counts = count_all(problem, pairs, extra);
  candidates.insert(candidates.end(), extra.begin(), extra.end());
  counts.insert(counts.end(), extra_counts.begin(), extra_counts.end());

  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i)
    if (better(counts[i], candidates[i], counts[best], candidates[best])) best = i;
  return evaluate_detuning(problem, pairs, candidates[best], OptimizationMethod::scan);
}

OptimizationResult closed_form_optimize(const OptimizationProblem& problem) {
  const auto pairs = problem_pairs(problem);
  const auto [alice, bob] = default_target_wavelengths(pairs);
  const double delta = closed_form_detuning(problem.fiber, alice, bob, problem.path_diff_b_m);
  return evaluate_detuning(problem, pairs, delta, OptimizationMethod::closed_form);
}

// ---------------------------------------------------------------------------
// Balanced-phase fit

namespace {

struct LinearFit {
  double k;
  double c;
  double sse;
};

LinearFit fit_linear(std::span<const PhaseSample> data, double pump_nm, double vertex_nm) {
  const auto n = static_cast<Eigen::Index>(data.size());
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double l = data[i].alice_nm;
    a(i, 0) = (l - vertex_nm) * (l - vertex_nm) / (l - pump_nm);
    a(i, 1) = 1.0;
    y(i) = data[i].phase_rad;
  }
  const Eigen::Vector2d x = a.colPivHouseholderQr().solve(y);
  return {x(0), x(1), (a * x - y).squaredNorm()};
}

}  // namespace

PhaseFit fit_phase_model(std::span<const PhaseSample> data, double pump_nm) {
  std::vector<double> wavelengths;
  for (const auto& s : data) {
    if (!(s.alice_nm > pump_nm))
      throw FitError(fmt::format("sample at {} nm is not above the pump ({} nm)", s.alice_nm, pump_nm));
    if (!std::isfinite(s.phase_rad)) throw FitError("non-finite phase sample");
    wavelengths.push_back(s.alice_nm);
  }
  std::sort(wavelengths.begin(), wavelengths.end());
  const auto distinct = std::unique(wavelengths.begin(), wavelengths.end()) - wavelengths.begin();
  if (distinct < 3) throw FitError(fmt::format("need at least 3 distinct wavelengths, got {}", distinct));

  const double lo = wavelengths.front();
  const double hi = wavelengths[static_cast<std::size_t>(distinct) - 1];
  const auto n = static_cast<double>(data.size());

  double mean = 0.0;
  for (const auto& s : data) mean += s.phase_rad;
  mean /= n;
  double spread = 0.0;
  for (const auto& s : data) spread = std::max(spread, std::abs(s.phase_rad - mean));
  if (spread == 0.0) return {0.0, 0.5 * (lo + hi), mean, 0.0};

  // Variable projection: for fixed λ_v the model is linear in (k, c). Coarse
  // scan of λ_v, then Gauss-Newton on all three parameters.
  const double span = hi - lo;
  const double scan_lo = std::max(lo - span, pump_nm + 1e-6 * span);
  const double scan_hi = hi + span;
  constexpr int kScan = 4000;
  double vertex = scan_lo;
  double best_sse = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kScan; ++i) {
    const double v = scan_lo + (scan_hi - scan_lo) * i / kScan;
    const double sse = fit_linear(data, pump_nm, v).sse;
    if (sse < best_sse) {
      best_sse = sse;
      vertex = v;
    }
  }
  LinearFit lin = fit_linear(data, pump_nm, vertex);
  Eigen::Vector3d p(lin.k, vertex, lin.c);

  const auto rows = static_cast<Eigen::Index>(data.size());
  auto residuals = [&](const Eigen::Vector3d& q) {
    Eigen::VectorXd r(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double l = data[i].alice_nm;
      r(i) = q(0) * (l - q(1)) * (l - q(1)) / (l - pump_nm) + q(2) - data[i].phase_rad;
    }
    return r;
  };

  double sse = residuals(p).squaredNorm();
  for (int iter = 0; iter < 100; ++iter) {
    Eigen::MatrixXd jac(rows, 3);
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double l = data[i].alice_nm;
      jac(i, 0) = (l - p(1)) * (l - p(1)) / (l - pump_nm);
      jac(i, 1) = -2.0 * p(0) * (l - p(1)) / (l - pump_nm);
      jac(i, 2) = 1.0;
    }
    const auto qr = jac.colPivHouseholderQr();
    if (qr.rank() < 3) throw FitError("rank-deficient design: data do not determine curvature and vertex");
    const Eigen::Vector3d step = qr.solve(-residuals(p));

    // Halve the step until the residual does not grow.
    double scale = 1.0;
    Eigen::Vector3d trial = p + step;
    double trial_sse = residuals(trial).squaredNorm();
    while (trial_sse > sse && scale > 1e-6) {
      scale *= 0.5;
      trial = p + scale * step;
      trial_sse = residuals(trial).squaredNorm();
    }
    if (trial_sse > sse) break;
    const bool converged = std::abs(sse - trial_sse) <= 1e-30 + 1e-14 * sse &&
                           step.cwiseAbs().maxCoeff() * scale <= 1e-12 * (1.0 + p.cwiseAbs().maxCoeff());
    p = trial;
    sse = trial_sse;
    if (converged) break;
  }
  return {p(0), p(1), p(2), std::sqrt(sse / n)};
}

}  // namespace franson
