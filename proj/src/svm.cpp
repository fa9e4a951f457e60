#include "ribbon/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "ribbon/error.hpp"

namespace ribbon::svm {

namespace {

void check_dim(std::size_t got, std::size_t want) {
  if (got != want) {
    fail(ErrorKind::DimensionMismatch,
         "expected " + std::to_string(want) + " features, got " + std::to_string(got));
  }
}

}  // namespace

FeatureVector FeatureStandardizer::transform(std::span<const double> x) const {
  check_dim(x.size(), mean.size());
  FeatureVector z(x.size());
  for (std::size_t d = 0; d < x.size(); ++d) z[d] = (x[d] - mean[d]) / std[d];
  return z;
}

FeatureVector FeatureStandardizer::inverse_transform(std::span<const double> z) const {
  check_dim(z.size(), mean.size());
  FeatureVector x(z.size());
  for (std::size_t d = 0; d < z.size(); ++d) x[d] = z[d] * std[d] + mean[d];
  return x;
}

FeatureMatrix FeatureStandardizer::transform(const FeatureMatrix& rows) const {
  FeatureMatrix out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(transform(r));
  return out;
}

FeatureStandardizer fit_standardizer(const FeatureMatrix& x) {
  if (x.size() < 2) fail(ErrorKind::InvalidInput, "standardizer needs at least 2 rows");
  const std::size_t dim = x.front().size();
  if (dim == 0) fail(ErrorKind::InvalidInput, "standardizer needs at least 1 feature");
  FeatureStandardizer s;
  s.mean.assign(dim, 0.0);
  s.std.assign(dim, 0.0);
  for (const auto& r : x) {
    check_dim(r.size(), dim);
    for (std::size_t d = 0; d < dim; ++d) s.mean[d] += r[d];
  }
  const double n = static_cast<double>(x.size());
  for (double& m : s.mean) m /= n;
  for (const auto& r : x) {
    for (std::size_t d = 0; d < dim; ++d) s.std[d] += (r[d] - s.mean[d]) * (r[d] - s.mean[d]);
  }
  for (double& v : s.std) v = std::max(std::sqrt(v / n), kStdFloor);
  return s;
}

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma) {
  check_dim(b.size(), a.size());
  double d2 = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    const double diff = a[d] - b[d];
    d2 += diff * diff;
  }
  return std::exp(-gamma * d2);
}

std::vector<double> kernel_matrix(const FeatureMatrix& x, double gamma) {
  const std::size_t n = x.size();
  std::vector<double> k(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    k[i * n + i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = rbf_kernel(x[i], x[j], gamma);
      k[i * n + j] = v;
      k[j * n + i] = v;
    }
  }
  return k;
}

double dual_objective(std::span<const double> kernel, std::span<const int> y,
                      std::span<const double> alpha) {
  const std::size_t n = y.size();
  double linear = 0.0;
  double quad = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    linear += alpha[i];
    if (alpha[i] == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      quad += alpha[i] * alpha[j] * y[i] * y[j] * kernel[i * n + j];
    }
  }
  return linear - 0.5 * quad;
}

DualSolution solve_dual(std::span<const double> kernel, std::span<const int> y, double c,
                        const SolverOptions& options) {
  const std::size_t n = y.size();
  if (kernel.size() != n * n) fail(ErrorKind::DimensionMismatch, "kernel matrix size mismatch");
  if (!(c > 0.0)) fail(ErrorKind::InvalidInput, "C must be > 0");
  constexpr double tau = 1e-12;

  auto q = [&](std::size_t i, std::size_t j) { return y[i] * y[j] * kernel[i * n + j]; };

  DualSolution sol;
  sol.alpha.assign(n, 0.0);
  std::vector<double> grad(n, -1.0);
  auto& a = sol.alpha;

  auto in_up = [&](std::size_t t) { return (y[t] == 1 && a[t] < c) || (y[t] == -1 && a[t] > 0.0); };
  auto in_low = [&](std::size_t t) { return (y[t] == -1 && a[t] < c) || (y[t] == 1 && a[t] > 0.0); };

  int stalled = 0;
  while (sol.iterations < options.max_iterations) {
    double gmax = -std::numeric_limits<double>::infinity();
    double gmin = std::numeric_limits<double>::infinity();
    std::size_t i = n;
    std::size_t j = n;
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -y[t] * grad[t];
      if (in_up(t) && v > gmax) {
        gmax = v;
        i = t;
      }
      if (in_low(t) && v < gmin) {
        gmin = v;
        j = t;
      }
    }
    if (i == n || j == n || gmax - gmin < options.tol) {
      sol.converged = true;
      break;
    }
    ++sol.iterations;

    const double old_i = a[i];
    const double old_j = a[j];
    const double kii = kernel[i * n + i];
    const double kjj = kernel[j * n + j];
    if (y[i] != y[j]) {
      double quad = kii + kjj + 2.0 * q(i, j);
      if (quad <= 0.0) quad = tau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = a[i] - a[j];
      a[i] += delta;
      a[j] += delta;
      if (diff > 0.0) {
        if (a[j] < 0.0) {
          a[j] = 0.0;
          a[i] = diff;
        }
      } else if (a[i] < 0.0) {
        a[i] = 0.0;
        a[j] = -diff;
      }
      if (diff > 0.0) {
        if (a[i] > c) {
          a[i] = c;
          a[j] = c - diff;
        }
      } else if (a[j] > c) {
        a[j] = c;
        a[i] = c + diff;
      }
    } else {
      double quad = kii + kjj - 2.0 * q(i, j);
      if (quad <= 0.0) quad = tau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = a[i] + a[j];
      a[i] -= delta;
      a[j] += delta;
      if (sum > c) {
        if (a[i] > c) {
          a[i] = c;
          a[j] = sum - c;
        }
        if (a[j] > c) {
          a[j] = c;
          a[i] = sum - c;
        }
      } else {
        if (a[j] < 0.0) {
          a[j] = 0.0;
          a[i] = sum;
        }
        if (a[i] < 0.0) {
          a[i] = 0.0;
          a[j] = sum;
        }
      }
    }

    const double di = a[i] - old_i;
    const double dj = a[j] - old_j;
    for (std::size_t t = 0; t < n; ++t) grad[t] += q(i, t) * di + q(j, t) * dj;

    if (std::abs(di) + std::abs(dj) < 1e-15) {
      if (++stalled >= options.max_passes) break;
    } else {
      stalled = 0;
    }
  }

  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double free_sum = 0.0;
  std::size_t free_count = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (a[t] >= c) {
      if (y[t] == -1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (a[t] <= 0.0) {
      if (y[t] == 1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      free_sum += yg;
      ++free_count;
    }
  }
  sol.rho = free_count > 0 ? free_sum / static_cast<double>(free_count) : (ub + lb) / 2.0;

  double f = 0.0;
  for (std::size_t t = 0; t < n; ++t) f += a[t] * (grad[t] - 1.0);
  sol.objective = -0.5 * f;
  return sol;
}

double BinarySvm::decision(std::span<const double> z, double gamma) const {
  double sum = bias;
  for (std::size_t k = 0; k < support_vectors.size(); ++k) {
    sum += dual_coefs[k] * rbf_kernel(support_vectors[k], z, gamma);
  }
  return sum;
}

BinaryTraining train_binary_detailed(const FeatureMatrix& x, std::span<const int> y,
                                     const KernelParams& params, const SolverOptions& options) {
  if (x.size() != y.size()) fail(ErrorKind::DimensionMismatch, "row and label counts differ");
  if (!(params.gamma > 0.0) || !(params.c > 0.0)) {
    fail(ErrorKind::InvalidInput, "gamma and C must be > 0");
  }
  bool has_pos = false;
  bool has_neg = false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (y[i] == 1) has_pos = true;
    else if (y[i] == -1) has_neg = true;
    else fail(ErrorKind::InvalidInput, "binary labels must be +1 or -1");
    check_dim(x[i].size(), x.front().size());
    for (double v : x[i]) {
      if (!std::isfinite(v)) fail(ErrorKind::InvalidInput, "non-finite training feature");
    }
  }
  if (!has_pos || !has_neg) fail(ErrorKind::DegenerateLabels, "both classes must be present");

  const auto kernel = kernel_matrix(x, params.gamma);
  BinaryTraining out;
  out.dual = solve_dual(kernel, y, params.c, options);
  out.machine.bias = -out.dual.rho;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (out.dual.alpha[i] < kPruneAlpha) continue;
    out.machine.support_vectors.push_back(x[i]);
    out.machine.dual_coefs.push_back(out.dual.alpha[i] * y[i]);
  }
  return out;
}

BinarySvm train_binary(const FeatureMatrix& x, std::span<const int> y, const KernelParams& params,
                       const SolverOptions& options) {
  return train_binary_detailed(x, y, params, options).machine;
}

KktReport check_kkt(std::span<const double> kernel, std::span<const int> y, double c,
                    const DualSolution& dual) {
  const std::size_t n = y.size();
  KktReport r;
  double eq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    eq += dual.alpha[i] * y[i];
    double f = -dual.rho;
    for (std::size_t j = 0; j < n; ++j) f += dual.alpha[j] * y[j] * kernel[i * n + j];
    const double margin = y[i] * f;
    double v = 0.0;
    if (dual.alpha[i] <= 0.0) v = std::max(0.0, 1.0 - margin);
    else if (dual.alpha[i] >= c) v = std::max(0.0, margin - 1.0);
    else v = std::abs(margin - 1.0);
    r.max_violation = std::max(r.max_violation, v);
  }
  r.equality_residual = std::abs(eq);
  return r;
}

std::vector<std::pair<int, int>> pair_order(std::span<const int> classes) {
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t a = 0; a < classes.size(); ++a) {
    for (std::size_t b = a + 1; b < classes.size(); ++b) pairs.emplace_back(classes[a], classes[b]);
  }
  return pairs;
}

MulticlassSvm train_multiclass(const LabeledData& data, const TrainOptions& options) {
  if (data.x.size() != data.labels.size()) {
    fail(ErrorKind::DimensionMismatch, "row and label counts differ");
  }
  std::map<int, std::vector<std::size_t>> rows_by_class;
  for (std::size_t i = 0; i < data.labels.size(); ++i) rows_by_class[data.labels[i]].push_back(i);
  if (rows_by_class.size() < 2) fail(ErrorKind::DegenerateLabels, "need at least 2 classes");

  MulticlassSvm model;
  for (const auto& [label, rows] : rows_by_class) model.classes.push_back(label);
  model.standardizer = fit_standardizer(data.x);
  model.params.gamma = options.gamma.value_or(1.0 / static_cast<double>(model.dimension()));
  model.params.c = options.c;
  model.training = data;

  const FeatureMatrix z = model.standardizer.transform(data.x);
  for (const auto& [neg, pos] : pair_order(model.classes)) {
    FeatureMatrix px;
    std::vector<int> py;
    for (std::size_t i : rows_by_class[neg]) {
      px.push_back(z[i]);
      py.push_back(-1);
    }
    for (std::size_t i : rows_by_class[pos]) {
      px.push_back(z[i]);
      py.push_back(1);
    }
    BinarySvm m = train_binary(px, py, model.params, options.solver);
    m.neg = neg;
    m.pos = pos;
    model.machines.push_back(std::move(m));
  }
  return model;
}

std::vector<double> decision_values(const MulticlassSvm& model, std::span<const double> x) {
  const auto z = model.standardizer.transform(x);
  std::vector<double> out;
  out.reserve(model.machines.size());
  for (const auto& m : model.machines) out.push_back(m.decision(z, model.params.gamma));
  return out;
}

Prediction predict_detailed(const MulticlassSvm& model, std::span<const double> x) {
  const auto values = decision_values(model, x);
  std::map<int, std::pair<int, double>> tally;  // label -> (votes, margin)
  for (int c : model.classes) tally[c] = {0, 0.0};
  for (std::size_t k = 0; k < values.size(); ++k) {
    const auto& m = model.machines[k];
    auto& slot = tally[values[k] > 0.0 ? m.pos : m.neg];
    slot.first += 1;
    slot.second += std::abs(values[k]);
  }
  Prediction best{model.classes.front(), -1, -1.0};
  for (const auto& [label, t] : tally) {  // ascending labels: strict > keeps the lowest on ties
    if (t.first > best.votes || (t.first == best.votes && t.second > best.vote_margin)) {
      best = {label, t.first, t.second};
    }
  }
  return best;
}

int predict(const MulticlassSvm& model, std::span<const double> x) {
  return predict_detailed(model, x).label;
}

}  // namespace ribbon::svm
