#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace ribbon::svm {

using FeatureVector = std::vector<double>;
using FeatureMatrix = std::vector<FeatureVector>;

/// Per-feature centring and scaling with the population standard deviation.
struct FeatureStandardizer {
  std::vector<double> mean;
  std::vector<double> std;

  std::size_t dimension() const noexcept { return mean.size(); }
  FeatureVector transform(std::span<const double> x) const;
  FeatureVector inverse_transform(std::span<const double> z) const;
  FeatureMatrix transform(const FeatureMatrix& rows) const;
};

inline constexpr double kStdFloor = 1e-9;

/// Needs >= 2 rows of equal width. Constant columns get std = kStdFloor.
FeatureStandardizer fit_standardizer(const FeatureMatrix& x);

/// exp(-gamma * |a - b|^2). Throws DimensionMismatch on unequal lengths.
double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma);

struct KernelParams {
  double gamma = 0.5;
  double c = 1.0;
};

struct SolverOptions {
  double tol = 1e-3;
  /// Consecutive non-improving pair updates tolerated before giving up.
  int max_passes = 200;
  std::size_t max_iterations = 10'000'000;
};

/// Dual solution of min 1/2 a'Qa - e'a, 0 <= a <= C, y'a = 0 with
/// Q_ij = y_i y_j K_ij. Decision function: sum_j a_j y_j K(x_j, x) - rho.
struct DualSolution {
  std::vector<double> alpha;
  double rho = 0.0;
  /// Dual objective in maximization form: sum(a) - 1/2 a'Qa.
  double objective = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// SMO with maximal-violating-pair selection over a dense kernel matrix
/// (row-major, n x n). Labels must be +1/-1.
DualSolution solve_dual(std::span<const double> kernel, std::span<const int> y, double c,
                        const SolverOptions& options = {});

/// sum(a) - 1/2 a'Qa for any alpha.
double dual_objective(std::span<const double> kernel, std::span<const int> y,
                      std::span<const double> alpha);

std::vector<double> kernel_matrix(const FeatureMatrix& x, double gamma);

/// One soft-margin machine separating `neg` (y = -1) from `pos` (y = +1) in
/// standardized feature space.
struct BinarySvm {
  FeatureMatrix support_vectors;
  std::vector<double> dual_coefs;  // alpha_i * y_i
  double bias = 0.0;
  int neg = -1;
  int pos = 1;

  /// Signed margin; positive favours `pos`.
  double decision(std::span<const double> z, double gamma) const;
};

inline constexpr double kPruneAlpha = 1e-8;

struct BinaryTraining {
  BinarySvm machine;
  DualSolution dual;
};

/// Throws DegenerateLabels when only one label is present and InvalidInput on
/// non-finite rows or labels other than +1/-1.
BinaryTraining train_binary_detailed(const FeatureMatrix& x, std::span<const int> y,
                                     const KernelParams& params, const SolverOptions& options = {});
BinarySvm train_binary(const FeatureMatrix& x, std::span<const int> y, const KernelParams& params,
                       const SolverOptions& options = {});

struct KktReport {
  double max_violation = 0.0;
  /// |sum a_i y_i|
  double equality_residual = 0.0;
  bool ok(double tol) const noexcept { return max_violation <= tol; }
};

/// Margin conditions per training point: y f >= 1 at a = 0, y f = 1 for free
/// a, y f <= 1 at a = C.
KktReport check_kkt(std::span<const double> kernel, std::span<const int> y, double c,
                    const DualSolution& dual);

struct LabeledData {
  FeatureMatrix x;
  std::vector<int> labels;
};

/// One-vs-one ensemble over sorted class labels. Machine order is
/// (c0,c1), (c0,c2), ..., (c_{k-2},c_{k-1}).
struct MulticlassSvm {
  std::vector<int> classes;
  FeatureStandardizer standardizer;
  KernelParams params;
  std::vector<BinarySvm> machines;
  /// Raw training rows, kept for map overlays and default map bounds.
  LabeledData training;
  /// Dense raw-feature trajectories the training rows were taken from.
  FeatureMatrix manifold;

  std::size_t dimension() const noexcept { return standardizer.dimension(); }
};

/// gamma defaults to 1 / n_features.
struct TrainOptions {
  std::optional<double> gamma;
  double c = 1.0;
  SolverOptions solver;
};

MulticlassSvm train_multiclass(const LabeledData& data, const TrainOptions& options = {});

struct Prediction {
  int label = 0;
  int votes = 0;
  /// Sum of |decision value| over the machines that voted for `label`.
  double vote_margin = 0.0;
};

/// Majority vote; ties go to the larger vote margin, then the lower label.
Prediction predict_detailed(const MulticlassSvm& model, std::span<const double> x);
int predict(const MulticlassSvm& model, std::span<const double> x);

/// Margins of every machine, in machine order.
std::vector<double> decision_values(const MulticlassSvm& model, std::span<const double> x);

/// Class pairs in machine order.
std::vector<std::pair<int, int>> pair_order(std::span<const int> classes);

}  // namespace ribbon::svm
