#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "ribbon/error.hpp"
#include "ribbon/svm.hpp"

using namespace ribbon;
using svm::FeatureMatrix;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::InvalidInput;
}

double accuracy(const svm::MulticlassSvm& m, const svm::LabeledData& d) {
  int hits = 0;
  for (std::size_t i = 0; i < d.x.size(); ++i) hits += svm::predict(m, d.x[i]) == d.labels[i];
  return static_cast<double>(hits) / static_cast<double>(d.x.size());
}

}  // namespace

TEST_SUITE("svm") {
  TEST_CASE("standardizer uses the population deviation") {
    const auto s = svm::fit_standardizer({{0, 0}, {2, 2}});
    CHECK(s.mean == std::vector<double>{1, 1});
    CHECK(s.std == std::vector<double>{1, 1});

    const auto c = svm::fit_standardizer({{3, 1}, {3, 2}, {3, 4}});
    CHECK(c.std[0] == svm::kStdFloor);
    for (const auto& row : c.transform(FeatureMatrix{{3, 1}, {3, 2}})) CHECK(row[0] == 0.0);

    const auto r = svm::fit_standardizer({{0.3, -1}, {2, 5}, {7, 0.25}});
    const std::vector<double> x{1.7, -3.3};
    const auto back = r.inverse_transform(r.transform(x));
    CHECK(std::abs(back[0] - x[0]) < 1e-9);
    CHECK(std::abs(back[1] - x[1]) < 1e-9);
  }

  TEST_CASE("rbf kernel") {
    const std::vector<double> a{0, 0}, b{2, 0};
    CHECK(svm::rbf_kernel(a, a, 0.5) == 1.0);
    CHECK(svm::rbf_kernel(a, b, 0.5) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
    CHECK(svm::rbf_kernel(a, b, 0.5) == doctest::Approx(0.135335).epsilon(1e-6));
    double prev = 1.0;
    for (double d = 0.5; d < 50.0; d *= 2.0) {
      const std::vector<double> far{d, 0};
      const double k = svm::rbf_kernel(a, far, 0.5);
      CHECK(k < prev);
      prev = k;
    }
    CHECK(prev < 1e-100);
    const std::vector<double> three{0, 0, 0};
    CHECK(kind_of([&] { svm::rbf_kernel(a, three, 0.5); }) == ErrorKind::DimensionMismatch);
  }

  TEST_CASE("two points: perpendicular bisector") {
    const FeatureMatrix x{{-1.0, 0.5}, {1.0, 1.5}};
    const std::vector<int> y{-1, 1};
    for (double gamma : {0.1, 0.5, 2.0}) {
      const auto m = svm::train_binary(x, y, {gamma, 1.0});
      CHECK(m.support_vectors.size() == 2);
      const std::vector<double> mid{0.0, 1.0};
      CHECK(std::abs(m.decision(mid, gamma)) < 1e-6);
      // Any point on the bisector.
      const std::vector<double> on{0.5, 0.0};
      CHECK(std::abs(m.decision(on, gamma)) < 1e-6);
      CHECK(m.decision(x[1], gamma) > 0.0);
      CHECK(m.decision(x[0], gamma) < 0.0);
    }
  }

  TEST_CASE("RBF separates XOR") {
    const FeatureMatrix x{{1, 1}, {-1, -1}, {1, -1}, {-1, 1}};
    const std::vector<int> y{1, 1, -1, -1};
    const auto m = svm::train_binary(x, y, {1.0, 10.0});
    for (std::size_t i = 0; i < 4; ++i) CHECK((m.decision(x[i], 1.0) > 0.0) == (y[i] > 0));
  }

  TEST_CASE("dual objective agrees with a projected-gradient QP") {
    const auto p = fixture::random_binary(20240611, 20);
    const auto kernel = svm::kernel_matrix(p.x, 0.5);
    svm::SolverOptions tight;
    tight.tol = 1e-6;
    const auto d = svm::solve_dual(kernel, p.y, 1.0, tight);
    const auto q = oracle::svm_dual_projected_gradient(kernel, p.y, 1.0);
    CHECK(d.converged);
    CHECK(std::abs(d.objective - q.objective) <= 1e-6);
    CHECK(d.objective == doctest::Approx(svm::dual_objective(kernel, p.y, d.alpha)).epsilon(1e-12));
    // Frozen optimum of this problem, confirmed with an interior-point QP.
    CHECK(q.objective == doctest::Approx(6.6455202755404938).epsilon(1e-9));
    // The default stopping tolerance lands within a few 1e-6.
    const auto loose = svm::solve_dual(kernel, p.y, 1.0);
    CHECK(std::abs(loose.objective - q.objective) <= 1e-5);
  }

  TEST_CASE("KKT conditions hold after training") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto p = fixture::random_binary(seed, 24, 1.2);
      const auto kernel = svm::kernel_matrix(p.x, 0.5);
      const auto d = svm::solve_dual(kernel, p.y, 1.0);
      const auto kkt = svm::check_kkt(kernel, p.y, 1.0, d);
      CHECK(kkt.ok(1e-3));
      CHECK(kkt.equality_residual <= 1e-2);
      for (double a : d.alpha) {
        CHECK(a >= 0.0);
        CHECK(a <= 1.0);
      }
    }
  }

  TEST_CASE("binary training preconditions") {
    const FeatureMatrix x{{0, 0}, {1, 1}};
    const std::vector<int> same{1, 1};
    CHECK(kind_of([&] { svm::train_binary(x, same, {}); }) == ErrorKind::DegenerateLabels);
    const std::vector<int> bad{1, 2};
    CHECK(kind_of([&] { svm::train_binary(x, bad, {}); }) == ErrorKind::InvalidInput);
    const FeatureMatrix nan{{0, NAN}, {1, 1}};
    const std::vector<int> y{-1, 1};
    CHECK(kind_of([&] { svm::train_binary(nan, y, {}); }) == ErrorKind::InvalidInput);
  }

  TEST_CASE("eight classes of three samples") {
    const auto d = fixture::anchor_clusters(3, 3, 0.005);
    const auto m = svm::train_multiclass(d);
    CHECK(m.params.gamma == 0.5);
    CHECK(m.params.c == 1.0);
    CHECK(m.classes == std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8});
    REQUIRE(m.machines.size() == 28);
    const auto pairs = svm::pair_order(m.classes);
    CHECK(pairs.front() == std::pair{1, 2});
    CHECK(pairs[1] == std::pair{1, 3});
    CHECK(pairs.back() == std::pair{7, 8});
    for (std::size_t k = 0; k < 28; ++k) {
      CHECK(m.machines[k].neg == pairs[k].first);
      CHECK(m.machines[k].pos == pairs[k].second);
      CHECK(m.machines[k].support_vectors.size() >= 2);
      CHECK(m.machines[k].support_vectors.size() <= 6);
    }
    CHECK(accuracy(m, d) == 1.0);
  }

  TEST_CASE("two classes reduce to one binary machine") {
    const auto p = fixture::random_binary(9, 30, 0.8);
    svm::LabeledData d{p.x, {}};
    for (int v : p.y) d.labels.push_back(v > 0 ? 5 : 2);
    const auto m = svm::train_multiclass(d);
    REQUIRE(m.machines.size() == 1);
    const auto z = m.standardizer.transform(p.x);
    const auto b = svm::train_binary(z, p.y, m.params);
    for (double gx = -3; gx <= 3; gx += 0.25) {
      for (double gy = -3; gy <= 3; gy += 0.25) {
        const std::vector<double> q{gx, gy};
        const double v = b.decision(m.standardizer.transform(q), m.params.gamma);
        CHECK(svm::predict(m, q) == (v > 0.0 ? 5 : 2));
        CHECK(svm::decision_values(m, q)[0] == doctest::Approx(v).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("well separated clusters are learned exactly") {
    const auto d = fixture::anchor_clusters(17, 10, 0.01);
    const auto m = svm::train_multiclass(d);
    CHECK(accuracy(m, d) == 1.0);

    // Consistent rescaling of inputs and training data leaves labels unchanged.
    svm::LabeledData scaled = d;
    for (auto& row : scaled.x) {
      row[0] *= 40.0;
      row[1] *= 0.02;
    }
    const auto ms = svm::train_multiclass(scaled);
    for (double gx = 0.1; gx <= 1.1; gx += 0.05) {
      for (double gy = 0.25; gy <= 1.1; gy += 0.05) {
        const std::vector<double> q{gx, gy}, qs{gx * 40.0, gy * 0.02};
        CHECK(svm::predict(m, q) == svm::predict(ms, qs));
      }
    }
  }

  TEST_CASE("decision values are continuous") {
    const auto d = fixture::anchor_clusters(5, 3, 0.01);
    const auto m = svm::train_multiclass(d);
    for (double gx = 0.2; gx <= 1.0; gx += 0.1) {
      const std::vector<double> q{gx, 0.7}, qe{gx + 1e-9, 0.7 - 1e-9};
      const auto a = svm::decision_values(m, q);
      const auto b = svm::decision_values(m, qe);
      for (std::size_t k = 0; k < a.size(); ++k) CHECK(std::abs(a[k] - b[k]) < 1e-6);
    }
  }

  TEST_CASE("vote ties resolve by margin, then by label") {
    svm::MulticlassSvm m;
    m.classes = {1, 2, 3};
    m.standardizer.mean = {0.0, 0.0};
    m.standardizer.std = {1.0, 1.0};
    auto machine = [](int neg, int pos, double bias) {
      svm::BinarySvm b;
      b.neg = neg;
      b.pos = pos;
      b.bias = bias;
      return b;
    };
    const std::vector<double> x{0.0, 0.0};
    m.machines = {machine(1, 2, -0.5), machine(1, 3, 0.2), machine(2, 3, -0.9)};
    auto p = svm::predict_detailed(m, x);
    CHECK(p.votes == 1);
    CHECK(p.label == 2);
    CHECK(p.vote_margin == doctest::Approx(0.9));
    m.machines = {machine(1, 2, -0.5), machine(1, 3, 0.5), machine(2, 3, -0.5)};
    CHECK(svm::predict(m, x) == 1);
    m.machines = {machine(1, 2, 0.5), machine(1, 3, -0.5), machine(2, 3, 0.5)};
    CHECK(svm::predict(m, x) == 1);
  }

  TEST_CASE("multiclass preconditions") {
    svm::LabeledData one{{{0, 0}, {1, 1}}, {3, 3}};
    CHECK(kind_of([&] { svm::train_multiclass(one); }) == ErrorKind::DegenerateLabels);
    svm::LabeledData ragged{{{0, 0}, {1}}, {1, 2}};
    CHECK(kind_of([&] { svm::train_multiclass(ragged); }) == ErrorKind::DimensionMismatch);
    const auto m = svm::train_multiclass(fixture::anchor_clusters(1, 3, 0.01));
    const std::vector<double> three{1, 2, 3};
    CHECK(kind_of([&] { svm::predict(m, three); }) == ErrorKind::DimensionMismatch);
  }
}
