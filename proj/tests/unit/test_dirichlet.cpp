#include <doctest.h>

#include "harnacklab/dirichlet.hpp"
#include "harnacklab/errors.hpp"
#include "harnacklab/metric.hpp"
#include "harnacklab/potential.hpp"
#include "unit/support.hpp"

using namespace hlab;
using testing::grid;
using testing::range;

namespace {

std::vector<Vertex> lattice_interior(std::size_t n) {
  std::vector<Vertex> D;
  for (std::size_t i = 1; i + 1 < n; ++i)
    for (std::size_t j = 1; j + 1 < n; ++j) D.push_back(grid(n, i, j));
  return D;
}

}  // namespace

TEST_CASE("dirichlet problem on a path") {
  const auto g = make_path(5);
  const std::vector<Vertex> D{1, 2, 3};
  const DomainProblem dp(g, D);
  REQUIRE(dp.boundary().size() == 2);
  const std::vector<double> data{1.0, 0.0};
  const auto sol = solve_dirichlet(dp, data);
  CHECK(sol.values[1] == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(sol.values[2] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(sol.values[3] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(sol.residual <= 1e-10);

  const std::vector<double> c{2.5, 2.5};
  for (Vertex v : D) CHECK(solve_dirichlet(dp, c).values[v] == doctest::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("dirichlet problem against the dense oracle") {
  const auto g = make_lattice2d(5);
  const auto D = lattice_interior(5);
  const DomainProblem dp(g, D);
  const std::vector<Vertex> bd(dp.boundary().begin(), dp.boundary().end());
  const Eigen::MatrixXd K = oracle::harmonic_measure(g, D, bd);
  const Vertex corner_adjacent = grid(5, 0, 1);
  const auto b = static_cast<Eigen::Index>(dp.boundary_index(corner_adjacent));
  REQUIRE(b >= 0);
  std::vector<double> data(bd.size(), 0.0);
  data[static_cast<std::size_t>(b)] = 1.0;
  const auto sol = solve_dirichlet(dp, data);
  for (std::size_t i = 0; i < D.size(); ++i)
    CHECK(oracle::rel_err(sol.values[D[i]], K(static_cast<Eigen::Index>(i), b)) <= 1e-10);
}

TEST_CASE("maximum principle for harmonic extensions") {
  std::mt19937_64 rng(3);
  for (std::uint64_t s = 1; s <= 10; ++s) {
    const auto g = oracle::random_graph(60, 0.5, s);
    const auto D = testing::random_region(g, 0, 35, rng);
    const DomainProblem dp(g, D);
    const auto data = testing::random_vector(dp.boundary().size(), rng, -2.0, 3.0);
    const auto sol = solve_dirichlet(dp, data);
    const double lo = *std::min_element(data.begin(), data.end());
    const double hi = *std::max_element(data.begin(), data.end());
    for (Vertex v : D) {
      CHECK(sol.values[v] >= lo - 1e-12);
      CHECK(sol.values[v] <= hi + 1e-12);
    }
  }
}

TEST_CASE("green function on a path") {
  const auto g = make_path(5);
  const std::vector<Vertex> D{1, 2, 3};
  const DomainProblem dp(g, D);
  const Eigen::MatrixXd G = greens_function(dp);
  CHECK(G(1, 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(G(0, 2) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(G(0, 0) == doctest::Approx(0.75).epsilon(1e-14));
  for (Vertex x : D) {
    const std::vector<Vertex> A{x};
    CHECK(capacity(g, A, D).capacity * G(dp.local_index(x), dp.local_index(x)) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("green function invariants") {
  std::mt19937_64 rng(11);
  for (std::uint64_t s = 1; s <= 8; ++s) {
    const auto g = oracle::random_graph(120, 0.6, s);
    const auto D = testing::random_region(g, s, 80, rng);
    const DomainProblem dp(g, D);
    const Eigen::MatrixXd G = greens_function(dp);
    const Eigen::MatrixXd ref = oracle::green(g, D);
    CHECK(oracle::rel_err(G, ref) <= 1e-10);
    const double scale = G.cwiseAbs().maxCoeff();
    CHECK((G - G.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale);
    CHECK(G.minCoeff() > 0.0);
    for (Vertex x : {D.front(), D[D.size() / 2], D.back()}) {
      const Eigen::VectorXd col = green_column(dp, x);
      CHECK(green_column_residual(dp, x, col) <= 1e-10);
      const Eigen::VectorXd r = dp.laplacian() * col - Eigen::VectorXd::Unit(static_cast<Eigen::Index>(D.size()), dp.local_index(x));
      CHECK(r.cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
}

TEST_CASE("green maximum principle on balls") {
  const MetricGraph mg(make_lattice2d(13));
  const auto& g = mg.graph();
  const Vertex x0 = grid(13, 6, 6);
  const auto D = mg.ball(x0, 6);
  const DomainProblem dp(g, D);
  const Eigen::VectorXd col = green_column(dp, x0);
  for (double r : {2.0, 3.0, 4.0}) {
    const auto U = mg.ball(x0, r);
    const auto bd = inner_boundary(g, U);
    double min_u = 1e300, min_bd = 1e300, max_out = 0.0, max_bd = 0.0;
    for (Vertex v : U)
      if (v != x0) min_u = std::min(min_u, col(dp.local_index(v)));
    for (Vertex v : bd) {
      min_bd = std::min(min_bd, col(dp.local_index(v)));
      max_bd = std::max(max_bd, col(dp.local_index(v)));
    }
    for (Vertex v : set_difference(D, U)) max_out = std::max(max_out, col(dp.local_index(v)));
    CHECK(min_u == doctest::Approx(min_bd).epsilon(1e-14));
    CHECK(max_out <= max_bd + 1e-14);
  }
}

TEST_CASE("harmonic measure") {
  const auto g = make_path(5);
  const std::vector<Vertex> D{1, 2, 3};
  const DomainProblem dp(g, D);
  const Eigen::MatrixXd K = harmonic_measure(dp);
  CHECK(K(0, dp.boundary_index(0)) == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(K(0, dp.boundary_index(4)) == doctest::Approx(0.25).epsilon(1e-14));

  const auto star = make_star(5);
  const std::vector<Vertex> center{0};
  const Eigen::MatrixXd S = harmonic_measure(DomainProblem(star, center));
  for (Eigen::Index b = 0; b < S.cols(); ++b) CHECK(S(0, b) == doctest::Approx(0.2).epsilon(1e-14));

  const auto lat = make_lattice2d(5);
  const auto interior = lattice_interior(5);
  const DomainProblem ldp(lat, interior);
  const std::vector<Vertex> bd(ldp.boundary().begin(), ldp.boundary().end());
  CHECK(oracle::rel_err(harmonic_measure(ldp), oracle::harmonic_measure(lat, interior, bd)) <= 1e-10);
}

TEST_CASE("harmonic measure rows are probability vectors") {
  std::mt19937_64 rng(5);
  for (std::uint64_t s = 1; s <= 6; ++s) {
    const auto g = oracle::random_graph(90, 0.4, s);
    const auto D = testing::random_region(g, 2, 50, rng);
    const Eigen::MatrixXd K = harmonic_measure(DomainProblem(g, D));
    CHECK(K.minCoeff() >= -1e-15);
    for (Eigen::Index i = 0; i < K.rows(); ++i) CHECK(std::abs(K.row(i).sum() - 1.0) <= 1e-12);
  }
}

TEST_CASE("domain errors") {
  const auto g = make_path(4);
  CHECK_THROWS_AS(DomainProblem(g, range(0, 3)), TopologyError);
  CHECK_THROWS_AS(DomainProblem(g, std::vector<Vertex>{}), ParameterError);
  const DomainProblem dp(g, std::vector<Vertex>{1});
  CHECK_THROWS_AS(green_column(dp, 3), ContainmentError);
  CHECK_THROWS_AS(solve_dirichlet(dp, std::vector<double>{1.0}), ParameterError);
}

TEST_CASE("two components are solved blockwise") {
  const auto g = make_path(7);
  const std::vector<Vertex> D{1, 2, 4, 5};
  const Eigen::MatrixXd G = greens_function(DomainProblem(g, D));
  CHECK(G(0, 2) == 0.0);
  CHECK(oracle::rel_err(G, oracle::green(g, D)) <= 1e-12);
}

TEST_CASE("smallest dirichlet eigenvalue") {
  const auto p3 = make_path(3);
  const std::vector<Vertex> mid{1};
  CHECK(lambda_min(DomainProblem(p3, mid), counting_measure(p3)) == doctest::Approx(2.0).epsilon(1e-12));

  const auto p5 = make_path(5);
  const DomainProblem dp(p5, range(1, 3));
  const double l = lambda_min(dp, counting_measure(p5));
  CHECK(l == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-12));
  VertexMeasure m3(5, 3.0);
  CHECK(lambda_min(dp, m3) == doctest::Approx(l / 3.0).epsilon(1e-12));
}

TEST_CASE("energy and energy measure") {
  const WeightedGraph edge(2, {{0, 1, 1.0, 1.0}});
  const std::vector<double> ind{1.0, 0.0};
  CHECK(energy(edge, ind) == 1.0);
  CHECK(gamma_density(edge, ind) == std::vector<double>{0.5, 0.5});

  const auto lat = make_lattice2d(4);
  const std::vector<double> c(lat.size(), 3.0);
  CHECK(energy(lat, c) == 0.0);
  for (double x : gamma_density(lat, c)) CHECK(x == 0.0);

  std::mt19937_64 rng(17);
  const auto f = testing::random_vector(lat.size(), rng);
  const auto gam = gamma_density(lat, f);
  double total = 0.0;
  for (double x : gam) total += x;
  CHECK(total == doctest::Approx(energy(lat, f)).epsilon(1e-13));
  CHECK(energy(lat, f) >= 0.0);
  for (int t = 0; t < 20; ++t) {
    const auto h = testing::random_vector(lat.size(), rng);
    std::vector<double> fh(f.size()), f2(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
      fh[i] = f[i] * h[i];
      f2[i] = f[i] * f[i];
    }
    // With E = sum of gamma the edge-wise Leibniz rule carries a factor 2:
    // 2E(f,fh) - E(f^2,h) = sum_e w_e (f(u)-f(v))^2 (h(u)+h(v)) = 2 sum h gamma_f.
    double lhs = energy(lat, f, fh) - 0.5 * energy(lat, f2, h);
    double rhs = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) rhs += h[i] * gam[i];
    CHECK(std::abs(lhs - rhs) <= 1e-10);
  }
}

TEST_CASE("energy measure identity on random pairs") {
  std::mt19937_64 rng(23);
  const auto g = oracle::random_graph(50, 0.8, 9);
  for (int t = 0; t < 100; ++t) {
    const auto f = testing::random_vector(g.size(), rng);
    const auto h = testing::random_vector(g.size(), rng);
    const auto gam = gamma_density(g, f);
    std::vector<double> fh(f.size()), f2(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
      fh[i] = f[i] * h[i];
      f2[i] = f[i] * f[i];
    }
    double rhs = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) rhs += h[i] * gam[i];
    CHECK(std::abs(2.0 * energy(g, f, fh) - energy(g, f2, h) - 2.0 * rhs) <= 1e-10);
  }
}
