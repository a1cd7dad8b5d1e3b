#include <doctest.h>

#include "harnacklab/dirichlet.hpp"
#include "harnacklab/dyadic.hpp"
#include "harnacklab/errors.hpp"
#include "harnacklab/harnack.hpp"
#include "harnacklab/inequalities.hpp"
#include "harnacklab/netmaps.hpp"
#include "harnacklab/potential.hpp"
#include "harnacklab/scale.hpp"
#include "unit/support.hpp"

using namespace hlab;
using testing::grid;

namespace {

WeightedGraph scaled(const WeightedGraph& g, double c) {
  std::vector<Edge> edges(g.edges().begin(), g.edges().end());
  for (auto& e : edges) e.weight *= c;
  return WeightedGraph(g.size(), std::move(edges));
}

WeightedGraph random_lattice(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> w(0.5, 2.0);
  const auto base = make_lattice2d(n);
  std::vector<Edge> edges(base.edges().begin(), base.edges().end());
  for (auto& e : edges) e.weight = w(rng);
  return WeightedGraph(n * n, std::move(edges));
}

bool subset(const std::vector<Vertex>& a, const std::vector<Vertex>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

TEST_CASE("green kernels on random graphs") {
  std::mt19937_64 rng(11);
  for (std::uint64_t s = 1; s <= 12; ++s) {
    const std::size_t n = 20 + 10 * s;
    const auto g = oracle::random_graph(n, 0.4, 100 + s);
    const auto D = testing::random_region(g, s % n, n / 2, rng);
    const DomainProblem dp(g, D);
    const Eigen::MatrixXd G = greens_function(dp);
    CHECK(oracle::rel_err(G, oracle::green(g, D)) <= 1e-10);
    CHECK((G - G.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * G.maxCoeff());
    CHECK(G.minCoeff() > 0.0);
    // the diagonal dominates its row and column
    for (Eigen::Index i = 0; i < G.rows(); ++i) CHECK(G.row(i).maxCoeff() <= G(i, i) * (1.0 + 1e-12));

    const Eigen::MatrixXd K = harmonic_measure(dp);
    CHECK(K.minCoeff() >= -1e-14);
    for (Eigen::Index i = 0; i < K.rows(); ++i) CHECK(K.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("capacity identities on random graphs") {
  std::mt19937_64 rng(5);
  for (std::uint64_t s = 1; s <= 10; ++s) {
    const auto g = oracle::random_graph(80, 0.5, 200 + s);
    const auto D = testing::random_region(g, 0, 50, rng);
    std::vector<Vertex> A(D.begin(), D.begin() + 4), A2(D.begin(), D.begin() + 8);
    const auto D2 = testing::random_region(g, 0, 65, rng);
    const auto cap = capacity(g, A, D);
    CHECK(oracle::rel_err(cap.capacity, oracle::capacity_in(g, A, D)) <= 1e-10);
    CHECK(cap.nu_total == doctest::Approx(cap.capacity).epsilon(1e-10));
    for (Vertex v = 0; v < g.size(); ++v) {
      CHECK(cap.h[v] >= -1e-12);
      CHECK(cap.h[v] <= 1.0 + 1e-12);
    }
    // h = sum_a nu(a) g_D(., a)
    const DomainProblem dp(g, D);
    Eigen::VectorXd h = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(D.size()));
    for (Vertex a : A) h += cap.nu[a] * green_column(dp, a);
    for (Vertex v : D) CHECK(h(dp.local_index(v)) == doctest::Approx(cap.h[v]).epsilon(1e-10));

    CHECK(capacity(g, A2, D).capacity >= cap.capacity * (1.0 - 1e-12));
    if (subset(D, D2)) CHECK(capacity(g, A, D2).capacity <= cap.capacity * (1.0 + 1e-12));
  }
}

TEST_CASE("weight scaling") {
  const auto g = oracle::random_graph(60, 0.5, 7);
  const auto g3 = scaled(g, 3.0);
  std::mt19937_64 rng(1);
  const auto D = testing::random_region(g, 0, 40, rng);
  const std::vector<Vertex> A(D.begin(), D.begin() + 3);
  CHECK(capacity(g3, A, D).capacity == doctest::Approx(3.0 * capacity(g, A, D).capacity).epsilon(1e-12));
  const DomainProblem dp(g, D), dp3(g3, D);
  CHECK(oracle::rel_err(3.0 * greens_function(dp3), greens_function(dp)) <= 1e-12);
  const std::vector<Vertex> inner(D.begin(), D.begin() + 10);
  CHECK(harnack_constant_on(g3, inner, D).C_H == doctest::Approx(harnack_constant_on(g, inner, D).C_H).epsilon(1e-10));
  const auto mu = counting_measure(g);
  const auto p = pi_constant_on(g, mu, inner, D, 1.0);
  CHECK(pi_constant_on(g3, mu, inner, D, 1.0).C == doctest::Approx(p.C / 3.0).epsilon(1e-10));
}

TEST_CASE("harnack constants on random graphs") {
  std::mt19937_64 rng(9);
  for (std::uint64_t s = 1; s <= 10; ++s) {
    const auto g = oracle::random_graph(70, 0.6, 300 + s);
    const auto D = testing::random_region(g, 0, 45, rng);
    std::vector<Vertex> inner = testing::random_region(g, 0, 12, rng);
    std::erase_if(inner, [&](Vertex v) { return !std::binary_search(D.begin(), D.end(), v); });
    REQUIRE_FALSE(inner.empty());
    const auto rep = harnack_constant_on(g, inner, D);
    CHECK(rep.C_H >= 1.0);
    CHECK(oracle::rel_err(rep.C_H, oracle::harnack(g, inner, D)) <= 1e-9);
    const DomainProblem dp(g, D);
    for (int t = 0; t < 20; ++t) {
      const auto data = testing::random_vector(dp.boundary().size(), rng, 0.0, 1.0);
      CHECK(harnack_ratio_for_data(g, inner, D, data) <= rep.C_H * (1.0 + 1e-10));
    }
    const std::vector<Vertex> fewer(inner.begin(), inner.begin() + (inner.size() + 1) / 2);
    CHECK(harnack_constant_on(g, fewer, D).C_H <= rep.C_H * (1.0 + 1e-12));
  }
}

TEST_CASE("cube hierarchies on random graphs") {
  for (std::uint64_t s = 1; s <= 6; ++s) {
    const MetricGraph mg(oracle::random_graph(150, 0.1, 400 + s));
    const auto h = build_cube_hierarchy(mg, 0, 4.0);
    const auto chk = check_hierarchy(mg, h);
    CHECK(chk.partition);
    CHECK(chk.nested);
    CHECK(chk.nets_increasing);
    CHECK(chk.nets_separated);
    CHECK(chk.nets_covering);
    CHECK(chk.inner_sandwich);
    CHECK(chk.outer_sandwich);
  }
}

TEST_CASE("net maps on random graphs") {
  for (std::uint64_t s = 1; s <= 5; ++s) {
    const MetricGraph mg(oracle::random_graph(100, 0.2, 500 + s));
    const auto m = counting_measure(mg.graph());
    const auto net = discretize(mg, m, 2.0);
    CHECK(net.partition.sum_error <= 1e-12);
    CHECK(net.partition.support_ok);
    const MetricGraph ng(net.graph);
    const auto phi = nearest_net_map(mg, net);
    const auto w = rough_isometry_check(mg, m, ng, VertexMeasure(net.ball_mass), phi, 2.0);
    CHECK(std::isfinite(w.C2));
    CHECK(std::isfinite(w.C3));
    // every net point is its own nearest point
    for (std::size_t i = 0; i < net.points.size(); ++i) CHECK(phi[net.points[i]] == i);
  }
}

TEST_CASE("chain metrics for random scale functions") {
  for (std::uint64_t s = 1; s <= 4; ++s) {
    const MetricGraph mg(oracle::random_graph(40, 0.3, 600 + s));
    std::mt19937_64 rng(s);
    std::vector<double> a(mg.size());
    for (auto& x : a) x = std::uniform_real_distribution<double>(1.0, 2.0)(rng);
    const double beta = 1.5 + 0.25 * static_cast<double>(s);
    const auto cm = build_chain_metric(mg, [&](Vertex x, double t) { return a[x] * std::pow(t, beta); });
    const Eigen::MatrixXd De = cm.D.array().pow(cm.epsilon).matrix();
    const double top = cm.dpsi.maxCoeff();
    for (Eigen::Index i = 0; i < cm.dpsi.rows(); ++i) {
      CHECK(cm.dpsi(i, i) == 0.0);
      for (Eigen::Index j = 0; j < cm.dpsi.cols(); ++j) {
        if (i == j) continue;
        CHECK(cm.dpsi(i, j) == cm.dpsi(j, i));
        CHECK(cm.dpsi(i, j) >= 0.25 * De(i, j) - 1e-12);
        CHECK(cm.dpsi(i, j) <= De(i, j) + 1e-12);
        for (Eigen::Index k = 0; k < cm.dpsi.rows(); ++k)
          if (cm.dpsi(i, j) > cm.dpsi(i, k) + cm.dpsi(k, j) + 1e-12 * top) FAIL_CHECK("triangle inequality fails");
      }
    }
    CHECK(std::isfinite(cm.defbeta_C));
  }
}

TEST_CASE("presentations are comparable through annuli") {
  // PI quotients grow with the inner set and shrink with the outer set, so the
  // d_Psi presentation is squeezed between two metric-ball presentations.
  const std::size_t n = 17;
  const auto g = make_lattice2d(n);
  const MetricGraph mg(g);
  PipelineOptions opt;
  opt.center = grid(n, 8, 8);
  opt.radii = {2.0, 4.0};
  const auto rep = characterization_pipeline(g, counting_measure(g), opt);
  REQUIRE_FALSE(rep.rows.empty());
  const Eigen::MatrixXd d = distance_matrix(mg);
  std::size_t compared = 0;
  for (const auto& row : rep.rows) {
    if (!(row.rho > 0.0)) continue;
    const auto in_c = annuli_comparison(rep.chain.dpsi, d, opt.center, row.rho, opt.A);
    const auto out_c = annuli_comparison(rep.chain.dpsi, d, opt.center, opt.A * row.rho, opt.A);
    const double rb = row.pi_beta.rayleigh;
    const auto small_in = matrix_ball(d, opt.center, in_c.s);
    const auto big_in = matrix_ball(d, opt.center, in_c.s_dual + 0.5);
    const auto small_out = matrix_ball(d, opt.center, out_c.s);
    const auto big_out = matrix_ball(d, opt.center, out_c.s_dual + 0.5);
    if (subset(small_in, big_out) && small_in.size() > 1) {
      CHECK(pi_constant_on(g, rep.mu, small_in, big_out, 1.0).rayleigh <= rb * (1.0 + 1e-9));
      ++compared;
    }
    if (subset(big_in, small_out)) {
      CHECK(rb <= pi_constant_on(g, rep.mu, big_in, small_out, 1.0).rayleigh * (1.0 + 1e-9));
      ++compared;
    }
  }
  CHECK(compared > 0);
}

TEST_CASE("dumbbell ratios on weighted lattices") {
  for (std::uint64_t s = 1; s <= 3; ++s) {
    const MetricGraph mg(random_lattice(19, 700 + s));
    const auto r = dumbbell_report(mg, grid(19, 9, 9), 8.0);
    CHECK(r.ratio >= 1.0);
    CHECK(r.sup >= r.inf);
    CHECK(r.inf > 0.0);
    CHECK(mg.distance(r.sup_x, r.sup_y) >= 8.0 / 3.0 - 1e-12);
  }
}
