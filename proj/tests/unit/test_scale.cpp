#include <doctest.h>

#include "harnacklab/dirichlet.hpp"
#include "harnacklab/errors.hpp"
#include "harnacklab/scale.hpp"
#include "oracle/frozen.hpp"
#include "unit/support.hpp"

using namespace hlab;
using testing::grid;
using testing::range;

namespace {

void check_metric_axioms(const Eigen::MatrixXd& d) {
  const Eigen::Index n = d.rows();
  const double scale = d.maxCoeff();
  for (Eigen::Index i = 0; i < n; ++i) {
    CHECK(d(i, i) == 0.0);
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j) CHECK(d(i, j) > 0.0);
      CHECK(d(i, j) == d(j, i));
      for (Eigen::Index k = 0; k < n; ++k)
        if (d(i, j) > d(i, k) + d(k, j) + 1e-12 * scale) FAIL_CHECK("triangle inequality fails");
    }
  }
}

}  // namespace

TEST_CASE("scale function on a path") {
  const MetricGraph mg(make_path(65));
  const auto m = counting_measure(mg.graph());
  const std::vector<Vertex> centers{32, 20};
  const std::vector<double> radii{16.0, 4.0, 8.0, 2.0};
  const auto sf = scale_function(mg, m, centers, radii);
  CHECK(sf.radii == std::vector<double>{2.0, 4.0, 8.0, 16.0});
  CHECK(sf.monotone);
  CHECK(sf.inadmissible == 0);
  CHECK(sf.value(32, 0.0) == 0.0);
  const auto fit = psi_growth(sf, 32);
  CHECK(fit.slope > 1.5);
  CHECK(fit.slope < 2.5);
  for (std::size_t j = 0; j < sf.radii.size(); ++j)
    CHECK(sf.value(32, sf.radii[j]) == doctest::Approx(sf.psi[0][j]).epsilon(1e-12));

  // r/8 below the edge length: inner set {x} and Psi = mu(B) g(x,x)
  REQUIRE(sf.singleton_inner[0][0]);
  const auto B = mg.ball(32, 2.0);
  const DomainProblem dp(mg.graph(), B);
  const double gxx = green_column(dp, 32)(dp.local_index(32));
  CHECK(sf.psi[0][0] == doctest::Approx(static_cast<double>(B.size()) * gxx).epsilon(1e-12));
  CHECK_FALSE(sf.singleton_inner[0][3]);

  CHECK_THROWS_AS(sf.row(5), ParameterError);
  const std::vector<double> bad{0.0};
  CHECK_THROWS_AS(scale_function(mg, m, centers, bad), ParameterError);
}

TEST_CASE("inadmissible cells") {
  const MetricGraph mg(make_path(9));
  const std::vector<Vertex> c{4};
  const std::vector<double> radii{2.0, 4.0, 8.0};
  const auto sf = scale_function(mg, counting_measure(mg.graph()), c, radii);
  CHECK(sf.inadmissible == 1);
  CHECK(std::isnan(sf.psi[0][2]));
  CHECK(sf.psi[0][1] > sf.psi[0][0]);
}

TEST_CASE("lattice scale function matches the oracle") {
  const MetricGraph mg(make_lattice2d(33));
  const Vertex c = grid(33, 16, 16);
  const std::vector<Vertex> centers{c};
  const std::vector<double> radii{4.0, 8.0, 16.0};
  const auto sf = scale_function(mg, counting_measure(mg.graph()), centers, radii);
  CHECK(oracle::rel_err(sf.psi[0][0], frozen::kLatticePsi4) <= 1e-10);
  CHECK(oracle::rel_err(sf.psi[0][1], frozen::kLatticePsi8) <= 1e-10);
  CHECK(oracle::rel_err(sf.psi[0][2], frozen::kLatticePsi16) <= 1e-10);
  const double slope = psi_growth(sf, c).slope;
  CHECK(slope == doctest::Approx(frozen::kLatticePsiExponent).epsilon(1e-10));
  CHECK(slope >= 1.8);
  CHECK(slope <= 2.2);
}

TEST_CASE("regularity fit dominates every sampled pair") {
  const MetricGraph mg(make_lattice2d(17));
  std::vector<Vertex> centers;
  for (std::size_t i = 2; i < 15; i += 4)
    for (std::size_t j = 2; j < 15; j += 4) centers.push_back(grid(17, i, j));
  const std::vector<double> radii{1.0, 2.0, 3.0, 4.0};
  const auto sf = scale_function(mg, counting_measure(mg.graph()), centers, radii);
  CHECK(sf.fit_samples > 0);
  CHECK(sf.beta1 > 0.0);
  CHECK(sf.beta1 <= sf.beta2);
  const double lc = std::log(sf.C1);
  for (std::size_t i = 0; i < centers.size(); ++i)
    for (std::size_t j = 0; j < centers.size(); ++j) {
      const double R = mg.distance(centers[i], centers[j]);
      for (std::size_t a = 0; a < radii.size(); ++a)
        for (std::size_t b = 0; b <= a; ++b) {
          const double Rr = std::max(R, radii[a]);
          const double u = std::log(radii[a] / Rr), v = std::log(Rr / radii[b]);
          const double q = std::log(sf.psi[i][a] / sf.psi[j][b]);
          CHECK(q <= sf.beta2 * u + sf.beta1 * v + lc + 1e-9);
          CHECK(q >= sf.beta1 * u + sf.beta2 * v - lc - 1e-9);
        }
    }
}

TEST_CASE("chain metric for psi = r") {
  const MetricGraph mg(make_path(12));
  const auto cm = build_chain_metric(mg, [](Vertex, double t) { return t; });
  const Eigen::MatrixXd d = distance_matrix(mg);
  CHECK(cm.K == 1.0);
  CHECK(cm.epsilon == 1.0);
  CHECK(cm.beta == 1.0);
  CHECK(cm.halvings == 0);
  CHECK((cm.dpsi - 2.0 * d).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(cm.defbeta_C == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("chain metric for psi = r^2") {
  const MetricGraph mg(make_path(33));
  const auto cm = build_chain_metric(mg, [](Vertex, double t) { return t * t; });
  CHECK(cm.K == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(cm.beta == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(cm.defbeta_C <= 4.0);
  CHECK(cm.defbeta_C == doctest::Approx(2.0).epsilon(1e-9));
  const Eigen::MatrixXd d = distance_matrix(mg);
  CHECK((cm.dpsi - std::sqrt(2.0) * d).cwiseAbs().maxCoeff() <= 1e-9);
  check_metric_axioms(cm.dpsi);
}

TEST_CASE("chain metric from a lattice scale function") {
  const MetricGraph mg(make_lattice2d(9));
  std::vector<Vertex> all(mg.size());
  for (Vertex v = 0; v < mg.size(); ++v) all[v] = v;
  const std::vector<double> radii{1.0, 2.0, 4.0};
  const auto sf = scale_function(mg, counting_measure(mg.graph()), all, radii);
  REQUIRE(sf.inadmissible == 0);
  const auto cm = build_chain_metric(mg, sf);
  CHECK(cm.halvings <= 6);
  CHECK(cm.lower_ratio >= 0.25 - 1e-12);
  CHECK(std::isfinite(cm.defbeta_C));
  CHECK(cm.beta >= 1.0);
  check_metric_axioms(cm.dpsi);
  const Eigen::MatrixXd De = cm.D.array().pow(cm.epsilon).matrix();
  const Eigen::MatrixXd d = distance_matrix(mg);
  for (Eigen::Index i = 0; i < De.rows(); ++i)
    for (Eigen::Index j = 0; j < De.cols(); ++j) {
      if (i == j) continue;
      CHECK(cm.dpsi(i, j) >= 0.25 * De(i, j) - 1e-12);
      CHECK(cm.dpsi(i, j) <= De(i, j) + 1e-12);
      const double p = sf.value(static_cast<Vertex>(i), d(i, j));
      const double q = std::pow(cm.dpsi(i, j), cm.beta);
      CHECK(q <= cm.defbeta_C * p * (1.0 + 1e-12));
      CHECK(q * cm.defbeta_C >= p * (1.0 - 1e-12));
    }

  const auto env = quasisymmetry_distortion(d, cm.dpsi);
  CHECK_FALSE(env.sampled);
  CHECK(env.triples == 81 * 80 * 79);
  CHECK(std::isfinite(env.C));
  for (const auto& p : env.scatter) CHECK(p.u <= env.eta(p.t) * (1.0 + 1e-12));

  const auto cert = annuli_comparison(d, cm.dpsi, grid(9, 4, 4), 2.0, 2.0, &env);
  CHECK(cert.s > 0.0);
  CHECK(cert.chain_holds);
  CHECK(cert.eta_needed <= cert.eta_A);
}

TEST_CASE("quasisymmetric envelopes") {
  const MetricGraph mg(make_lattice2d(5));
  const Eigen::MatrixXd d = distance_matrix(mg);
  const auto twice = quasisymmetry_distortion(d, 2.0 * d);
  CHECK(twice.gamma1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(twice.gamma2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(twice.C == doctest::Approx(1.0).epsilon(1e-12));

  const auto snow = quasisymmetry_distortion(d, d.array().sqrt().matrix());
  CHECK(snow.gamma1 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(snow.gamma2 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(snow.C == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(snow.eta(4.0) == doctest::Approx(2.0).epsilon(1e-12));

  CHECK_THROWS_AS(quasisymmetry_distortion(d, Eigen::MatrixXd::Zero(3, 3)), ParameterError);
}

TEST_CASE("annuli comparison") {
  const MetricGraph mg(make_path(21));
  const Eigen::MatrixXd d = distance_matrix(mg);
  const auto same = annuli_comparison(d, d, 10, 3.0, 2.0);
  CHECK(same.s == 3.0);
  CHECK(same.eta_needed == doctest::Approx(5.0 / 3.0));
  CHECK(same.s_dual == 2.0);

  const Eigen::MatrixXd sq = d.array().square().matrix();
  const auto cert = annuli_comparison(d, sq, 10, 3.0, 2.0);
  CHECK(cert.s == 9.0);
  CHECK(cert.eta_needed == doctest::Approx(25.0 / 9.0));
  const auto env = quasisymmetry_distortion(d, sq);
  CHECK(env.gamma2 == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(annuli_comparison(d, sq, 10, 3.0, 2.0, &env).chain_holds);

  const auto vacuous = annuli_comparison(d, d, 10, 50.0, 2.0);
  CHECK(std::isinf(vacuous.s));
  CHECK_THROWS_AS(annuli_comparison(d, d, 10, 0.0, 2.0), ParameterError);
  CHECK_THROWS_AS(annuli_comparison(d, d, 10, 1.0, 1.0), ParameterError);
  CHECK_THROWS_AS(annuli_comparison(d, d, 40, 1.0, 2.0), ParameterError);
}
