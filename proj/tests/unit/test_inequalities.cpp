#include <doctest.h>

#include "harnacklab/errors.hpp"
#include "harnacklab/inequalities.hpp"
#include "unit/support.hpp"

using namespace hlab;
using testing::grid;
using testing::range;

namespace {

double quotient(const WeightedGraph& g, const VertexMeasure& mu, std::span<const Vertex> inner,
                std::span<const Vertex> outer, std::span<const double> f) {
  double mass = 0.0, mean = 0.0;
  for (Vertex v : inner) {
    mass += mu[v];
    mean += mu[v] * f[v];
  }
  mean /= mass;
  double num = 0.0;
  for (Vertex v : inner) num += mu[v] * (f[v] - mean) * (f[v] - mean);
  std::vector<char> in(g.size(), 0);
  for (Vertex v : outer) in[v] = 1;
  double den = 0.0;
  for (const Edge& e : g.edges())
    if (in[e.u] && in[e.v]) den += e.weight * (f[e.u] - f[e.v]) * (f[e.u] - f[e.v]);
  return num / den;
}

double sum_over(std::span<const double> x, std::span<const Vertex> U) {
  double s = 0.0;
  for (Vertex v : U) s += x[v];
  return s;
}

}  // namespace

TEST_CASE("poincare constant") {
  const auto c4 = make_cycle(4);
  const auto all = range(0, 3);
  const auto rep = pi_constant_on(c4, counting_measure(c4), all, all, 1.0);
  CHECK(rep.C == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(quotient(c4, counting_measure(c4), all, all, rep.witness) - rep.rayleigh) <= 1e-8);

  const MetricGraph mg(make_lattice2d(9));
  const auto m = counting_measure(mg.graph());
  CHECK(pi_constant(mg, m, grid(9, 4, 4), 0.5, 2.0, 1.0).C == 0.0);
  CHECK_THROWS_AS(pi_constant(mg, m, 0, 1.0, 2.0, 0.0), ParameterError);
  CHECK_THROWS_AS(pi_constant_on(mg.graph(), m, range(0, 9), range(0, 3), 1.0), ContainmentError);
}

TEST_CASE("poincare constant across scales") {
  const MetricGraph mg(make_lattice2d(17));
  const auto m = counting_measure(mg.graph());
  const Vertex c = grid(17, 8, 8);
  const std::vector<Vertex> centers{c};
  const std::vector<double> radii{2.0, 4.0, 8.0};
  const auto sf = scale_function(mg, m, centers, radii);
  double lo = 1e300, hi = 0.0;
  std::mt19937_64 rng(31);
  for (std::size_t j = 0; j < radii.size(); ++j) {
    const auto rep = pi_constant(mg, m, c, radii[j], 2.0, sf.psi[0][j]);
    CHECK(rep.C > 0.0);
    const auto inner = mg.ball(c, radii[j]), outer = mg.ball(c, 2.0 * radii[j]);
    CHECK(std::abs(quotient(mg.graph(), m, inner, outer, rep.witness) - rep.rayleigh) <= 1e-8 * rep.rayleigh);
    for (int t = 0; t < 20; ++t) {
      auto f = testing::random_vector(mg.size(), rng);
      CHECK(quotient(mg.graph(), m, inner, outer, f) <= rep.rayleigh * (1.0 + 1e-10));
    }
    lo = std::min(lo, rep.C);
    hi = std::max(hi, rep.C);
  }
  CHECK(hi / lo <= 4.0);
}

TEST_CASE("cutoff functions") {
  const MetricGraph path(make_path(9));
  const auto lin = build_cutoff(path, 4, 1.0, 3.0, CutoffKind::distance_linear);
  const std::vector<double> expect{0.0, 0.0, 0.5, 1.0, 1.0, 1.0, 0.5, 0.0, 0.0};
  CHECK(lin.values == expect);
  CHECK(is_cutoff(path, lin));
  CHECK_THROWS_AS(build_cutoff(path, 4, 3.0, 3.0, CutoffKind::distance_linear), ParameterError);
  CHECK_THROWS_AS(build_cutoff(path, 4, 1.0, 3.0, CutoffKind::annulus_composite), ParameterError);
  CHECK_THROWS_AS(build_cutoff(path, 4, 1.0, 8.0, CutoffKind::equilibrium), PreconditionError);

  const MetricGraph lat(make_lattice2d(13));
  const Vertex c = grid(13, 6, 6);
  for (auto kind : {CutoffKind::distance_linear, CutoffKind::equilibrium}) {
    const auto phi = build_cutoff(lat, c, 2.0, 5.0, kind);
    CHECK(is_cutoff(lat, phi));
  }
  const auto eq = build_cutoff(lat, c, 2.0, 5.0, CutoffKind::equilibrium);
  const auto cap = capacity(lat.graph(), lat.ball(c, 2.0), lat.ball(c, 5.0)).capacity;
  CHECK(energy(lat.graph(), eq.values) == doctest::Approx(cap).epsilon(1e-10));

  auto broken = eq;
  broken.values[c] = 0.5;
  CHECK_FALSE(is_cutoff(lat, broken));
}

TEST_CASE("annulus energy form") {
  const auto g = oracle::random_graph(40, 0.5, 3);
  std::mt19937_64 rng(8);
  const auto U = testing::random_region(g, 0, 15, rng);
  const Eigen::MatrixXd S = annulus_energy_form(g, U);
  CHECK((S - S.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(S.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-12);
  // Schur complement = minimum of the half-edge energy over extensions of u
  for (int t = 0; t < 5; ++t) {
    const auto u = testing::random_vector(U.size(), rng);
    Eigen::VectorXd uv = Eigen::Map<const Eigen::VectorXd>(u.data(), static_cast<Eigen::Index>(u.size()));
    std::vector<double> f(g.size(), 0.0);
    for (std::size_t i = 0; i < U.size(); ++i) f[U[i]] = u[i];
    std::vector<char> in(g.size(), 0);
    for (Vertex v : U) in[v] = 1;
    // the best value at each outside neighbor is the weighted mean of its U neighbors
    std::vector<double> wsum(g.size(), 0.0), fsum(g.size(), 0.0);
    for (const Edge& e : g.edges()) {
      if (in[e.u] && !in[e.v]) {
        wsum[e.v] += e.weight;
        fsum[e.v] += e.weight * f[e.u];
      } else if (in[e.v] && !in[e.u]) {
        wsum[e.u] += e.weight;
        fsum[e.u] += e.weight * f[e.v];
      }
    }
    for (Vertex v = 0; v < g.size(); ++v)
      if (!in[v] && wsum[v] > 0.0) f[v] = fsum[v] / wsum[v];
    const double direct = sum_over(gamma_density(g, f), U);
    CHECK(uv.dot(S * uv) == doctest::Approx(direct).epsilon(1e-10));
  }
}

TEST_CASE("cutoff energy inequality") {
  const MetricGraph mg(make_lattice2d(17));
  const auto& g = mg.graph();
  const auto m = counting_measure(g);
  const Vertex c = grid(17, 8, 8);
  const auto phi = build_cutoff(mg, c, 3.0, 6.0, CutoffKind::distance_linear);
  const double psi = 4.0;
  const auto rep = cs_verify(mg, m, c, 3.0, 2.0, phi.values, 0.125, psi);
  CHECK(rep.C2 > 0.0);
  const auto U = set_difference(mg.ball(c, 6.0), mg.ball(c, 3.0));
  CHECK(rep.annulus_size == U.size());
  const double scale = rep.C2 / psi;
  CHECK(cs_form_min_eigenvalue(g, m, U, phi.values, 0.125, rep.C2, psi) >= -1e-9 * scale);
  CHECK(cs_form_min_eigenvalue(g, m, U, phi.values, 0.125, rep.C2 * (1.0 - 1e-3), psi) < 0.0);

  // u = 1 on U has no energy, leaving sum_U gamma_phi <= C2/psi mu(U)
  const auto gam = gamma_density(g, phi.values);
  CHECK(sum_over(gam, U) <= rep.C2 / psi * static_cast<double>(U.size()) * (1.0 + 1e-12));

  // constants on U carry no energy, so a large C1 only pushes C2 down to the constant mode
  const auto huge = cs_verify(mg, m, c, 3.0, 2.0, phi.values, 1e6, psi);
  CHECK(huge.C2 == doctest::Approx(psi * sum_over(gam, U) / static_cast<double>(U.size())).epsilon(1e-4));
  CHECK(huge.C2 < rep.C2);

  const std::vector<double> flat(g.size(), 1.0);
  CHECK(cs_verify(mg, m, c, 3.0, 2.0, flat, 1.0, psi).C2 <= 1e-12);
  CHECK_THROWS_AS(cs_verify(mg, m, c, 3.0, 1.0, phi.values, 0.125, psi), ParameterError);
}

TEST_CASE("cutoff energy sharpness on random cells") {
  std::mt19937_64 rng(13);
  for (std::uint64_t s = 1; s <= 10; ++s) {
    const MetricGraph mg(oracle::random_graph(70, 0.4, s));
    const auto& g = mg.graph();
    VertexMeasure mu(g.size(), 1.0);
    for (auto& x : mu) x = std::uniform_real_distribution<double>(0.5, 2.0)(rng);
    const Vertex x = static_cast<Vertex>(rng() % g.size());
    const double R = 1.0 + static_cast<double>(rng() % 2);
    const auto B1 = mg.ball(x, R), B2 = mg.ball(x, 2.0 * R);
    if (B2.size() == g.size()) continue;
    const auto phi = capacity(g, B1, B2).h;
    const auto U = set_difference(B2, B1);
    const double psi = 1.0 + static_cast<double>(s);
    const auto rep = cs_verify_on(g, mu, U, phi, 0.125, psi);
    const double scale = std::max(1.0, rep.C2 / psi);
    CHECK(cs_form_min_eigenvalue(g, mu, U, phi, 0.125, rep.C2, psi) >= -1e-9 * scale);
    if (rep.C2 > 0.0) CHECK(cs_form_min_eigenvalue(g, mu, U, phi, 0.125, rep.C2 * (1.0 - 1e-3), psi) < 0.0);
  }
}

TEST_CASE("annulus cutoff") {
  const MetricGraph path(make_path(65));
  const auto pm = counting_measure(path.graph());
  const auto rep = annulus_cutoff(path, pm, 32, 8.0, 8.0, 16.0);
  CHECK(rep.gradient_coefficient <= 0.125 + 1e-12);
  CHECK(rep.cutoff_ok);
  CHECK(rep.n_reduced);
  CHECK(rep.n >= 9);
  CHECK(rep.shells == rep.n - 2 * 2 - 4);
  CHECK(std::isfinite(rep.multiplier));
  const auto U = set_difference(path.ball(32, 16.0), path.ball(32, 8.0));
  const double scale = std::max(1.0, rep.multiplier / rep.psi);
  CHECK(cs_form_min_eigenvalue(path.graph(), pm, U, rep.phi.values, 0.125, rep.multiplier, rep.psi) >=
        -1e-9 * scale);

  const MetricGraph lat(make_lattice2d(33));
  const auto lm = counting_measure(lat.graph());
  const Vertex c = grid(33, 16, 16);
  std::vector<AnnulusReport> reps;
  for (double R : {0.0, 4.0, 8.0}) {
    reps.push_back(annulus_cutoff(lat, lm, c, R, 8.0, 16.0));
    CHECK(reps.back().cutoff_ok);
    CHECK(reps.back().gradient_coefficient <= 0.125 + 1e-12);
  }
  CHECK(std::isfinite(fit_annulus_gamma(reps)));

  CHECK_THROWS_AS(annulus_cutoff(path, pm, 32, 8.0, 0.0, 1.0), ParameterError);
  CHECK_THROWS_AS(annulus_cutoff(path, pm, 32, 8.0, 2.0, 1.0), ParameterError);
  CHECK_THROWS_AS(annulus_cutoff(path, pm, 32, 30.0, 8.0, 1.0), PreconditionError);
}

TEST_CASE("energy of maxima") {
  const auto g = make_lattice2d(9);
  std::mt19937_64 rng(29);
  const auto f = testing::random_vector(g.size(), rng);
  const auto p = testing::random_vector(g.size(), rng, 0.0, 1.0);
  const auto same = energy_of_max_check(g, f, p, p);
  CHECK(same.margin == doctest::Approx(same.lhs).epsilon(1e-12));
  CHECK(same.margin >= 0.0);

  std::vector<double> left(g.size(), 0.0), right(g.size(), 0.0);
  for (std::size_t i = 0; i < 9; ++i) {
    for (std::size_t j = 0; j < 3; ++j) left[grid(9, i, j)] = p[grid(9, i, j)];
    for (std::size_t j = 6; j < 9; ++j) right[grid(9, i, j)] = p[grid(9, i, j)];
  }
  // columns 3..5 are zero in both, so no edge sees both supports
  const auto apart = energy_of_max_check(g, f, left, right);
  CHECK(std::abs(apart.margin) <= 1e-12 * apart.rhs);

  for (int t = 0; t < 100; ++t) {
    const auto ft = testing::random_vector(g.size(), rng);
    const auto a = testing::random_vector(g.size(), rng, 0.0, 1.0);
    const auto b = testing::random_vector(g.size(), rng, 0.0, 1.0);
    CHECK(energy_of_max_check(g, ft, a, b).margin >= -1e-12);
  }
}

TEST_CASE("capacity estimate") {
  const MetricGraph lat(make_lattice2d(17));
  const auto m = counting_measure(lat.graph());
  const std::vector<Vertex> centers{grid(17, 8, 8), grid(17, 5, 6)};
  const std::vector<double> radii{2.0, 4.0, 8.0};
  const auto sf = scale_function(lat, m, centers, radii);
  const PsiFn psi = [&](Vertex x, double r) { return sf.value(x, r); };
  const auto def = cap_psi_report(lat, m, psi, centers, radii, 0.125);
  for (const auto& c : def.cells) CHECK(c.ratio == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(def.C == doctest::Approx(1.0).epsilon(1e-10));

  const auto half = cap_psi_report(lat, m, psi, centers, radii, 0.5);
  CHECK(half.C > 1.0);
  CHECK(std::isfinite(half.C));
  CHECK(half.cells.size() + half.skipped == 6);

  const MetricGraph path(make_path(33));
  const std::vector<Vertex> pc{16};
  const std::vector<double> pr{2.0, 4.0, 8.0, 32.0};
  const auto pf = scale_function(path, counting_measure(path.graph()), pc, pr);
  const auto prep = cap_psi_report(path, counting_measure(path.graph()),
                                   [&](Vertex x, double r) { return pf.value(x, r); }, pc, pr, 0.5);
  CHECK(prep.skipped == 1);
  CHECK(std::isfinite(prep.C));
  CHECK_THROWS_AS(cap_psi_report(path, counting_measure(path.graph()), psi, pc, pr, 1.0), ParameterError);
}

TEST_CASE("characterization pipeline") {
  PipelineOptions opt;
  opt.center = grid(17, 8, 8);
  const auto lat = make_lattice2d(17);
  const auto rep = characterization_pipeline(lat, counting_measure(lat), opt);
  for (const auto& st : rep.stages) CHECK_MESSAGE(st.ok, st.stage << ": " << st.message);
  CHECK(rep.ok());
  CHECK(rep.ehi_bounded);
  REQUIRE(rep.rows.size() == 3);
  for (const auto& row : rep.rows) {
    CHECK(std::isfinite(row.pi.C));
    CHECK(std::isfinite(row.pi_beta.C));
    CHECK(row.rho > 0.0);
  }

  PipelineOptions popt;
  popt.center = 16;
  const auto path = make_path(33);
  const auto prep = characterization_pipeline(path, counting_measure(path), popt);
  CHECK(prep.ehi_bounded);
  CHECK(prep.rows.size() == 3);

  PipelineOptions topt;
  topt.radii = {2.0, 4.0};
  const auto tree = make_spherical_tree(std::vector<std::size_t>{2, 3, 4, 5}, 9);
  const auto trep = characterization_pipeline(tree, counting_measure(tree), topt);
  CHECK_FALSE(trep.ehi_bounded);
  CHECK_FALSE(trep.ok());
  CHECK_FALSE(trep.stages.front().ok);
  CHECK(trep.ehi_growth > 10.0);
}
