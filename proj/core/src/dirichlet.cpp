#include "harnacklab/dirichlet.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "harnacklab/errors.hpp"

namespace hlab {

VertexMeasure counting_measure(const WeightedGraph& g) { return VertexMeasure(g.size(), 1.0); }

VertexMeasure vertex_weight_measure(const WeightedGraph& g) {
  return VertexMeasure(g.vertex_weights().begin(), g.vertex_weights().end());
}

double measure_of(const VertexMeasure& m, std::span<const Vertex> set) {
  double s = 0.0;
  for (Vertex v : set) s += m[v];
  return s;
}

double energy(const WeightedGraph& g, std::span<const double> f, std::span<const double> h) {
  double e = 0.0;
  for (const Edge& ed : g.edges()) e += ed.weight * (f[ed.u] - f[ed.v]) * (h[ed.u] - h[ed.v]);
  return e;
}

double energy(const WeightedGraph& g, std::span<const double> f) { return energy(g, f, f); }

double induced_energy(const WeightedGraph& g, std::span<const double> f, std::span<const Vertex> subset) {
  std::vector<char> in(g.size(), 0);
  for (Vertex v : subset) in[v] = 1;
  double e = 0.0;
  for (const Edge& ed : g.edges())
    if (in[ed.u] && in[ed.v]) e += ed.weight * (f[ed.u] - f[ed.v]) * (f[ed.u] - f[ed.v]);
  return e;
}

std::vector<double> gamma_density(const WeightedGraph& g, std::span<const double> f) {
  std::vector<double> gam(g.size(), 0.0);
  for (const Edge& ed : g.edges()) {
    const double half = 0.5 * ed.weight * (f[ed.u] - f[ed.v]) * (f[ed.u] - f[ed.v]);
    gam[ed.u] += half;
    gam[ed.v] += half;
  }
  return gam;
}

std::vector<double> apply_laplacian(const WeightedGraph& g, std::span<const double> f) {
  std::vector<double> out(g.size(), 0.0);
  for (const Edge& ed : g.edges()) {
    const double flow = ed.weight * (f[ed.u] - f[ed.v]);
    out[ed.u] += flow;
    out[ed.v] -= flow;
  }
  return out;
}

DomainProblem::DomainProblem(const WeightedGraph& g, std::span<const Vertex> domain)
    : graph_(&g), domain_(normalized_set(domain)), local_(g.size(), -1), boundary_local_(g.size(), -1) {
  if (domain_.empty()) throw ParameterError("domain must be nonempty");
  if (domain_.back() >= g.size()) throw ParameterError("domain vertex out of range");
  if (domain_.size() == g.size()) throw TopologyError("domain has empty complement; no boundary");
  for (std::size_t i = 0; i < domain_.size(); ++i) local_[domain_[i]] = static_cast<std::ptrdiff_t>(i);
  boundary_ = outer_boundary(g, domain_);
  for (std::size_t i = 0; i < boundary_.size(); ++i)
    boundary_local_[boundary_[i]] = static_cast<std::ptrdiff_t>(i);

  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t i = 0; i < domain_.size(); ++i) {
    const Vertex v = domain_[i];
    trip.emplace_back(i, i, g.vertex_weight(v));
    for (const Neighbor& nb : g.neighbors(v))
      if (local_[nb.vertex] >= 0) trip.emplace_back(i, local_[nb.vertex], -nb.weight);
  }
  const auto n = static_cast<Eigen::Index>(domain_.size());
  laplacian_.resize(n, n);
  laplacian_.setFromTriplets(trip.begin(), trip.end());
  factor_ = std::make_shared<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>>(laplacian_);
  if (factor_->info() != Eigen::Success) throw TopologyError("restricted Laplacian is singular");
}

Eigen::VectorXd DomainProblem::solve(const Eigen::VectorXd& rhs) const { return factor_->solve(rhs); }

Eigen::MatrixXd DomainProblem::solve(const Eigen::MatrixXd& rhs) const { return factor_->solve(rhs); }

Eigen::VectorXd DomainProblem::boundary_load(std::span<const double> boundary_values) const {
  if (boundary_values.size() != boundary_.size()) throw ParameterError("boundary data size mismatch");
  Eigen::VectorXd load = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(domain_.size()));
  for (std::size_t i = 0; i < domain_.size(); ++i)
    for (const Neighbor& nb : graph_->neighbors(domain_[i]))
      if (boundary_local_[nb.vertex] >= 0) load[i] += nb.weight * boundary_values[boundary_local_[nb.vertex]];
  return load;
}

std::vector<double> DomainProblem::to_full(const Eigen::VectorXd& local) const {
  std::vector<double> out(graph_->size(), 0.0);
  for (std::size_t i = 0; i < domain_.size(); ++i) out[domain_[i]] = local[static_cast<Eigen::Index>(i)];
  return out;
}

Eigen::VectorXd DomainProblem::to_local(std::span<const double> full) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(domain_.size()));
  for (std::size_t i = 0; i < domain_.size(); ++i) out[static_cast<Eigen::Index>(i)] = full[domain_[i]];
  return out;
}

DirichletSolution solve_dirichlet(const DomainProblem& dp, std::span<const double> boundary_data) {
  const Eigen::VectorXd load = dp.boundary_load(boundary_data);
  const Eigen::VectorXd h = dp.solve(load);
  DirichletSolution sol;
  sol.values = dp.to_full(h);
  for (std::size_t i = 0; i < dp.boundary().size(); ++i) sol.values[dp.boundary()[i]] = boundary_data[i];
  sol.residual = (dp.laplacian() * h - load).norm() / std::max(1.0, load.norm());
  return sol;
}

Eigen::MatrixXd greens_function(const DomainProblem& dp) {
  const auto n = static_cast<Eigen::Index>(dp.size());
  Eigen::MatrixXd g = dp.solve(Eigen::MatrixXd(Eigen::MatrixXd::Identity(n, n)));
  return 0.5 * (g + g.transpose());
}

Eigen::VectorXd green_column(const DomainProblem& dp, Vertex x) {
  const auto i = dp.local_index(x);
  if (i < 0) throw ContainmentError("pole is not inside the domain");
  Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dp.size()));
  e[i] = 1.0;
  return dp.solve(e);
}

double green_column_residual(const DomainProblem& dp, Vertex x, const Eigen::VectorXd& column) {
  Eigen::VectorXd r = dp.laplacian() * column;
  r[dp.local_index(x)] -= 1.0;
  return r.lpNorm<Eigen::Infinity>();
}

Eigen::MatrixXd harmonic_measure(const DomainProblem& dp) {
  const auto n = static_cast<Eigen::Index>(dp.size());
  const auto m = static_cast<Eigen::Index>(dp.boundary().size());
  Eigen::MatrixXd load = Eigen::MatrixXd::Zero(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (const Neighbor& nb : dp.graph().neighbors(dp.domain()[static_cast<std::size_t>(i)]))
      if (dp.boundary_index(nb.vertex) >= 0) load(i, dp.boundary_index(nb.vertex)) += nb.weight;
  return dp.solve(load);
}

double lambda_min(const DomainProblem& dp, const VertexMeasure& m) {
  const auto n = static_cast<Eigen::Index>(dp.size());
  Eigen::VectorXd mass(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    mass[i] = m[dp.domain()[static_cast<std::size_t>(i)]];
    if (!(mass[i] > 0.0)) throw ParameterError("measure must be positive on the domain");
  }
  // Inverse iteration on L v = lambda M v; the ground state is positive, so the
  // all-ones start has a nonzero component along it.
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
  v /= std::sqrt(v.dot(mass.cwiseProduct(v)));
  double lambda = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 100000; ++it) {
    Eigen::VectorXd w = dp.solve(Eigen::VectorXd(mass.cwiseProduct(v)));
    w /= std::sqrt(w.dot(mass.cwiseProduct(w)));
    const double next = w.dot(dp.laplacian() * w);
    const double change = std::abs(next - lambda);
    v = std::move(w);
    lambda = next;
    if (change <= 1e-15 * lambda) break;
  }
  return lambda;
}

void write_kernel_csv(std::ostream& out, const WeightedGraph& g, std::span<const Vertex> rows,
                      std::span<const Vertex> cols, const Eigen::MatrixXd& kernel) {
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  out << "vertex";
  for (Vertex c : cols) out << "," << g.label(c);
  out << "\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << g.label(rows[i]);
    for (std::size_t j = 0; j < cols.size(); ++j)
      out << "," << kernel(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    out << "\n";
  }
  out.precision(old);
}

}  // namespace hlab
