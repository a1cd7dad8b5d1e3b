#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "harnacklab/graph.hpp"

namespace hlab {

/// Strictly positive mass per vertex.
using VertexMeasure = std::vector<double>;

VertexMeasure counting_measure(const WeightedGraph& g);
/// m(x) = w_x.
VertexMeasure vertex_weight_measure(const WeightedGraph& g);
double measure_of(const VertexMeasure& m, std::span<const Vertex> set);

// ---------------------------------------------------------------------------
// Energy form

/// E(f,g) = sum_e w_e (f(u)-f(v)) (g(u)-g(v)).
double energy(const WeightedGraph& g, std::span<const double> f, std::span<const double> h);
double energy(const WeightedGraph& g, std::span<const double> f);
/// Energy of the subgraph induced by `subset` (edges with both ends inside).
double induced_energy(const WeightedGraph& g, std::span<const double> f, std::span<const Vertex> subset);

/// gamma_f(x) = 1/2 sum_{y~x} w_xy (f(x)-f(y))^2, so that sum_x gamma_f(x) = E(f,f).
std::vector<double> gamma_density(const WeightedGraph& g, std::span<const double> f);

/// (L f)(x) = sum_{y~x} w_xy (f(x) - f(y)).
std::vector<double> apply_laplacian(const WeightedGraph& g, std::span<const double> f);

// ---------------------------------------------------------------------------
// Dirichlet problems

/// A finite domain D with its outer boundary and the factorized restricted
/// Laplacian L_D (the conductance Laplacian with Dirichlet data on the
/// boundary). The graph must outlive the problem. Immutable once built.
class DomainProblem {
 public:
  DomainProblem(const WeightedGraph& g, std::span<const Vertex> domain);

  const WeightedGraph& graph() const noexcept { return *graph_; }
  std::span<const Vertex> domain() const noexcept { return domain_; }
  std::span<const Vertex> boundary() const noexcept { return boundary_; }
  std::size_t size() const noexcept { return domain_.size(); }

  bool contains(Vertex v) const noexcept { return local_[v] >= 0; }
  /// Position of v inside domain(), or -1.
  std::ptrdiff_t local_index(Vertex v) const noexcept { return local_[v]; }
  std::ptrdiff_t boundary_index(Vertex v) const noexcept { return boundary_local_[v]; }

  const Eigen::SparseMatrix<double>& laplacian() const noexcept { return laplacian_; }
  /// x with L_D x = rhs.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;

  /// rhs contribution of boundary values: (B f)(i) = sum_{b~i} w_ib f(b).
  Eigen::VectorXd boundary_load(std::span<const double> boundary_values) const;

  std::vector<double> to_full(const Eigen::VectorXd& local) const;
  Eigen::VectorXd to_local(std::span<const double> full) const;

 private:
  const WeightedGraph* graph_;
  std::vector<Vertex> domain_;
  std::vector<Vertex> boundary_;
  std::vector<std::ptrdiff_t> local_;
  std::vector<std::ptrdiff_t> boundary_local_;
  Eigen::SparseMatrix<double> laplacian_;
  std::shared_ptr<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>> factor_;
};

struct DirichletSolution {
  std::vector<double> values;  // on every vertex: solution on D, data on the boundary, 0 elsewhere
  double residual = 0.0;       // ||L_D h - B data|| / max(1, ||B data||)
};

/// Harmonic extension of boundary data (aligned with dp.boundary()).
DirichletSolution solve_dirichlet(const DomainProblem& dp, std::span<const double> boundary_data);

/// Green kernel g_D = L_D^{-1}, |D| x |D| in domain order.
Eigen::MatrixXd greens_function(const DomainProblem& dp);
/// Column g_D(., x) in domain order.
Eigen::VectorXd green_column(const DomainProblem& dp, Vertex x);

/// Harmonic-measure kernel K, |D| x |boundary| in domain/boundary order:
/// K(x,b) = probability that the walk started at x leaves D through b.
Eigen::MatrixXd harmonic_measure(const DomainProblem& dp);

/// Smallest eigenvalue of L_D v = lambda diag(m) v.
double lambda_min(const DomainProblem& dp, const VertexMeasure& m);

/// Relative residual ||L_D g(.,x) - e_x|| for a Green column.
double green_column_residual(const DomainProblem& dp, Vertex x, const Eigen::VectorXd& column);

/// CSV dump of a kernel with vertex-label headers.
void write_kernel_csv(std::ostream& out, const WeightedGraph& g, std::span<const Vertex> rows,
                      std::span<const Vertex> cols, const Eigen::MatrixXd& kernel);

}  // namespace hlab
