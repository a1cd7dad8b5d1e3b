#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <json.hpp>

#include <ostream>
#include <span>
#include <string>

#include "harnacklab/dyadic.hpp"
#include "harnacklab/harnack.hpp"
#include "harnacklab/inequalities.hpp"
#include "harnacklab/metric.hpp"
#include "harnacklab/netmaps.hpp"
#include "harnacklab/potential.hpp"
#include "harnacklab/scale.hpp"

namespace hlab {

// Every report document carries {"schema_version", "kind", ...}. Vertices are
// written as their graph labels. Non-finite numbers become null.
inline constexpr int kSchemaVersion = 1;

using json = nlohmann::json;

json report_document(const std::string& kind, json body);

json to_json(const WeightedGraph& g, const CapacityResult& r);
json to_json(const WeightedGraph& g, const HarnackReport& r);
json to_json(const WeightedGraph& g, const EhiProfile& p);
json to_json(const WeightedGraph& g, const PerturbationReport& r);
json to_json(const WeightedGraph& g, const CubeHierarchy& h);
json to_json(const WeightedGraph& g, const HierarchyCheck& c);
json to_json(const WeightedGraph& g, const GoodMeasure& gm);
json to_json(const WeightedGraph& g, const CapacityGoodReport& r);
json to_json(const WeightedGraph& g, const ScaleFunction& sf);
json to_json(const WeightedGraph& g, const ChainMetric& c);
json to_json(const QsEnvelope& e);
json to_json(const WeightedGraph& g, const PIReport& r);
json to_json(const WeightedGraph& g, const CSReport& r);
json to_json(const WeightedGraph& g, const AnnulusReport& r);
json to_json(const WeightedGraph& g, const CapPsiReport& r);
json to_json(const WeightedGraph& g, const PipelineReport& r);
json to_json(const WeightedGraph& g, const NetGraph& net);
json to_json(const WeightedGraph& g, const RoughIsometryWitness& w);
json to_json(const TransferTable& t);
json to_json(const WeightedGraph& g, const DumbbellReport& r);

/// Columns x, R, A, C_H, y, z, b (labels); inadmissible cells are skipped.
void write_profile_csv(std::ostream& out, const WeightedGraph& g, const EhiProfile& p);
/// Columns vertex, f, mass.
void write_measure_csv(std::ostream& out, const WeightedGraph& g, std::span<const double> density,
                       std::span<const double> mass);
/// Header row of labels, then one row per vertex led by its label.
void write_matrix_csv(std::ostream& out, const WeightedGraph& g, const Eigen::MatrixXd& d);
/// Columns row, col, value. Row and column ids are given by the two label lists.
void write_triplets_csv(std::ostream& out, const Eigen::SparseMatrix<double, Eigen::RowMajor>& M,
                        std::span<const std::int64_t> row_ids, std::span<const std::int64_t> col_ids);

}  // namespace hlab
