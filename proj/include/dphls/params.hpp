#pragma once

#include <Eigen/Core>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dphls {

enum class DistanceMetric { Manhattan, Euclidean, AbsDiff };

enum class ParamName {
  Match,
  Mismatch,
  LinearGap,
  GapOpen,
  GapExtend,
  GapOpen2,
  GapExtend2,
  LogMu,
  LogLambda,
  SubstitutionMatrix,
  Emission,
  DistanceMetric,
};

std::string_view to_string(ParamName name);
std::optional<ParamName> param_from_string(std::string_view name);
std::optional<DistanceMetric> metric_from_string(std::string_view name);
std::string_view to_string(DistanceMetric m);

/// Runtime scoring parameters. Every kernel reads only the fields it lists in
/// KernelSpec::required_params; those must be set before alignment starts.
/// Scalars are held as doubles; integer kernels require integral values.
struct ScoringParams {
  std::optional<double> match;
  std::optional<double> mismatch;
  std::optional<double> linear_gap;
  std::optional<double> gap_open;
  std::optional<double> gap_extend;
  std::optional<double> gap_open2;
  std::optional<double> gap_extend2;
  std::optional<double> log_mu;
  std::optional<double> log_lambda;
  std::optional<Eigen::MatrixXd> substitution_matrix;  // K x K, K in {4, 5, 20}
  std::optional<Eigen::Matrix<double, 5, 5>> emission;
  std::optional<DistanceMetric> distance_metric;

  bool has(ParamName name) const;
  /// Scalar field by name; nullptr for the matrix/enum fields.
  const std::optional<double>* scalar(ParamName name) const;
  std::optional<double>* scalar(ParamName name);
};

}  // namespace dphls
