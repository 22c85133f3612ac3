#pragma once

#include <functional>

#include <Eigen/Core>

namespace scalefit {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using ConstVectorRef = Eigen::Ref<const Eigen::VectorXd>;
using ConstMatrixRef = Eigen::Ref<const Eigen::MatrixXd>;

/// A scalar function of one input point, used for risks and distances.
using Predictor = std::function<double(ConstVectorRef)>;

/// Paired regression sample: one input row per observation.
struct Dataset {
  Matrix x;  // n x d
  Vector y;  // n

  Index n() const { return x.rows(); }
  Index dim() const { return x.cols(); }
};

}  // namespace scalefit
