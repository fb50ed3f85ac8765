#pragma once

#include <Eigen/Dense>

namespace spa {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using VectorXd = Eigen::VectorXd;
using MatrixXd = Eigen::MatrixXd;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

/// Spatial separation (distance) and temporal separation (time steps).
/// Purely spatial families ignore the time component.
struct Lag {
  double h = 0.0;
  double u = 0.0;
};

}  // namespace spa
