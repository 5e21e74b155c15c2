#include "roadflow/kalman.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "roadflow/errors.hpp"

namespace roadflow {

namespace {

void require(bool ok, const char* what) {
  if (!ok) {
    throw ConfigError(std::string("KalmanModel: ") + what);
  }
}

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

}  // namespace

void KalmanModel::validate() const {
  const auto d = F.rows();
  const auto m = H.rows();
  require(F.cols() == d, "F must be square");
  require(H.cols() == d, "H columns must match state dimension");
  require(Q.rows() == d && Q.cols() == d, "Q must be d x d");
  require(R.rows() == m && R.cols() == m, "R must be m x m");
  require(Q.isApprox(Q.transpose(), 1e-9), "Q must be symmetric");
  require(R.isApprox(R.transpose(), 1e-9), "R must be symmetric");
}

TrackState kalman_predict(const TrackState& state, const KalmanModel& model) {
  if (state.x.size() != model.state_dim() ||
      state.P.rows() != model.state_dim()) {
    throw ConfigError("kalman_predict: state/model dimension mismatch");
  }
  TrackState out;
  out.x = model.F * state.x;
  out.P = symmetrized(model.F * state.P * model.F.transpose() + model.Q);
  return out;
}

namespace {

/// Innovation covariance with a solvability check; shared by update and
/// Mahalanobis distance.
Eigen::LDLT<Eigen::MatrixXd> innovation_ldlt(const TrackState& state,
                                             const KalmanModel& model) {
  const Eigen::MatrixXd s = symmetrized(
      model.H * state.P * model.H.transpose() + model.R);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(s);
  const double min_d = ldlt.vectorD().minCoeff();
  const double max_d = ldlt.vectorD().maxCoeff();
  if (ldlt.info() != Eigen::Success || min_d <= 0.0 ||
      !std::isfinite(min_d)) {
    std::ostringstream msg;
    msg << "singular innovation covariance (diag range [" << min_d << ", "
        << max_d << "])";
    throw NumericError(msg.str());
  }
  return ldlt;
}

}  // namespace

TrackState kalman_update(const TrackState& state, const Eigen::VectorXd& z,
                         const KalmanModel& model) {
  if (z.size() != model.measurement_dim()) {
    throw ConfigError("kalman_update: measurement dimension mismatch");
  }
  const auto ldlt = innovation_ldlt(state, model);
  // K = P H^T S^-1, computed as the solution of S K^T = H P.
  const Eigen::MatrixXd k =
      ldlt.solve(model.H * state.P).transpose();
  const Eigen::VectorXd innovation = z - model.H * state.x;

  TrackState out;
  out.x = state.x + k * innovation;
  const Eigen::MatrixXd identity =
      Eigen::MatrixXd::Identity(model.state_dim(), model.state_dim());
  out.P = symmetrized((identity - k * model.H) * state.P);
  return out;
}

double mahalanobis_squared(const TrackState& state, const Eigen::VectorXd& z,
                           const KalmanModel& model) {
  if (z.size() != model.measurement_dim()) {
    throw ConfigError("mahalanobis_squared: measurement dimension mismatch");
  }
  const auto ldlt = innovation_ldlt(state, model);
  const Eigen::VectorXd d = z - model.H * state.x;
  return d.dot(ldlt.solve(d));
}

Eigen::Vector4d box_to_measurement(const BoundingBox& box) {
  return {box.cx, box.cy, box.w * box.h, box.w / box.h};
}

BoundingBox measurement_to_box(const Eigen::Vector4d& z) {
  BoundingBox box;
  box.cx = z(0);
  box.cy = z(1);
  const double area = std::max(z(2), 1e-9);
  const double aspect = std::max(z(3), 1e-9);
  box.w = std::sqrt(area * aspect);
  box.h = std::sqrt(area / aspect);
  return box;
}

BoundingBox state_to_box(const TrackState& state) {
  return measurement_to_box(state.x.head<4>());
}

KalmanModel make_box_motion_model(double box_height,
                                  const MotionNoiseConfig& cfg) {
  const double h = std::max(box_height, 1.0);
  const double area = h * h;  // noise scale proxy for the area component

  KalmanModel model;
  model.F = Eigen::MatrixXd::Identity(kBoxStateDim, kBoxStateDim);
  for (int i = 0; i < kBoxMeasurementDim; ++i) {
    model.F(i, i + kBoxMeasurementDim) = 1.0;
  }
  model.H = Eigen::MatrixXd::Zero(kBoxMeasurementDim, kBoxStateDim);
  model.H.leftCols(kBoxMeasurementDim).setIdentity();

  Eigen::VectorXd q(kBoxStateDim);
  const double sp = cfg.position_weight * h;
  const double sa = cfg.area_weight * area;
  const double sv = cfg.velocity_weight * h;
  const double sva = cfg.velocity_weight * area;
  q << sp * sp, sp * sp, sa * sa, cfg.aspect_sigma * cfg.aspect_sigma,
      sv * sv, sv * sv, sva * sva,
      cfg.aspect_sigma * cfg.aspect_sigma * 0.01;
  model.Q = q.asDiagonal();

  Eigen::VectorXd r(kBoxMeasurementDim);
  const double mp = cfg.measurement_position_weight * h;
  const double ma = cfg.measurement_area_weight * area;
  r << mp * mp, mp * mp, ma * ma,
      cfg.measurement_aspect_sigma * cfg.measurement_aspect_sigma;
  model.R = r.asDiagonal();
  return model;
}

TrackState init_box_state(const BoundingBox& box,
                          const MotionNoiseConfig& cfg) {
  const KalmanModel model = make_box_motion_model(box.h, cfg);
  TrackState state;
  state.x = Eigen::VectorXd::Zero(kBoxStateDim);
  state.x.head<4>() = box_to_measurement(box);
  Eigen::VectorXd p(kBoxStateDim);
  const double vel_scale =
      cfg.initial_velocity_sigma_scale * cfg.initial_velocity_sigma_scale;
  p.head<4>() = model.R.diagonal();
  p.tail<4>() = model.R.diagonal() * vel_scale;
  state.P = p.asDiagonal();
  return state;
}

}  // namespace roadflow
