#pragma once

#include <Eigen/Core>

#include "roadflow/geometry.hpp"

namespace roadflow {

/// Linear-Gaussian state-space model. F drives the prediction, H projects the
/// state onto the measurement, Q and R are process / observation noise.
struct KalmanModel {
  Eigen::MatrixXd F;
  Eigen::MatrixXd H;
  Eigen::MatrixXd Q;
  Eigen::MatrixXd R;

  int state_dim() const { return static_cast<int>(F.rows()); }
  int measurement_dim() const { return static_cast<int>(H.rows()); }

  /// Throws ConfigError on inconsistent dimensions or asymmetric noise.
  void validate() const;
};

struct TrackState {
  Eigen::VectorXd x;
  Eigen::MatrixXd P;
};

/// x <- F x, P <- F P F^T + Q. The returned covariance is symmetrized.
TrackState kalman_predict(const TrackState& state, const KalmanModel& model);

/// Standard update: K = P H^T S^-1, x <- x + K(z - Hx), P <- (I - KH) P.
/// Throws NumericError when the innovation covariance is not invertible.
TrackState kalman_update(const TrackState& state, const Eigen::VectorXd& z,
                         const KalmanModel& model);

/// Squared Mahalanobis distance of measurement z from the state's predicted
/// measurement: d^T S^-1 d with d = z - Hx and S = H P H^T + R.
double mahalanobis_squared(const TrackState& state, const Eigen::VectorXd& z,
                           const KalmanModel& model);

// ---- Box motion model (constant velocity over cx, cy, area, aspect) ----

/// Noise magnitudes for the 8-state box model, scaled by box height at the
/// frame where the model is built.
struct MotionNoiseConfig {
  double position_weight = 1.0 / 20.0;
  double velocity_weight = 1.0 / 160.0;
  double area_weight = 1.0 / 20.0;       // relative to current area
  double aspect_sigma = 1e-2;            // aspect ratio is nearly constant
  double measurement_position_weight = 1.0 / 20.0;
  double measurement_area_weight = 1.0 / 20.0;
  double measurement_aspect_sigma = 1e-1;
  double initial_velocity_sigma_scale = 10.0;
};

constexpr int kBoxStateDim = 8;        // cx, cy, s, r + their velocities
constexpr int kBoxMeasurementDim = 4;  // cx, cy, s, r

Eigen::Vector4d box_to_measurement(const BoundingBox& box);
BoundingBox measurement_to_box(const Eigen::Vector4d& z);

/// Extracts the box described by the first four state components.
BoundingBox state_to_box(const TrackState& state);

/// Builds F, H, Q, R for one frame step given the current box height.
KalmanModel make_box_motion_model(double box_height,
                                  const MotionNoiseConfig& cfg);

/// Initial state for a fresh detection: zero velocities, covariance from the
/// measurement noise with inflated velocity uncertainty.
TrackState init_box_state(const BoundingBox& box, const MotionNoiseConfig& cfg);

}  // namespace roadflow
