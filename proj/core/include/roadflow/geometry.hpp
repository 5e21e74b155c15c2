#pragma once

#include <vector>

namespace roadflow {

/// Axis-aligned box in pixel coordinates, center format. Center format keeps
/// the DIoU center-distance term free of repeated conversions.
struct BoundingBox {
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;
  double confidence = 1.0;
  int class_id = 0;

  double left() const { return cx - 0.5 * w; }
  double right() const { return cx + 0.5 * w; }
  double top() const { return cy - 0.5 * h; }
  double bottom() const { return cy + 0.5 * h; }
  double area() const { return w * h; }

  bool valid() const { return w > 0.0 && h > 0.0; }
};

/// Intersection over union, in [0, 1]. Degenerate overlap returns 0.
double iou(const BoundingBox& a, const BoundingBox& b);

/// 1 - IoU + |C \ (A u B)| / |C| with C the smallest enclosing box. In [0, 2).
double giou_loss(const BoundingBox& pred, const BoundingBox& gt);

/// 1 - IoU + d^2(centers) / c^2 with c the enclosing-box diagonal. In [0, 2).
double diou_loss(const BoundingBox& pred, const BoundingBox& gt);

/// IoU - d^2(centers) / c^2, the suppression score used by diou_nms.
double diou_overlap(const BoundingBox& a, const BoundingBox& b);

/// Greedy non-maximum suppression on the DIoU-adjusted overlap. Boxes below
/// conf_threshold are dropped first; remaining boxes are kept in descending
/// confidence order, suppressing any box whose diou_overlap with an already
/// kept box exceeds nms_threshold. Confidence ties keep the earlier input box.
std::vector<BoundingBox> diou_nms(const std::vector<BoundingBox>& boxes,
                                  double conf_threshold,
                                  double nms_threshold);

}  // namespace roadflow
