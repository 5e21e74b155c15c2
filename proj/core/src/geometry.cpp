#include "roadflow/geometry.hpp"

#include <algorithm>
#include <numeric>

namespace roadflow {

namespace {

double intersection_area(const BoundingBox& a, const BoundingBox& b) {
  const double x1 = std::max(a.left(), b.left());
  const double y1 = std::max(a.top(), b.top());
  const double x2 = std::min(a.right(), b.right());
  const double y2 = std::min(a.bottom(), b.bottom());
  if (x2 <= x1 || y2 <= y1) {
    return 0.0;
  }
  return (x2 - x1) * (y2 - y1);
}

/// Area from the same corner expressions the intersection uses, so identical
/// boxes give exactly IoU 1 / zero loss despite center-format rounding.
double corner_area(const BoundingBox& b) {
  return (b.right() - b.left()) * (b.bottom() - b.top());
}

/// Squared center distance over squared enclosing diagonal. Zero diagonal can
/// only happen for two identical degenerate points; the penalty is 0 there.
double center_penalty(const BoundingBox& a, const BoundingBox& b) {
  const double ex = std::max(a.right(), b.right()) - std::min(a.left(), b.left());
  const double ey =
      std::max(a.bottom(), b.bottom()) - std::min(a.top(), b.top());
  const double diag_sq = ex * ex + ey * ey;
  if (diag_sq <= 0.0) {
    return 0.0;
  }
  const double dx = a.cx - b.cx;
  const double dy = a.cy - b.cy;
  return (dx * dx + dy * dy) / diag_sq;
}

}  // namespace

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double inter = intersection_area(a, b);
  if (inter <= 0.0) {
    return 0.0;
  }
  const double uni = corner_area(a) + corner_area(b) - inter;
  return inter / uni;
}

double giou_loss(const BoundingBox& pred, const BoundingBox& gt) {
  const double inter = intersection_area(pred, gt);
  const double uni = corner_area(pred) + corner_area(gt) - inter;
  const double ex =
      std::max(pred.right(), gt.right()) - std::min(pred.left(), gt.left());
  const double ey =
      std::max(pred.bottom(), gt.bottom()) - std::min(pred.top(), gt.top());
  const double enclosing = ex * ey;
  const double overlap = uni > 0.0 ? inter / uni : 0.0;
  const double slack = enclosing > 0.0 ? (enclosing - uni) / enclosing : 0.0;
  return 1.0 - overlap + slack;
}

double diou_loss(const BoundingBox& pred, const BoundingBox& gt) {
  return 1.0 - iou(pred, gt) + center_penalty(pred, gt);
}

double diou_overlap(const BoundingBox& a, const BoundingBox& b) {
  return iou(a, b) - center_penalty(a, b);
}

std::vector<BoundingBox> diou_nms(const std::vector<BoundingBox>& boxes,
                                  double conf_threshold,
                                  double nms_threshold) {
  std::vector<std::size_t> order;
  order.reserve(boxes.size());
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    if (boxes[i].confidence >= conf_threshold) {
      order.push_back(i);
    }
  }
  // Descending confidence, ties by input index.
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t lhs, std::size_t rhs) {
                     return boxes[lhs].confidence > boxes[rhs].confidence;
                   });

  std::vector<BoundingBox> kept;
  for (const std::size_t idx : order) {
    bool suppressed = false;
    for (const BoundingBox& k : kept) {
      if (diou_overlap(k, boxes[idx]) > nms_threshold) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) {
      kept.push_back(boxes[idx]);
    }
  }
  return kept;
}

}  // namespace roadflow
