#include "roadflow/mot_metrics.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <map>
#include <set>

#include "roadflow/assignment.hpp"
#include "roadflow/errors.hpp"

namespace roadflow {

namespace {

using FrameIndex = std::map<long, std::vector<const TrackRecord*>>;

FrameIndex index_by_frame(const std::vector<TrackRecord>& records) {
  FrameIndex index;
  for (const TrackRecord& r : records) {
    index[r.frame].push_back(&r);
  }
  return index;
}

}  // namespace

TrackingMetrics evaluate_tracking(const std::vector<TrackRecord>& ground_truth,
                                  const std::vector<TrackRecord>& hypotheses,
                                  double iou_threshold) {
  if (ground_truth.empty()) {
    throw DataError("evaluate_tracking: empty ground truth");
  }

  const FrameIndex gt_frames = index_by_frame(ground_truth);
  const FrameIndex hyp_frames = index_by_frame(hypotheses);

  std::set<long> frames;
  for (const auto& [f, _] : gt_frames) frames.insert(f);
  for (const auto& [f, _] : hyp_frames) frames.insert(f);

  TrackingMetrics metrics;
  metrics.total_gt = static_cast<int>(ground_truth.size());

  std::map<int, int> last_hyp_for_gt;  // gt id -> last matched hypothesis id
  // Per gt id: frames present, frames matched, whether the previous gt frame
  // was matched (for fragmentation counting).
  struct GtStats {
    int present = 0;
    int matched = 0;
    bool was_matched = false;
    bool in_gap = false;
  };
  std::map<int, GtStats> gt_stats;

  static const std::vector<const TrackRecord*> kNone;
  for (const long frame : frames) {
    const auto git = gt_frames.find(frame);
    const auto hit = hyp_frames.find(frame);
    const auto& gts = git != gt_frames.end() ? git->second : kNone;
    const auto& hyps = hit != hyp_frames.end() ? hit->second : kNone;

    std::vector<char> gt_taken(gts.size(), false);
    std::vector<char> hyp_taken(hyps.size(), false);
    std::vector<std::pair<int, int>> matched;  // (gt idx, hyp idx)

    // Carry over still-valid correspondences from earlier frames.
    for (std::size_t i = 0; i < gts.size(); ++i) {
      const auto prev = last_hyp_for_gt.find(gts[i]->track_id);
      if (prev == last_hyp_for_gt.end()) {
        continue;
      }
      for (std::size_t j = 0; j < hyps.size(); ++j) {
        if (!hyp_taken[j] && hyps[j]->track_id == prev->second &&
            iou(gts[i]->box(), hyps[j]->box()) >= iou_threshold) {
          gt_taken[i] = true;
          hyp_taken[j] = true;
          matched.emplace_back(static_cast<int>(i), static_cast<int>(j));
          break;
        }
      }
    }

    // Optimal assignment for what is left.
    std::vector<int> free_gt, free_hyp;
    for (std::size_t i = 0; i < gts.size(); ++i) {
      if (!gt_taken[i]) free_gt.push_back(static_cast<int>(i));
    }
    for (std::size_t j = 0; j < hyps.size(); ++j) {
      if (!hyp_taken[j]) free_hyp.push_back(static_cast<int>(j));
    }
    if (!free_gt.empty() && !free_hyp.empty()) {
      Eigen::MatrixXd cost(free_gt.size(), free_hyp.size());
      for (std::size_t a = 0; a < free_gt.size(); ++a) {
        for (std::size_t b = 0; b < free_hyp.size(); ++b) {
          cost(a, b) =
              1.0 - iou(gts[free_gt[a]]->box(), hyps[free_hyp[b]]->box());
        }
      }
      const Assignment assignment =
          hungarian_assign(cost, 1.0 - iou_threshold);
      for (const auto& [a, b] : assignment.pairs) {
        matched.emplace_back(free_gt[a], free_hyp[b]);
        gt_taken[free_gt[a]] = true;
        hyp_taken[free_hyp[b]] = true;
      }
    }

    for (const auto& [i, j] : matched) {
      const int gt_id = gts[i]->track_id;
      const int hyp_id = hyps[j]->track_id;
      const auto prev = last_hyp_for_gt.find(gt_id);
      if (prev != last_hyp_for_gt.end() && prev->second != hyp_id) {
        metrics.id_switches += 1;
      }
      last_hyp_for_gt[gt_id] = hyp_id;
    }

    metrics.misses +=
        static_cast<int>(std::count(gt_taken.begin(), gt_taken.end(), false));
    metrics.false_positives += static_cast<int>(
        std::count(hyp_taken.begin(), hyp_taken.end(), false));

    for (std::size_t i = 0; i < gts.size(); ++i) {
      GtStats& st = gt_stats[gts[i]->track_id];
      st.present += 1;
      if (gt_taken[i]) {
        st.matched += 1;
        if (st.in_gap) {
          metrics.fragmentations += 1;  // tracked -> lost -> tracked again
          st.in_gap = false;
        }
        st.was_matched = true;
      } else if (st.was_matched) {
        st.in_gap = true;
      }
    }
  }

  int mostly_tracked = 0;
  for (const auto& [_, st] : gt_stats) {
    if (st.present > 0 &&
        static_cast<double>(st.matched) / st.present >= 0.8) {
      mostly_tracked += 1;
    }
  }
  metrics.tracking_stability =
      gt_stats.empty() ? 0.0
                       : static_cast<double>(mostly_tracked) /
                             static_cast<double>(gt_stats.size());

  metrics.mota = 1.0 - static_cast<double>(metrics.misses +
                                           metrics.false_positives +
                                           metrics.id_switches) /
                           static_cast<double>(metrics.total_gt);
  return metrics;
}

}  // namespace roadflow
