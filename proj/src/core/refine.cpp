#include "core/refine.hpp"

#include <algorithm>

namespace amap {

void RefineConfig::validate() const {
  if (!(vol_min > 0.0) || !(vol_min < vol_max))
    throw_config("refine: need 0 < vol_min < vol_max");
  if (containment_margin < 0.0)
    throw_config("refine: containment_margin must be >= 0");
  if (!(volume_ratio_max > 1.0))
    throw_config("refine: volume_ratio_max must be > 1");
  if (app_min < 1) throw_config("refine: app_min must be >= 1");
}

bool valid_object(const BoundingVolume3D& v, const RefineConfig& cfg) {
  double vol = v.aabb_volume();
  return vol >= cfg.vol_min && vol <= cfg.vol_max;
}

bool volume_contains(const BoundingVolume3D& a, const BoundingVolume3D& b,
                     const RefineConfig& cfg) {
  if (a.class_id != b.class_id) return false;
  double m = cfg.containment_margin;
  bool nested = (b.aabb_min.array() >= a.aabb_min.array() - m).all() &&
                (b.aabb_max.array() <= a.aabb_max.array() + m).all();
  if (!nested) return false;
  double vb = b.aabb_volume();
  if (vb <= 0.0) return false;
  return a.aabb_volume() / vb <= cfg.volume_ratio_max;
}

BoundingVolume3D merge_volumes(const BoundingVolume3D& a,
                               const BoundingVolume3D& b) {
  if (a.class_id != b.class_id)
    throw_pipeline("merge_volumes: class mismatch");
  // Ties keep a's geometry, so merge(a, b) with a the earlier-indexed operand
  // is deterministic.
  const BoundingVolume3D& big = (b.aabb_volume() > a.aabb_volume()) ? b : a;
  BoundingVolume3D out = big;
  out.appearances = a.appearances + b.appearances;
  out.source_frames.clear();
  out.source_frames.reserve(a.source_frames.size() + b.source_frames.size());
  out.source_frames.insert(out.source_frames.end(), a.source_frames.begin(),
                           a.source_frames.end());
  out.source_frames.insert(out.source_frames.end(), b.source_frames.begin(),
                           b.source_frames.end());
  std::sort(out.source_frames.begin(), out.source_frames.end());
  out.source_frames.erase(
      std::unique(out.source_frames.begin(), out.source_frames.end()),
      out.source_frames.end());
  out.member_points.clear();
  out.member_points.reserve(a.member_points.size() + b.member_points.size());
  out.member_points.insert(out.member_points.end(), a.member_points.begin(),
                           a.member_points.end());
  out.member_points.insert(out.member_points.end(), b.member_points.begin(),
                           b.member_points.end());
  std::sort(out.member_points.begin(), out.member_points.end());
  out.member_points.erase(
      std::unique(out.member_points.begin(), out.member_points.end()),
      out.member_points.end());
  return out;
}

RefineResult refine(std::vector<BoundingVolume3D> volumes,
                    const RefineConfig& cfg) {
  cfg.validate();
  RefineResult res;
  res.report.stage_counts[0] = volumes.size();

  // Stage 1: validity filter.
  std::vector<BoundingVolume3D> kept;
  kept.reserve(volumes.size());
  for (BoundingVolume3D& v : volumes) {
    if (valid_object(v, cfg))
      kept.push_back(std::move(v));
    else
      ++res.report.removals["stage1_volume_bounds"];
  }
  res.report.stage_counts[1] = kept.size();

  // Stage 2: containment merge, passes until a full pass makes no merge.
  // Each merge removes one volume, so this terminates.
  bool merged_any = true;
  while (merged_any) {
    merged_any = false;
    for (size_t i = 0; i < kept.size(); ++i) {
      for (size_t j = 0; j < kept.size();) {
        if (j == i) {
          ++j;
          continue;
        }
        if (volume_contains(kept[i], kept[j], cfg) ||
            volume_contains(kept[j], kept[i], cfg)) {
          // v keeps its slot, v' is removed; the earlier-indexed operand
          // wins ties inside merge_volumes.
          kept[i] = (i < j) ? merge_volumes(kept[i], kept[j])
                            : merge_volumes(kept[j], kept[i]);
          kept.erase(kept.begin() + static_cast<long>(j));
          if (j < i) --i;
          ++res.report.removals["stage2_merged"];
          merged_any = true;
        } else {
          ++j;
        }
      }
    }
  }
  res.report.stage_counts[2] = kept.size();

  // Stage 3: appearance filter.
  std::vector<BoundingVolume3D> final_set;
  final_set.reserve(kept.size());
  for (BoundingVolume3D& v : kept) {
    if (v.appearances >= cfg.app_min)
      final_set.push_back(std::move(v));
    else
      ++res.report.removals["stage3_appearances"];
  }
  res.report.stage_counts[3] = final_set.size();
  res.volumes = std::move(final_set);
  return res;
}

}  // namespace amap
