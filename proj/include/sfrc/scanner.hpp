#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "sfrc/core.hpp"
#include "sfrc/frc.hpp"
#include "sfrc/parallel.hpp"

namespace sfrc {

class PatchTooLarge : public Error {
 public:
  using Error::Error;
};
class UnknownImageId : public Error {
 public:
  using Error::Error;
};
class NoAnnotations : public Error {
 public:
  using Error::Error;
};
class AllAnnotatedPatchesLowContent : public Error {
 public:
  using Error::Error;
};
class InvalidRange : public Error {
 public:
  using Error::Error;
};

/// Deterministic row-major tiling. Interior patches abut exactly; a final
/// row/column that would overhang is anchored flush to the image edge,
/// overlapping its neighbor, so every pixel is covered.
struct PatchGrid {
  int patch_size = 0;
  int n_rows = 0;
  int n_cols = 0;
  std::vector<std::pair<int, int>> origins;  // (x, y), row-major

  int n_patches() const { return n_rows * n_cols; }
};

inline PatchGrid make_grid(int width, int height, int patch_size) {
  if (!valid_patch_size(patch_size))
    throw InvalidArgument("patch size must be even and >= 8");
  if (patch_size > width || patch_size > height)
    throw PatchTooLarge("patch size exceeds image dimensions");
  PatchGrid g;
  g.patch_size = patch_size;
  g.n_cols = (width + patch_size - 1) / patch_size;
  g.n_rows = (height + patch_size - 1) / patch_size;
  g.origins.reserve(static_cast<std::size_t>(g.n_rows) * g.n_cols);
  for (int r = 0; r < g.n_rows; ++r) {
    const int y = std::min(r * patch_size, height - patch_size);
    for (int c = 0; c < g.n_cols; ++c) {
      const int x = std::min(c * patch_size, width - patch_size);
      g.origins.emplace_back(x, y);
    }
  }
  return g;
}

struct SfrcConfig {
  int patch_size = 64;
  double frc_threshold = 0.5;          // Y
  double hallucination_threshold = 0.0;  // x_ht, normalized [0, 0.5]
  double bin_width = 0.0;              // 0 -> 1/patch_size
  bool strict_comparison = true;       // x_ct < x_ht vs <=
  bool tukey_window = false;
  int threads = 1;

  void validate() const {
    if (!valid_patch_size(patch_size))
      throw InvalidArgument("patch size must be even and >= 8");
    if (!(frc_threshold >= 0.0 && frc_threshold <= 1.0))
      throw InvalidThreshold("FRC threshold must be in [0, 1]");
    if (!(hallucination_threshold >= 0.0 && hallucination_threshold <= 0.5))
      throw InvalidArgument("x_ht must be in [0, 0.5]");
    if (bin_width < 0.0) throw ZeroBinWidth("bin_width must be >= 0");
  }
};

struct PatchRecord {
  int grid_row = 0;
  int grid_col = 0;
  int origin_x = 0;
  int origin_y = 0;
  double x_ct = 0.5;
  bool crossed = false;
  bool low_content = false;
  bool hallucinated = false;
};

struct SfrcReport {
  std::vector<PatchRecord> patches;
  int patch_size = 0;
  int n_patches = 0;
  int n_hallucinated = 0;
  double hallucination_rate = 0.0;
};

namespace detail {

inline FrcOptions frc_options(const SfrcConfig& cfg) {
  FrcOptions o;
  o.bin_width = cfg.bin_width;
  o.tukey_window = cfg.tukey_window;
  return o;
}

/// Per-patch x_ct pass shared by scan, tuning, and the HOC sweep.
inline std::vector<PatchRecord> compute_records(const Image& ref,
                                                const Image& test,
                                                const SfrcConfig& cfg) {
  validate_pair(ref, test);
  cfg.validate();
  const PatchGrid grid = make_grid(ref.width(), ref.height(), cfg.patch_size);
  std::vector<PatchRecord> records(grid.origins.size());
  const FrcOptions opts = frc_options(cfg);
  parallel_for(grid.origins.size(), cfg.threads, [&](std::size_t i) {
    const auto [x, y] = grid.origins[i];
    const int r = static_cast<int>(i) / grid.n_cols;
    const int c = static_cast<int>(i) % grid.n_cols;
    const Patch pr = extract_patch(ref, x, y, cfg.patch_size, r, c);
    const Patch pt = extract_patch(test, x, y, cfg.patch_size, r, c);
    const FrcCurve curve = frc(pr, pt, opts);
    const ThresholdCrossing tc = threshold_crossing(curve, cfg.frc_threshold);
    PatchRecord rec;
    rec.grid_row = r;
    rec.grid_col = c;
    rec.origin_x = x;
    rec.origin_y = y;
    rec.x_ct = tc.x_ct;
    rec.crossed = tc.crossed;
    rec.low_content = curve.low_content;
    records[i] = rec;
  });
  return records;
}

inline bool label_hallucinated(const PatchRecord& rec, double x_ht,
                               bool strict) {
  if (rec.low_content) return false;
  return strict ? rec.x_ct < x_ht : rec.x_ct <= x_ht;
}

}  // namespace detail

/// Scans complementary patch pairs over the grid, labels each patch
/// hallucinated when its x_ct falls below x_ht, and aggregates the rate.
/// Low-content patches stay in the denominator but are never labeled.
inline SfrcReport scan(const Image& ref, const Image& test,
                       const SfrcConfig& cfg) {
  SfrcReport report;
  report.patch_size = cfg.patch_size;
  report.patches = detail::compute_records(ref, test, cfg);
  report.n_patches = static_cast<int>(report.patches.size());
  for (auto& rec : report.patches) {
    rec.hallucinated = detail::label_hallucinated(
        rec, cfg.hallucination_threshold, cfg.strict_comparison);
    if (rec.hallucinated) ++report.n_hallucinated;
  }
  report.hallucination_rate =
      static_cast<double>(report.n_hallucinated) / report.n_patches;
  return report;
}

struct AnnotationBox {
  std::string image_id;
  int x = 0, y = 0, w = 0, h = 0;
  std::string label;
};

struct AnnotationSet {
  std::vector<AnnotationBox> boxes;
};

struct ImagePair {
  std::string id;
  Image ref;
  Image test;
};

struct TuneResult {
  double x_ht = 0.0;
  bool clamped = false;  // some annotated patch was indistinguishable (x_ct = 0.5)
  // One entry per annotated patch that contributed to the max.
  struct Contribution {
    std::string image_id;
    int grid_row = 0, grid_col = 0;
    double x_ct = 0.5;
  };
  std::vector<Contribution> contributions;
};

namespace detail {

/// A patch "contains" a box when their intersection covers >= 25% of the
/// box area, or the box lies fully inside the patch.
inline bool patch_overlaps_box(int px, int py, int psize,
                               const AnnotationBox& b) {
  const int ix0 = std::max(px, b.x);
  const int iy0 = std::max(py, b.y);
  const int ix1 = std::min(px + psize, b.x + b.w);
  const int iy1 = std::min(py + psize, b.y + b.h);
  if (ix0 >= ix1 || iy0 >= iy1) return false;
  const long long inter =
      static_cast<long long>(ix1 - ix0) * (iy1 - iy0);
  const long long area = static_cast<long long>(b.w) * b.h;
  const bool fully_inside = b.x >= px && b.y >= py &&
                            b.x + b.w <= px + psize &&
                            b.y + b.h <= py + psize;
  return fully_inside || inter * 4 >= area;
}

}  // namespace detail

/// Tunes the hallucination threshold from expert annotations: x_ht is the
/// maximum x_ct over all annotated patches plus epsilon, clamped to 0.5.
inline TuneResult tune_x_ht(const std::vector<ImagePair>& pairs,
                            const AnnotationSet& annotations,
                            const SfrcConfig& cfg, double epsilon = 0.001) {
  if (annotations.boxes.empty()) throw NoAnnotations("no annotations");
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be > 0");
  cfg.validate();

  TuneResult result;
  double max_x_ct = -1.0;
  for (const auto& pair : pairs) validate_pair(pair.ref, pair.test);

  // Records computed once per image that actually carries annotations.
  for (const auto& pair : pairs) {
    bool any = false;
    for (const auto& b : annotations.boxes) any = any || b.image_id == pair.id;
    if (!any) continue;
    const auto records = detail::compute_records(pair.ref, pair.test, cfg);
    const PatchGrid grid =
        make_grid(pair.ref.width(), pair.ref.height(), cfg.patch_size);
    for (const auto& b : annotations.boxes) {
      if (b.image_id != pair.id) continue;
      if (b.w < 1 || b.h < 1 || b.x < 0 || b.y < 0 ||
          b.x + b.w > pair.ref.width() || b.y + b.h > pair.ref.height())
        throw InvalidArgument("annotation box outside image bounds");
      for (std::size_t i = 0; i < records.size(); ++i) {
        const auto [px, py] = grid.origins[i];
        if (!detail::patch_overlaps_box(px, py, cfg.patch_size, b)) continue;
        if (records[i].low_content) continue;
        result.contributions.push_back({pair.id, records[i].grid_row,
                                        records[i].grid_col, records[i].x_ct});
        max_x_ct = std::max(max_x_ct, records[i].x_ct);
      }
    }
  }
  for (const auto& b : annotations.boxes) {
    bool found = false;
    for (const auto& pair : pairs) found = found || pair.id == b.image_id;
    if (!found) throw UnknownImageId("unknown image_id: " + b.image_id);
  }
  if (result.contributions.empty())
    throw AllAnnotatedPatchesLowContent(
        "every annotated patch is low-content");

  result.x_ht = max_x_ct + epsilon;
  if (result.x_ht > 0.5) {
    result.x_ht = 0.5;
    result.clamped = true;
  }
  return result;
}

struct HocCurve {
  std::vector<double> thresholds;  // ascending x_ht values
  std::vector<double> rates;       // hallucination rate per threshold
  double au_hoc = 0.0;             // trapezoidal area, normalized by span
};

/// Sweeps x_ht over [x_ht_min, x_ht_max]; x_ct values are computed once
/// and reused across thresholds.
inline HocCurve hoc_curve(const std::vector<ImagePair>& pairs,
                          const SfrcConfig& cfg, double x_ht_min,
                          double x_ht_max, int n_steps) {
  if (!(x_ht_min < x_ht_max) || x_ht_max > 0.5 || x_ht_min < 0.0)
    throw InvalidRange("need 0 <= x_ht_min < x_ht_max <= 0.5");
  if (n_steps < 2) throw InvalidRange("n_steps must be >= 2");
  cfg.validate();

  std::vector<PatchRecord> all;
  for (const auto& pair : pairs) {
    auto recs = detail::compute_records(pair.ref, pair.test, cfg);
    all.insert(all.end(), recs.begin(), recs.end());
  }
  if (all.empty()) throw InvalidArgument("no image pairs");

  HocCurve hoc;
  hoc.thresholds.resize(n_steps);
  hoc.rates.resize(n_steps);
  for (int i = 0; i < n_steps; ++i) {
    const double t =
        x_ht_min + (x_ht_max - x_ht_min) * i / static_cast<double>(n_steps - 1);
    int count = 0;
    for (const auto& rec : all)
      if (detail::label_hallucinated(rec, t, cfg.strict_comparison)) ++count;
    hoc.thresholds[i] = t;
    hoc.rates[i] = static_cast<double>(count) / static_cast<double>(all.size());
  }
  double area = 0.0;
  for (int i = 1; i < n_steps; ++i)
    area += 0.5 * (hoc.rates[i] + hoc.rates[i - 1]) *
            (hoc.thresholds[i] - hoc.thresholds[i - 1]);
  hoc.au_hoc = area / (x_ht_max - x_ht_min);
  return hoc;
}

}  // namespace sfrc
