#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sfrc/core.hpp"
#include "sfrc/degrade.hpp"
#include "sfrc/frc.hpp"
#include "sfrc/png.hpp"
#include "sfrc/scanner.hpp"

namespace sfrc::io {

class BadMagic : public Error {
 public:
  using Error::Error;
};
class TruncatedPayload : public Error {
 public:
  using Error::Error;
};
class IoFailure : public Error {
 public:
  using Error::Error;
};

using json = nlohmann::ordered_json;

namespace detail {

/// Shortest decimal string that round-trips the double exactly.
inline std::string fmt_double(double v) {
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  return buf;
}

inline std::string fmt_sig9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

/// Write-temp-then-rename so a crashed run never leaves a torn file.
inline void atomic_write(const std::string& path, const std::string& bytes) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure("cannot open for writing: " + tmp);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoFailure("write failed: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoFailure("rename failed: " + path + ": " + ec.message());
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open: " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  return bytes;
}

}  // namespace detail

// ---- raw image format -----------------------------------------------------
// Header line: `SFRC1 <width> <height> <pixel_size>\n`, then width*height
// little-endian float32 values, row-major.

inline void write_image(const Image& img, const std::string& path) {
  std::string bytes = "SFRC1 " + std::to_string(img.width()) + " " +
                      std::to_string(img.height()) + " " +
                      detail::fmt_double(img.pixel_size()) + "\n";
  const std::size_t n = img.data().size();
  std::vector<float> payload(n);
  for (std::size_t i = 0; i < n; ++i)
    payload[i] = static_cast<float>(img.data()[i]);
  static_assert(sizeof(float) == 4);
  bytes.append(reinterpret_cast<const char*>(payload.data()), 4 * n);
  detail::atomic_write(path, bytes);
}

inline Image read_image(const std::string& path) {
  const std::string bytes = detail::read_file(path);
  if (bytes.rfind("SFRC1 ", 0) != 0) throw BadMagic("bad magic in " + path);
  const std::size_t eol = bytes.find('\n');
  if (eol == std::string::npos) throw BadMagic("missing header line");
  int w = 0, h = 0;
  double ps = 0.0;
  if (std::sscanf(bytes.c_str() + 6, "%d %d %lf", &w, &h, &ps) != 3)
    throw BadMagic("unparsable header in " + path);
  if (w < 1 || h < 1 || !(ps > 0.0)) throw BadMagic("invalid header fields");
  const std::size_t n = static_cast<std::size_t>(w) * h;
  if (bytes.size() - eol - 1 < 4 * n)
    throw TruncatedPayload("payload shorter than header claims: " + path);
  std::vector<double> data(n);
  const char* p = bytes.data() + eol + 1;
  for (std::size_t i = 0; i < n; ++i) {
    float f;
    std::memcpy(&f, p + 4 * i, 4);
    data[i] = f;
  }
  return Image(w, h, ps, std::move(data));
}

/// 16-bit binary PGM (P5) import for phantom interchange.
inline Image read_pgm16(const std::string& path, double pixel_size) {
  const std::string bytes = detail::read_file(path);
  int w = 0, h = 0, maxval = 0;
  int consumed = 0;
  if (std::sscanf(bytes.c_str(), "P5 %d %d %d%n", &w, &h, &maxval,
                  &consumed) != 3)
    throw BadMagic("not a binary PGM: " + path);
  if (maxval < 256 || maxval > 65535)
    throw BadMagic("expected 16-bit PGM (maxval in [256, 65535])");
  const std::size_t n = static_cast<std::size_t>(w) * h;
  const std::size_t off = static_cast<std::size_t>(consumed) + 1;
  if (bytes.size() - off < 2 * n) throw TruncatedPayload("short PGM payload");
  std::vector<double> data(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto hi = static_cast<unsigned char>(bytes[off + 2 * i]);
    const auto lo = static_cast<unsigned char>(bytes[off + 2 * i + 1]);
    data[i] = static_cast<double>((hi << 8) | lo) / maxval;
  }
  return Image(w, h, pixel_size, std::move(data));
}

// ---- curves ---------------------------------------------------------------

inline void write_frc_curve(const FrcCurve& curve, const std::string& path) {
  std::string out = "frequency,value,pixel_count\n";
  for (int k = 0; k < curve.axis.n_rings; ++k) {
    out += detail::fmt_sig9(curve.axis.ring_center(k));
    out += ',';
    out += detail::fmt_sig9(curve.values[k]);
    out += ',';
    out += std::to_string(curve.ring_pixel_counts[k]);
    out += '\n';
  }
  detail::atomic_write(path, out);
}

inline void write_hoc_curve(const HocCurve& hoc, const std::string& path) {
  std::string out = "x_ht,rate\n";
  for (std::size_t i = 0; i < hoc.thresholds.size(); ++i) {
    out += detail::fmt_sig9(hoc.thresholds[i]);
    out += ',';
    out += detail::fmt_sig9(hoc.rates[i]);
    out += '\n';
  }
  detail::atomic_write(path, out);
}

// ---- annotations ----------------------------------------------------------

inline AnnotationSet read_annotations(const std::string& path) {
  json doc;
  try {
    doc = json::parse(detail::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw IoFailure("invalid annotation JSON: " + std::string(e.what()));
  }
  AnnotationSet set;
  if (!doc.contains("boxes") || !doc["boxes"].is_array())
    throw IoFailure("annotation file missing 'boxes' array");
  for (const auto& b : doc["boxes"]) {
    AnnotationBox box;
    box.image_id = b.at("image_id").get<std::string>();
    box.x = b.at("x").get<int>();
    box.y = b.at("y").get<int>();
    box.w = b.at("w").get<int>();
    box.h = b.at("h").get<int>();
    if (b.contains("label")) box.label = b["label"].get<std::string>();
    if (box.w < 1 || box.h < 1)
      throw IoFailure("annotation box must have w, h >= 1");
    set.boxes.push_back(std::move(box));
  }
  return set;
}

inline void write_annotations(const AnnotationSet& set,
                              const std::string& path) {
  json doc;
  doc["boxes"] = json::array();
  for (const auto& b : set.boxes) {
    json jb;
    jb["image_id"] = b.image_id;
    jb["x"] = b.x;
    jb["y"] = b.y;
    jb["w"] = b.w;
    jb["h"] = b.h;
    jb["label"] = b.label;
    doc["boxes"].push_back(std::move(jb));
  }
  detail::atomic_write(path, doc.dump(2) + "\n");
}

// ---- reports --------------------------------------------------------------

inline constexpr const char* kToolVersion = "sfrc 1.0.0";

inline json report_to_json(const SfrcReport& report, const SfrcConfig& cfg) {
  json doc;
  doc["tool"] = kToolVersion;
  json jc;
  jc["patch_size"] = cfg.patch_size;
  jc["frc_threshold"] = cfg.frc_threshold;
  jc["hallucination_threshold"] = cfg.hallucination_threshold;
  jc["bin_width"] = cfg.bin_width;
  jc["strict_comparison"] = cfg.strict_comparison;
  doc["config"] = std::move(jc);
  doc["n_patches"] = report.n_patches;
  doc["n_hallucinated"] = report.n_hallucinated;
  doc["hallucination_rate"] = report.hallucination_rate;
  doc["patches"] = json::array();
  for (const auto& p : report.patches) {
    json jp;
    jp["row"] = p.grid_row;
    jp["col"] = p.grid_col;
    jp["x"] = p.origin_x;
    jp["y"] = p.origin_y;
    jp["x_ct"] = p.x_ct;
    jp["crossed"] = p.crossed;
    jp["low_content"] = p.low_content;
    jp["hallucinated"] = p.hallucinated;
    doc["patches"].push_back(std::move(jp));
  }
  return doc;
}

inline void write_report(const SfrcReport& report, const SfrcConfig& cfg,
                         const std::string& path) {
  detail::atomic_write(path, report_to_json(report, cfg).dump(2) + "\n");
}

inline SfrcReport read_report(const std::string& path) {
  json doc = json::parse(detail::read_file(path));
  SfrcReport report;
  report.n_patches = doc.at("n_patches").get<int>();
  report.n_hallucinated = doc.at("n_hallucinated").get<int>();
  report.hallucination_rate = doc.at("hallucination_rate").get<double>();
  report.patch_size = doc.at("config").at("patch_size").get<int>();
  for (const auto& jp : doc.at("patches")) {
    PatchRecord p;
    p.grid_row = jp.at("row").get<int>();
    p.grid_col = jp.at("col").get<int>();
    p.origin_x = jp.at("x").get<int>();
    p.origin_y = jp.at("y").get<int>();
    p.x_ct = jp.at("x_ct").get<double>();
    p.crossed = jp.at("crossed").get<bool>();
    p.low_content = jp.at("low_content").get<bool>();
    p.hallucinated = jp.at("hallucinated").get<bool>();
    report.patches.push_back(p);
  }
  return report;
}

// ---- overlay rendering ----------------------------------------------------

struct DisplayWindow {
  double center = 0.5;  // L
  double width = 1.0;   // W; displayed range is [L - W/2, L + W/2]
};

/// Window-mapped grayscale PNG with a 1-pixel red rectangle around every
/// hallucinated patch. Output bytes are deterministic for fixed inputs.
inline void render_overlay(const Image& img, const SfrcReport& report,
                           DisplayWindow window, const std::string& path) {
  const int w = img.width(), h = img.height();
  for (const auto& p : report.patches)
    if (p.origin_x + report.patch_size > w ||
        p.origin_y + report.patch_size > h)
      throw DimensionMismatch("report does not match image dimensions");
  if (!(window.width > 0.0)) throw InvalidArgument("window width must be > 0");

  const double lo = window.center - window.width / 2.0;
  std::vector<std::uint8_t> rgb(static_cast<std::size_t>(w) * h * 3);
  for (std::size_t i = 0; i < img.data().size(); ++i) {
    const double t = (img.data()[i] - lo) / window.width * 255.0;
    const auto v = static_cast<std::uint8_t>(std::clamp(t, 0.0, 255.0));
    rgb[3 * i] = rgb[3 * i + 1] = rgb[3 * i + 2] = v;
  }

  auto set_red = [&](int x, int y) {
    const std::size_t i = (static_cast<std::size_t>(y) * w + x) * 3;
    rgb[i] = 255;
    rgb[i + 1] = 0;
    rgb[i + 2] = 0;
  };
  const int ps = report.patch_size;
  for (const auto& p : report.patches) {
    if (!p.hallucinated) continue;
    for (int x = p.origin_x; x < p.origin_x + ps; ++x) {
      set_red(x, p.origin_y);
      set_red(x, p.origin_y + ps - 1);
    }
    for (int y = p.origin_y; y < p.origin_y + ps; ++y) {
      set_red(p.origin_x, y);
      set_red(p.origin_x + ps - 1, y);
    }
  }

  const auto bytes = png::encode_rgb(rgb, w, h);
  detail::atomic_write(
      path, std::string(reinterpret_cast<const char*>(bytes.data()),
                        bytes.size()));
}

// ---- sinogram sidecar -----------------------------------------------------

inline void write_sinogram(const Sinogram& sino, const std::string& path) {
  // raw payload reuses the image container: n_angles rows x n_detectors cols
  Image as_image(sino.n_detectors, sino.n_angles, sino.pixel_size, sino.data);
  write_image(as_image, path);
  json meta;
  meta["n_angles"] = sino.n_angles;
  meta["n_detectors"] = sino.n_detectors;
  meta["pixel_size"] = sino.pixel_size;
  meta["angles"] = sino.angles;
  detail::atomic_write(path + ".json", meta.dump(2) + "\n");
}

inline Sinogram read_sinogram(const std::string& path) {
  const Image as_image = read_image(path);
  json meta = json::parse(detail::read_file(path + ".json"));
  Sinogram sino;
  sino.n_angles = meta.at("n_angles").get<int>();
  sino.n_detectors = meta.at("n_detectors").get<int>();
  sino.pixel_size = meta.at("pixel_size").get<double>();
  sino.angles = meta.at("angles").get<std::vector<double>>();
  sino.data = as_image.data();
  if (as_image.width() != sino.n_detectors ||
      as_image.height() != sino.n_angles)
    throw DimensionMismatch("sinogram sidecar disagrees with payload");
  return sino;
}

}  // namespace sfrc::io
