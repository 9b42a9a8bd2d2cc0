// sfrc: scanning Fourier ring correlation toolkit.
//
// Subcommands: tune, scan, hoc, simulate, decompose, metrics. Every
// parameter can come from a JSON config file (--config); command-line
// flags override file values, which override built-in defaults.
// Exit codes: 0 success, 2 usage/config error, 3 data error, 4 internal.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sfrc/sfrc.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitInternal = 4;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config_path;
  std::string ref_path;
  std::string test_path;
  std::string input_path;
  std::string annotations_path;
  std::string output_dir = ".";

  int patch_size = 64;
  double frc_threshold = 0.5;
  double xht_fraction = -1.0;   // of Nyquist
  double xht_physical = -1.0;   // cycles per physical unit
  double bin_width = 0.0;       // normalized; 0 -> 1/patch_size
  bool non_strict = false;
  double epsilon = 0.001;

  double xht_min = 0.0;         // HOC sweep, Nyquist fractions
  double xht_max = 1.0;
  int hoc_steps = 50;

  std::string kind = "phantom";
  std::string phantom_kind = "texture";
  int size = 256;
  double pixel_size = 1.0;
  int factor = 4;
  int accel = 2;
  std::string angles = "";
  double dose = 1.0;
  double flux = 1e6;
  std::uint64_t seed = 0;

  std::string bands = "";       // "lo:hi,lo:hi" in Nyquist fractions
  double data_range = -1.0;
  bool infer_range = false;
  int hellinger_bins = 256;

  double window_center = 0.5;
  double window_width = 1.0;

  int threads = 1;
};

void apply_config_file(Options& o) {
  if (o.config_path.empty()) return;
  if (!fs::exists(o.config_path))
    throw ConfigError("config file not found: " + o.config_path);
  ordered_json doc;
  try {
    doc = ordered_json::parse(sfrc::io::detail::read_file(o.config_path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("invalid config JSON: " + std::string(e.what()));
  }
  auto get = [&doc](const char* key, auto& slot) {
    if (doc.contains(key)) slot = doc[key].get<std::decay_t<decltype(slot)>>();
  };
  get("ref", o.ref_path);
  get("test", o.test_path);
  get("input", o.input_path);
  get("annotations", o.annotations_path);
  get("output_dir", o.output_dir);
  get("patch_size", o.patch_size);
  get("frc_threshold", o.frc_threshold);
  get("xht_fraction", o.xht_fraction);
  get("xht_physical", o.xht_physical);
  get("bin_width", o.bin_width);
  get("non_strict", o.non_strict);
  get("epsilon", o.epsilon);
  get("xht_min", o.xht_min);
  get("xht_max", o.xht_max);
  get("hoc_steps", o.hoc_steps);
  get("kind", o.kind);
  get("phantom_kind", o.phantom_kind);
  get("size", o.size);
  get("pixel_size", o.pixel_size);
  get("factor", o.factor);
  get("accel", o.accel);
  get("angles", o.angles);
  get("dose", o.dose);
  get("flux", o.flux);
  get("seed", o.seed);
  get("bands", o.bands);
  get("data_range", o.data_range);
  get("infer_range", o.infer_range);
  get("hellinger_bins", o.hellinger_bins);
  get("window_center", o.window_center);
  get("window_width", o.window_width);
  get("threads", o.threads);
}

// ---- input loading ---------------------------------------------------------

std::vector<std::pair<std::string, sfrc::Image>> load_stack(
    const std::string& path, const char* what) {
  if (path.empty()) throw ConfigError(std::string("missing ") + what + " path");
  if (!fs::exists(path))
    throw ConfigError(std::string(what) + " path not found: " + path);
  std::vector<std::pair<std::string, sfrc::Image>> stack;
  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(path))
      if (entry.is_regular_file() && entry.path().extension() == ".sfrc")
        files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files)
      stack.emplace_back(f.stem().string(), sfrc::io::read_image(f.string()));
  } else {
    stack.emplace_back(fs::path(path).stem().string(),
                       sfrc::io::read_image(path));
  }
  if (stack.empty())
    throw ConfigError(std::string("no .sfrc images under ") + path);
  return stack;
}

std::vector<sfrc::ImagePair> load_pairs(const Options& o) {
  auto refs = load_stack(o.ref_path, "ref");
  auto tests = load_stack(o.test_path, "test");
  if (refs.size() != tests.size())
    throw sfrc::DimensionMismatch("ref and test stacks differ in length");
  std::vector<sfrc::ImagePair> pairs;
  pairs.reserve(refs.size());
  for (std::size_t i = 0; i < refs.size(); ++i) {
    sfrc::validate_pair(refs[i].second, tests[i].second);
    pairs.push_back({refs[i].first, std::move(refs[i].second),
                     std::move(tests[i].second)});
  }
  return pairs;
}

sfrc::SfrcConfig make_sfrc_config(const Options& o, bool need_xht) {
  sfrc::SfrcConfig cfg;
  cfg.patch_size = o.patch_size;
  cfg.frc_threshold = o.frc_threshold;
  cfg.bin_width = o.bin_width;
  cfg.strict_comparison = !o.non_strict;
  cfg.threads = o.threads;
  if (o.xht_fraction >= 0.0 && o.xht_physical >= 0.0)
    throw ConfigError("give either --xht-fraction or --xht-physical, not both");
  if (o.xht_fraction >= 0.0) {
    cfg.hallucination_threshold = o.xht_fraction * 0.5;
  } else if (o.xht_physical >= 0.0) {
    // cycles per physical unit -> normalized cycles/pixel via pixel size,
    // resolved against the ref stack when the scan runs
    cfg.hallucination_threshold = -1.0;  // sentinel, filled in later
  } else if (need_xht) {
    throw ConfigError("an x_ht is required: --xht-fraction or --xht-physical");
  }
  return cfg;
}

void resolve_physical_xht(sfrc::SfrcConfig& cfg, const Options& o,
                          double pixel_size) {
  if (cfg.hallucination_threshold >= 0.0) return;
  const double normalized = o.xht_physical * pixel_size;
  if (normalized > 0.5)
    throw ConfigError("--xht-physical exceeds the Nyquist frequency");
  cfg.hallucination_threshold = normalized;
}

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::vector<double> parse_angles(const std::string& spec,
                                 const std::string& fallback) {
  const std::string& s = spec.empty() ? fallback : spec;
  double start = 0, stop = 0, step = 0;
  if (std::sscanf(s.c_str(), "%lf:%lf:%lf", &start, &stop, &step) != 3)
    throw ConfigError("angles must be start:stop:step, got: " + s);
  try {
    return sfrc::angle_range(start, stop, step);
  } catch (const sfrc::Error& e) {
    throw ConfigError(e.what());
  }
}

std::vector<sfrc::BandSpec> parse_bands(const std::string& spec) {
  if (spec.empty()) return sfrc::standard_bands();
  std::vector<sfrc::BandSpec> bands;
  std::size_t pos = 0;
  while (pos < spec.size()) {
    std::size_t comma = spec.find(',', pos);
    if (comma == std::string::npos) comma = spec.size();
    double lo = 0, hi = 0;
    if (std::sscanf(spec.substr(pos, comma - pos).c_str(), "%lf:%lf", &lo,
                    &hi) != 2)
      throw ConfigError("bands must be lo:hi[,lo:hi...] in Nyquist fractions");
    try {
      bands.emplace_back(lo * 0.5, hi * 0.5);
    } catch (const sfrc::Error& e) {
      throw ConfigError(e.what());
    }
    pos = comma + 1;
  }
  return bands;
}

void ensure_output_dir(const Options& o) {
  fs::create_directories(o.output_dir);
}

std::string out_path(const Options& o, const std::string& name) {
  return (fs::path(o.output_dir) / name).string();
}

// ---- subcommands ------------------------------------------------------------

int cmd_tune(const Options& o) {
  if (o.annotations_path.empty())
    throw ConfigError("tune requires --annotations");
  if (!fs::exists(o.annotations_path))
    throw ConfigError("annotation file not found: " + o.annotations_path);
  const auto annotations = sfrc::io::read_annotations(o.annotations_path);
  const auto pairs = load_pairs(o);
  auto cfg = make_sfrc_config(o, /*need_xht=*/false);

  const auto tuned = sfrc::tune_x_ht(pairs, annotations, cfg, o.epsilon);
  if (tuned.clamped)
    std::cerr << "warning: an annotated patch is indistinguishable from a "
                 "faithful one; x_ht clamped to Nyquist\n";

  ensure_output_dir(o);
  ordered_json doc;
  doc["tool"] = sfrc::io::kToolVersion;
  doc["x_ht"] = tuned.x_ht;
  doc["x_ht_nyquist_fraction"] = tuned.x_ht / 0.5;
  doc["epsilon"] = o.epsilon;
  doc["clamped"] = tuned.clamped;
  doc["contributions"] = ordered_json::array();
  for (const auto& c : tuned.contributions) {
    ordered_json jc;
    jc["image_id"] = c.image_id;
    jc["row"] = c.grid_row;
    jc["col"] = c.grid_col;
    jc["x_ct"] = c.x_ct;
    doc["contributions"].push_back(std::move(jc));
  }
  sfrc::io::detail::atomic_write(out_path(o, "tuning_report.json"),
                                 doc.dump(2) + "\n");
  std::cout << fmt(tuned.x_ht) << "\n";
  return kExitOk;
}

int cmd_scan(const Options& o) {
  const auto pairs = load_pairs(o);
  auto cfg = make_sfrc_config(o, /*need_xht=*/true);
  resolve_physical_xht(cfg, o, pairs.front().ref.pixel_size());
  ensure_output_dir(o);

  int total = 0, flagged = 0;
  for (const auto& pair : pairs) {
    const auto report = sfrc::scan(pair.ref, pair.test, cfg);
    total += report.n_patches;
    flagged += report.n_hallucinated;
    sfrc::io::write_report(report, cfg,
                           out_path(o, pair.id + "_report.json"));
    sfrc::io::render_overlay(pair.test, report,
                             {o.window_center, o.window_width},
                             out_path(o, pair.id + "_overlay.png"));
  }
  ordered_json agg;
  agg["tool"] = sfrc::io::kToolVersion;
  agg["n_images"] = pairs.size();
  agg["n_patches"] = total;
  agg["n_hallucinated"] = flagged;
  agg["hallucination_rate"] = static_cast<double>(flagged) / total;
  sfrc::io::detail::atomic_write(out_path(o, "aggregate.json"),
                                 agg.dump(2) + "\n");
  std::cout << "patches " << total << " hallucinated " << flagged << " rate "
            << fmt(static_cast<double>(flagged) / total) << "\n";
  return kExitOk;
}

int cmd_hoc(const Options& o) {
  const auto pairs = load_pairs(o);
  auto cfg = make_sfrc_config(o, /*need_xht=*/false);
  if (!(o.xht_min < o.xht_max))
    throw ConfigError("need xht_min < xht_max (Nyquist fractions)");
  ensure_output_dir(o);
  sfrc::HocCurve hoc;
  try {
    hoc = sfrc::hoc_curve(pairs, cfg, o.xht_min * 0.5, o.xht_max * 0.5,
                          o.hoc_steps);
  } catch (const sfrc::InvalidRange& e) {
    throw ConfigError(e.what());
  }
  sfrc::io::write_hoc_curve(hoc, out_path(o, "hoc.csv"));
  ordered_json doc;
  doc["tool"] = sfrc::io::kToolVersion;
  doc["au_hoc"] = hoc.au_hoc;
  sfrc::io::detail::atomic_write(out_path(o, "au_hoc.json"),
                                 doc.dump(2) + "\n");
  std::cout << fmt(hoc.au_hoc) << "\n";
  return kExitOk;
}

int cmd_simulate(const Options& o) {
  ensure_output_dir(o);
  const auto kind = o.kind;

  sfrc::Image ref = [&] {
    if (!o.input_path.empty()) {
      if (!fs::exists(o.input_path))
        throw ConfigError("input not found: " + o.input_path);
      return sfrc::io::read_image(o.input_path);
    }
    return sfrc::make_phantom(sfrc::phantom_kind_from_string(o.phantom_kind),
                              o.size, o.seed, o.pixel_size)
        .image;
  }();

  if (kind == "phantom") {
    sfrc::io::write_image(ref, out_path(o, "phantom.sfrc"));
    std::cout << "phantom " << ref.width() << "x" << ref.height() << "\n";
    return kExitOk;
  }
  if (kind == "blur") {
    sfrc::io::write_image(ref, out_path(o, "ref.sfrc"));
    sfrc::io::write_image(sfrc::downsample_upsample(ref, o.factor),
                          out_path(o, "degraded.sfrc"));
    std::cout << "blur factor " << o.factor << "\n";
    return kExitOk;
  }
  if (kind == "kspace") {
    sfrc::io::write_image(ref, out_path(o, "ref.sfrc"));
    sfrc::io::write_image(sfrc::kspace_undersample(ref, o.accel),
                          out_path(o, "degraded.sfrc"));
    std::cout << "kspace acceleration " << o.accel << "\n";
    return kExitOk;
  }

  // tomographic kinds share the forward-projection step
  const int n_det =
      static_cast<int>(std::ceil(std::hypot(ref.width(), ref.height()))) | 1;
  if (kind == "missing_wedge") {
    const auto angles = parse_angles(o.angles, "30:150:2");
    const auto sino = sfrc::radon(ref, angles, n_det);
    sfrc::io::write_image(ref, out_path(o, "ref.sfrc"));
    sfrc::io::write_sinogram(sino, out_path(o, "sino.sfrc"));
    sfrc::io::write_image(sfrc::fbp(sino, ref.width()),
                          out_path(o, "recon.sfrc"));
    std::cout << "missing_wedge angles " << angles.size() << "\n";
    return kExitOk;
  }
  if (kind == "distortion") {
    const auto angles = parse_angles(o.angles, "0:360:0.5");
    // impose a 10-degree angular mismatch: backproject over [0, 350) by
    // rescaling the forward angles
    std::vector<double> bp = angles;
    for (double& a : bp) a *= 350.0 / 360.0;
    const auto sino = sfrc::radon(ref, angles, n_det);
    sfrc::io::write_image(ref, out_path(o, "ref.sfrc"));
    sfrc::io::write_sinogram(sino, out_path(o, "sino.sfrc"));
    sfrc::io::write_image(sfrc::fbp(sino, ref.width(), &bp),
                          out_path(o, "recon.sfrc"));
    std::cout << "distortion angles " << angles.size() << "\n";
    return kExitOk;
  }
  if (kind == "noise") {
    const auto angles = parse_angles(o.angles, "0:180:1");
    auto sino = sfrc::radon(ref, angles, n_det);
    sino = sfrc::add_noise(sino, o.dose, o.flux, o.seed);
    sfrc::io::write_image(ref, out_path(o, "ref.sfrc"));
    sfrc::io::write_sinogram(sino, out_path(o, "sino.sfrc"));
    sfrc::io::write_image(sfrc::fbp(sino, ref.width()),
                          out_path(o, "recon.sfrc"));
    std::cout << "noise dose " << fmt(o.dose) << "\n";
    return kExitOk;
  }
  throw ConfigError("unknown simulation kind: " + kind);
}

int cmd_decompose(const Options& o) {
  if (o.input_path.empty()) throw ConfigError("decompose requires --input");
  if (!fs::exists(o.input_path))
    throw ConfigError("input not found: " + o.input_path);
  const auto img = sfrc::io::read_image(o.input_path);
  const auto bands = parse_bands(o.bands);
  const auto parts = sfrc::decompose(img, bands);
  ensure_output_dir(o);
  const std::string stem = fs::path(o.input_path).stem().string();
  for (std::size_t i = 0; i < parts.size(); ++i) {
    char suffix[64];
    std::snprintf(suffix, sizeof(suffix), "_band%02zu_%g-%g.sfrc", i,
                  bands[i].low / 0.5, bands[i].high / 0.5);
    sfrc::io::write_image(parts[i], out_path(o, stem + suffix));
  }
  std::cout << parts.size() << " band components written\n";
  return kExitOk;
}

int cmd_metrics(const Options& o) {
  const auto pairs = load_pairs(o);
  ensure_output_dir(o);
  ordered_json rows = ordered_json::array();
  for (const auto& pair : pairs) {
    double range = o.data_range;
    if (range <= 0.0) {
      if (!o.infer_range)
        throw ConfigError("give --data-range or pass --infer-range");
      range = sfrc::infer_data_range(pair.ref, pair.test);
    }
    const auto rep =
        sfrc::compare(pair.ref, pair.test, range, o.hellinger_bins);
    ordered_json row;
    row["image_id"] = pair.id;
    row["psnr"] = std::isinf(rep.psnr) ? ordered_json("inf")
                                       : ordered_json(rep.psnr);
    row["ssim"] = rep.ssim;
    row["hellinger"] = rep.hellinger;
    rows.push_back(std::move(row));
    std::cout << pair.id << " psnr " << fmt(rep.psnr) << " ssim "
              << fmt(rep.ssim) << " hellinger " << fmt(rep.hellinger) << "\n";
  }
  ordered_json doc;
  doc["tool"] = sfrc::io::kToolVersion;
  doc["metrics"] = std::move(rows);
  sfrc::io::detail::atomic_write(out_path(o, "metrics.json"),
                                 doc.dump(2) + "\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scanning Fourier ring correlation toolkit"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "JSON config file");
    sub->add_option("--output-dir", o.output_dir, "output directory");
    sub->add_option("--threads", o.threads, "worker thread count");
    sub->add_option("--seed", o.seed, "seed for stochastic steps");
  };
  auto add_scan_params = [&](CLI::App* sub) {
    sub->add_option("--ref", o.ref_path, "reference image or directory");
    sub->add_option("--test", o.test_path, "test image or directory");
    sub->add_option("--patch-size", o.patch_size, "patch side length");
    sub->add_option("--frc-threshold", o.frc_threshold, "FRC threshold Y");
    sub->add_option("--bin-width", o.bin_width,
                    "ring bin width, cycles/pixel (0 = 1/patch)");
    sub->add_flag("--non-strict", o.non_strict,
                  "label with x_ct <= x_ht instead of <");
  };

  auto* tune = app.add_subcommand("tune", "tune x_ht from annotations");
  add_common(tune);
  add_scan_params(tune);
  tune->add_option("--annotations", o.annotations_path, "annotation JSON");
  tune->add_option("--epsilon", o.epsilon, "margin added above max x_ct");

  auto* scan = app.add_subcommand("scan", "scan an image pair stack");
  add_common(scan);
  add_scan_params(scan);
  scan->add_option("--xht-fraction", o.xht_fraction,
                   "hallucination threshold as a fraction of Nyquist");
  scan->add_option("--xht-physical", o.xht_physical,
                   "hallucination threshold in cycles per physical unit");
  scan->add_option("--window-center", o.window_center, "display window L");
  scan->add_option("--window-width", o.window_width, "display window W");

  auto* hoc = app.add_subcommand("hoc", "hallucination operating curve");
  add_common(hoc);
  add_scan_params(hoc);
  hoc->add_option("--xht-min", o.xht_min, "sweep start, Nyquist fraction");
  hoc->add_option("--xht-max", o.xht_max, "sweep end, Nyquist fraction");
  hoc->add_option("--steps", o.hoc_steps, "number of sweep points");

  auto* simulate = app.add_subcommand("simulate", "synthetic degradations");
  add_common(simulate);
  simulate->add_option(
      "--kind", o.kind,
      "phantom | blur | kspace | missing_wedge | distortion | noise");
  simulate->add_option("--input", o.input_path,
                       "source image (default: generated phantom)");
  simulate->add_option("--phantom-kind", o.phantom_kind,
                       "ellipses | texture | checker");
  simulate->add_option("--size", o.size, "phantom side length");
  simulate->add_option("--pixel-size", o.pixel_size, "physical pixel size");
  simulate->add_option("--factor", o.factor, "blur downsampling factor");
  simulate->add_option("--accel", o.accel, "k-space acceleration");
  simulate->add_option("--angles", o.angles, "start:stop:step in degrees");
  simulate->add_option("--dose", o.dose, "dose fraction in (0, 1]");
  simulate->add_option("--flux", o.flux, "incident photon flux");

  auto* decompose = app.add_subcommand("decompose", "bandpass decomposition");
  add_common(decompose);
  decompose->add_option("--input", o.input_path, "image to decompose");
  decompose->add_option("--bands", o.bands,
                        "lo:hi[,lo:hi...] in Nyquist fractions");

  auto* metrics = app.add_subcommand("metrics", "PSNR / SSIM / Hellinger");
  add_common(metrics);
  metrics->add_option("--ref", o.ref_path, "reference image or directory");
  metrics->add_option("--test", o.test_path, "test image or directory");
  metrics->add_option("--data-range", o.data_range, "intensity data range");
  metrics->add_flag("--infer-range", o.infer_range,
                    "infer data range from the joint min-max");
  metrics->add_option("--bins", o.hellinger_bins, "histogram bin count");

  // Two-pass parse: the first pass picks up --config, the file fills in
  // values, the second pass lets explicit flags win over the file.
  try {
    app.parse(argc, argv);
    apply_config_file(o);
    if (!o.config_path.empty()) {
      app.clear();
      app.parse(argc, argv);
    }
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (tune->parsed()) return cmd_tune(o);
    if (scan->parsed()) return cmd_scan(o);
    if (hoc->parsed()) return cmd_hoc(o);
    if (simulate->parsed()) return cmd_simulate(o);
    if (decompose->parsed()) return cmd_decompose(o);
    if (metrics->parsed()) return cmd_metrics(o);
    std::cerr << "error: no subcommand\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const sfrc::NoAnnotations& e) {
    std::cerr << "error: no annotations\n";
    return kExitData;
  } catch (const sfrc::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const sfrc::InvalidRange& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const sfrc::InvalidThreshold& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const sfrc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
