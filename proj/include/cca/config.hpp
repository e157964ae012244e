#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cca/aggregate.hpp"
#include "cca/cost.hpp"
#include "cca/parabola.hpp"

namespace cca {

enum class Mode { kDpSmall, kStereoLarge };
enum class FilterKind { kBilateral, kGuided };

/// Full pipeline configuration. Defaults are the DSLR-A hyperparameter set;
/// presets dslr-a, dslr-b, phone and middlebury switch whole columns.
/// edge_sigma and sigma_luma are on the 0..255 intensity scale and are
/// applied to unit-range guides through intensity_scale.
struct Config {
  // matching
  CostMetric metric = CostMetric::kSad;
  double window_std = 8.0;
  double d_min = -12.0;
  double d_max = 6.0;

  // parabola initialization
  double t_q = 2.2;
  double t_a = 0.04;
  double epsilon = 1e-4;
  SubpixelKind subpixel = SubpixelKind::kParabola;
  double subpixel_offset = 0.0;

  // aggregation
  double penalty_p = 3.2;
  double edge_sigma = 3.25;
  int num_paths = 8;
  double p2 = 0.05;
  double t_prop = 1000.0;
  double t_edge = 0.5;
  double t_d = 0.1;
  double intensity_scale = 255.0;
  Mode mode = Mode::kDpSmall;

  // scales
  int num_scales = 3;
  std::vector<int> iterations = {3, 3, 2};  // index 0 = finest scale
  double prior_weight = 1.5;

  // pre-processing
  bool pre_vignetting = false;
  double vignetting_lpf_std = 32.0;
  bool pre_subtract_bilateral = false;
  double sb_spatial_std = 2.0;
  double sb_range_std = 0.1;

  // post-processing
  bool post_filter = false;
  double lr_tolerance = 1.0;
  int speckle_max_region = 64;
  double speckle_tol = 1.0;
  int median_radius = 2;
  FilterKind filter_kind = FilterKind::kBilateral;
  double sigma_luma = 4.0;
  double sigma_color = 4.0;  // kept for parity with the parameter table;
                             // unused with single-channel guides
  double sigma_xy = 32.0;
  double smooth_lambda = 512.0;
  int guided_radius = 37;
  double guided_eps = 0.2;

  // SGM baseline
  double sgm_p1 = 0.02;
  double sgm_p2 = 0.4;

  uint64_t seed = 1234;

  PenaltyParams penalty_params() const {
    PenaltyParams pp;
    pp.p = penalty_p;
    pp.sigma = edge_sigma;
    pp.p2 = p2;
    pp.t_prop = t_prop;
    pp.t_edge = t_edge;
    pp.t_d = t_d;
    pp.intensity_scale = intensity_scale;
    return pp;
  }
};

inline Config config_preset(const std::string& name) {
  Config c;  // dslr-a column
  if (name == "dslr-a") return c;
  if (name == "dslr-b") {
    c.penalty_p = 1.3;
    c.num_scales = 4;
    c.iterations = {2, 2, 3, 6};
    c.prior_weight = 2.5;
    c.edge_sigma = 3.0;
    c.t_a = 0.075;
    return c;
  }
  if (name == "phone") {
    c.window_std = 11.0;
    c.penalty_p = 7.0;
    c.num_scales = 2;
    c.iterations = {4, 4};
    c.prior_weight = 0.4;
    c.edge_sigma = 6.0;
    c.t_a = 0.01;
    c.d_min = -1.3;
    c.d_max = 0.5;
    c.subpixel = SubpixelKind::kHistEq;
    c.pre_vignetting = true;
    c.pre_subtract_bilateral = true;
    c.sigma_luma = 16.0;
    c.sigma_color = 8.0;
    c.sigma_xy = 8.0;
    c.smooth_lambda = 15.0;
    c.guided_radius = 7;
    c.guided_eps = 0.1;
    return c;
  }
  if (name == "middlebury") {
    c.window_std = 5.0;
    c.penalty_p = 1.0;
    c.num_scales = 1;
    c.iterations = {4};
    c.prior_weight = 0.0;  // not listed for this column: disabled
    c.edge_sigma = 3.0;
    c.t_a = 0.001;
    c.mode = Mode::kStereoLarge;
    c.d_min = 0.0;
    c.d_max = 64.0;
    c.sigma_luma = 16.0;
    c.sigma_color = 4.0;
    c.sigma_xy = 4.0;
    c.smooth_lambda = 1.0;
    return c;
  }
  throw ConfigError("unknown preset: " + name);
}

namespace detail {

inline std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': bad numeric value '" + v + "'");
  }
}

inline int parse_int(const std::string& key, const std::string& v) {
  double d = parse_double(key, v);
  int i = int(std::llround(d));
  if (double(i) != d)
    throw ConfigError("config key '" + key + "': expected integer, got '" + v + "'");
  return i;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "on" || v == "1") return true;
  if (v == "false" || v == "off" || v == "0") return false;
  throw ConfigError("config key '" + key + "': bad boolean value '" + v + "'");
}

inline std::vector<int> parse_int_list(const std::string& key,
                                       const std::string& v) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_int(key, trim(item)));
  if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
  return out;
}

}  // namespace detail

inline void apply_config_value(Config& c, const std::string& key,
                               const std::string& value) {
  using detail::parse_bool;
  using detail::parse_double;
  using detail::parse_int;
  using detail::parse_int_list;

  if (key == "preset") {
    c = config_preset(value);
  } else if (key == "metric") {
    if (value == "sad") c.metric = CostMetric::kSad;
    else if (value == "ssd") c.metric = CostMetric::kSsd;
    else if (value == "ncc") c.metric = CostMetric::kNcc;
    else throw ConfigError("config key 'metric': unknown value '" + value + "'");
  } else if (key == "window_std") c.window_std = parse_double(key, value);
  else if (key == "d_min") c.d_min = parse_double(key, value);
  else if (key == "d_max") c.d_max = parse_double(key, value);
  else if (key == "t_q") c.t_q = parse_double(key, value);
  else if (key == "t_a") c.t_a = parse_double(key, value);
  else if (key == "epsilon") c.epsilon = parse_double(key, value);
  else if (key == "subpixel") {
    if (value == "parabola") c.subpixel = SubpixelKind::kParabola;
    else if (value == "histeq") c.subpixel = SubpixelKind::kHistEq;
    else throw ConfigError("config key 'subpixel': unknown value '" + value + "'");
  } else if (key == "subpixel_offset") c.subpixel_offset = parse_double(key, value);
  else if (key == "penalty_p") c.penalty_p = parse_double(key, value);
  else if (key == "edge_sigma") c.edge_sigma = parse_double(key, value);
  else if (key == "num_paths") c.num_paths = parse_int(key, value);
  else if (key == "p2") c.p2 = parse_double(key, value);
  else if (key == "t_prop") c.t_prop = parse_double(key, value);
  else if (key == "t_edge") c.t_edge = parse_double(key, value);
  else if (key == "t_d") c.t_d = parse_double(key, value);
  else if (key == "intensity_scale") c.intensity_scale = parse_double(key, value);
  else if (key == "mode") {
    if (value == "dp-small") c.mode = Mode::kDpSmall;
    else if (value == "stereo-large") c.mode = Mode::kStereoLarge;
    else throw ConfigError("config key 'mode': unknown value '" + value + "'");
  } else if (key == "num_scales") c.num_scales = parse_int(key, value);
  else if (key == "iterations") c.iterations = parse_int_list(key, value);
  else if (key == "prior_weight") c.prior_weight = parse_double(key, value);
  else if (key == "pre_vignetting") c.pre_vignetting = parse_bool(key, value);
  else if (key == "vignetting_lpf_std") c.vignetting_lpf_std = parse_double(key, value);
  else if (key == "pre_subtract_bilateral") c.pre_subtract_bilateral = parse_bool(key, value);
  else if (key == "sb_spatial_std") c.sb_spatial_std = parse_double(key, value);
  else if (key == "sb_range_std") c.sb_range_std = parse_double(key, value);
  else if (key == "post_filter") c.post_filter = parse_bool(key, value);
  else if (key == "lr_tolerance") c.lr_tolerance = parse_double(key, value);
  else if (key == "speckle_max_region") c.speckle_max_region = parse_int(key, value);
  else if (key == "speckle_tol") c.speckle_tol = parse_double(key, value);
  else if (key == "median_radius") c.median_radius = parse_int(key, value);
  else if (key == "filter_kind") {
    if (value == "bilateral") c.filter_kind = FilterKind::kBilateral;
    else if (value == "guided") c.filter_kind = FilterKind::kGuided;
    else throw ConfigError("config key 'filter_kind': unknown value '" + value + "'");
  } else if (key == "sigma_luma") c.sigma_luma = parse_double(key, value);
  else if (key == "sigma_color") c.sigma_color = parse_double(key, value);
  else if (key == "sigma_xy") c.sigma_xy = parse_double(key, value);
  else if (key == "smooth_lambda") c.smooth_lambda = parse_double(key, value);
  else if (key == "guided_radius") c.guided_radius = parse_int(key, value);
  else if (key == "guided_eps") c.guided_eps = parse_double(key, value);
  else if (key == "sgm_p1") c.sgm_p1 = parse_double(key, value);
  else if (key == "sgm_p2") c.sgm_p2 = parse_double(key, value);
  else if (key == "seed") c.seed = uint64_t(parse_int(key, value));
  else throw ConfigError("unknown config key: " + key);
}

inline void validate_config(const Config& c) {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  if (c.window_std <= 0) fail("window_std must be positive");
  if (c.d_min > c.d_max) fail("d_min must not exceed d_max");
  if (c.t_q <= 1.0) fail("t_q must exceed 1");
  if (c.t_a < 0) fail("t_a must be non-negative");
  if (c.epsilon <= 0) fail("epsilon must be positive");
  if (c.penalty_p <= 0) fail("penalty_p must be positive");
  if (c.edge_sigma <= 0) fail("edge_sigma must be positive");
  if (c.num_paths != 4 && c.num_paths != 8) fail("num_paths must be 4 or 8");
  if (c.p2 <= 0 || c.p2 >= c.penalty_p) fail("p2 must satisfy 0 < p2 < penalty_p");
  if (c.num_scales < 1) fail("num_scales must be >= 1");
  if (int(c.iterations.size()) != c.num_scales)
    fail("iterations list length must equal num_scales");
  for (int it : c.iterations)
    if (it < 1) fail("iteration counts must be >= 1");
  if (c.prior_weight < 0) fail("prior_weight must be non-negative");
  if (std::abs(c.subpixel_offset) >= 0.5)
    fail("subpixel_offset must lie in (-0.5, 0.5)");
  if (c.sgm_p1 <= 0 || c.sgm_p2 < c.sgm_p1)
    fail("sgm penalties must satisfy 0 < sgm_p1 <= sgm_p2");
  if (c.median_radius < 1) fail("median_radius must be >= 1");
  if (c.speckle_max_region < 1) fail("speckle_max_region must be >= 1");
}

/// Flat key = value text; '#' starts a comment. A 'preset' key is applied
/// first regardless of position, then the remaining keys in file order.
inline Config parse_config_text(const std::string& text,
                                const Config& base = Config{}) {
  std::vector<std::pair<std::string, std::string>> kvs;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key = value");
    kvs.emplace_back(detail::trim(line.substr(0, eq)),
                     detail::trim(line.substr(eq + 1)));
  }
  Config c = base;
  for (const auto& [k, v] : kvs)
    if (k == "preset") apply_config_value(c, k, v);
  for (const auto& [k, v] : kvs)
    if (k != "preset") apply_config_value(c, k, v);
  validate_config(c);
  return c;
}

inline std::string serialize_config(const Config& c) {
  std::ostringstream os;
  os.precision(17);
  auto metric_name = [&] {
    switch (c.metric) {
      case CostMetric::kSad: return "sad";
      case CostMetric::kSsd: return "ssd";
      default: return "ncc";
    }
  };
  os << "metric = " << metric_name() << "\n";
  os << "window_std = " << c.window_std << "\n";
  os << "d_min = " << c.d_min << "\n";
  os << "d_max = " << c.d_max << "\n";
  os << "t_q = " << c.t_q << "\n";
  os << "t_a = " << c.t_a << "\n";
  os << "epsilon = " << c.epsilon << "\n";
  os << "subpixel = "
     << (c.subpixel == SubpixelKind::kParabola ? "parabola" : "histeq") << "\n";
  os << "subpixel_offset = " << c.subpixel_offset << "\n";
  os << "penalty_p = " << c.penalty_p << "\n";
  os << "edge_sigma = " << c.edge_sigma << "\n";
  os << "num_paths = " << c.num_paths << "\n";
  os << "p2 = " << c.p2 << "\n";
  os << "t_prop = " << c.t_prop << "\n";
  os << "t_edge = " << c.t_edge << "\n";
  os << "t_d = " << c.t_d << "\n";
  os << "intensity_scale = " << c.intensity_scale << "\n";
  os << "mode = " << (c.mode == Mode::kDpSmall ? "dp-small" : "stereo-large")
     << "\n";
  os << "num_scales = " << c.num_scales << "\n";
  os << "iterations = ";
  for (size_t i = 0; i < c.iterations.size(); ++i)
    os << (i ? "," : "") << c.iterations[i];
  os << "\n";
  os << "prior_weight = " << c.prior_weight << "\n";
  os << "pre_vignetting = " << (c.pre_vignetting ? "true" : "false") << "\n";
  os << "vignetting_lpf_std = " << c.vignetting_lpf_std << "\n";
  os << "pre_subtract_bilateral = "
     << (c.pre_subtract_bilateral ? "true" : "false") << "\n";
  os << "sb_spatial_std = " << c.sb_spatial_std << "\n";
  os << "sb_range_std = " << c.sb_range_std << "\n";
  os << "post_filter = " << (c.post_filter ? "true" : "false") << "\n";
  os << "lr_tolerance = " << c.lr_tolerance << "\n";
  os << "speckle_max_region = " << c.speckle_max_region << "\n";
  os << "speckle_tol = " << c.speckle_tol << "\n";
  os << "median_radius = " << c.median_radius << "\n";
  os << "filter_kind = "
     << (c.filter_kind == FilterKind::kBilateral ? "bilateral" : "guided")
     << "\n";
  os << "sigma_luma = " << c.sigma_luma << "\n";
  os << "sigma_color = " << c.sigma_color << "\n";
  os << "sigma_xy = " << c.sigma_xy << "\n";
  os << "smooth_lambda = " << c.smooth_lambda << "\n";
  os << "guided_radius = " << c.guided_radius << "\n";
  os << "guided_eps = " << c.guided_eps << "\n";
  os << "sgm_p1 = " << c.sgm_p1 << "\n";
  os << "sgm_p2 = " << c.sgm_p2 << "\n";
  os << "seed = " << c.seed << "\n";
  return os.str();
}

}  // namespace cca
