// cca — continuous cost aggregation disparity CLI.
// Subcommands: run (CCA), sgm (baseline), eval (metrics),
// calibrate-histeq (sub-pixel offset calibration), synth (test pairs).

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "cca/colormap.hpp"
#include "cca/image_io.hpp"
#include "cca/metrics.hpp"
#include "cca/pfm.hpp"
#include "cca/pipeline.hpp"
#include "cca/synthetic.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct DatasetEntry {
  std::string left, right, gt, gt_conf, id;
};

struct CommonArgs {
  std::string preset = "dslr-a";
  std::string config_file;
  std::vector<std::string> overrides;
  std::string out_dir = ".";
};

cca::Config build_config(const CommonArgs& args) {
  cca::Config cfg = cca::config_preset(args.preset);
  if (!args.config_file.empty()) {
    std::ifstream in(args.config_file);
    if (!in.good())
      throw cca::InputError("cannot open config file: " + args.config_file);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    cfg = cca::parse_config_text(text, cfg);
  }
  for (const std::string& kv : args.overrides) {
    size_t eq = kv.find('=');
    if (eq == std::string::npos)
      throw cca::ConfigError("--set expects key=value, got '" + kv + "'");
    cca::apply_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  cca::validate_config(cfg);
  return cfg;
}

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--preset", args.preset,
                  "parameter preset: dslr-a, dslr-b, phone, middlebury");
  cmd->add_option("--config", args.config_file, "key = value config file");
  cmd->add_option("--set", args.overrides, "override single keys (key=value)");
  cmd->add_option("--out", args.out_dir, "output directory");
}

std::vector<DatasetEntry> resolve_entries(const std::string& left,
                                          const std::string& right,
                                          const std::string& gt,
                                          const std::string& gt_conf,
                                          const std::string& list_file,
                                          const std::string& id) {
  std::vector<DatasetEntry> entries;
  if (!list_file.empty()) {
    std::ifstream in(list_file);
    if (!in.good()) throw cca::InputError("cannot open list file: " + list_file);
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
      std::istringstream ss(line);
      DatasetEntry e;
      if (!(ss >> e.left >> e.right)) continue;
      ss >> e.gt >> e.gt_conf;
      e.id = "entry" + std::to_string(n++);
      entries.push_back(e);
    }
  } else {
    if (left.empty() || right.empty())
      throw cca::InputError("need --left and --right (or --list)");
    entries.push_back({left, right, gt, gt_conf, id});
  }
  for (const DatasetEntry& e : entries) {
    if (!fs::exists(e.left)) throw cca::InputError("missing file: " + e.left);
    if (!fs::exists(e.right)) throw cca::InputError("missing file: " + e.right);
    if (!e.gt.empty() && !fs::exists(e.gt))
      throw cca::InputError("missing file: " + e.gt);
  }
  return entries;
}

void write_disparity_outputs(const fs::path& out_dir, const std::string& id,
                             const cca::DisparityMap& disp) {
  fs::create_directories(out_dir);
  cca::write_pfm((out_dir / (id + "_disp.pfm")).string(), disp);
  cca::ColorizedDisparity color = cca::colorize_disparity(disp);
  cca::save_png_rgb((out_dir / (id + "_disp.png")).string(), color.rgb,
                    disp.width, disp.height);
  std::ofstream side(out_dir / (id + "_disp_range.txt"));
  side << "colormap = viridis\n"
       << "min = " << color.min_value << "\n"
       << "max = " << color.max_value << "\n";
}

int cmd_run(const CommonArgs& common, const std::string& left,
            const std::string& right, const std::string& list_file,
            const std::string& id, bool use_sgm) {
  cca::Config cfg = build_config(common);
  auto entries = resolve_entries(left, right, "", "", list_file, id);
  for (const DatasetEntry& e : entries) {
    cca::Image l = cca::load_image_gray(e.left);
    cca::Image r = cca::load_image_gray(e.right);
    if (!l.same_size(r))
      throw cca::InputError("pair dimensions differ: " + e.left + " vs " +
                            e.right);
    cca::DisparityMap disp =
        use_sgm ? cca::run_sgm(l, r, cfg) : cca::run_cca(l, r, cfg);
    write_disparity_outputs(common.out_dir, e.id, disp);
    std::cout << e.id << ": wrote " << e.id << "_disp.pfm ("
              << disp.width << "x" << disp.height << ")\n";
  }
  return 0;
}

json report_to_json(const cca::MetricReport& r, bool with_stereo) {
  json j;
  j["ai1"] = r.ai1;
  j["ai2"] = r.ai2;
  j["one_minus_abs_spearman"] = r.one_minus_abs_spearman;
  j["geometric_mean"] = r.geometric_mean;
  if (with_stereo) {
    json bad;
    for (const auto& [t, v] : r.bad_px) {
      std::ostringstream key;
      key << t;
      bad[key.str()] = v;
    }
    j["bad_px"] = bad;
    j["rmse"] = r.rmse;
  }
  return j;
}

void print_report(std::ostream& os, const cca::MetricReport& r,
                  bool with_stereo) {
  os << "ai1 = " << r.ai1 << "\n";
  os << "ai2 = " << r.ai2 << "\n";
  os << "one_minus_abs_spearman = " << r.one_minus_abs_spearman << "\n";
  os << "geometric_mean = " << r.geometric_mean << "\n";
  if (with_stereo) {
    for (const auto& [t, v] : r.bad_px) os << "bad_px_" << t << " = " << v << "\n";
    os << "rmse = " << r.rmse << "\n";
  }
}

int cmd_eval(const CommonArgs& common, const std::string& est_path,
             const std::string& gt_path, const std::string& conf_path,
             const std::string& list_file, const std::string& id,
             bool stereo) {
  auto entries = resolve_entries(est_path, gt_path, "", conf_path, list_file, id);
  fs::create_directories(common.out_dir);

  cca::MetricReport total;
  int n = 0;
  json all = json::array();
  for (const DatasetEntry& e : entries) {
    // for eval entries, "left" holds the estimate and "right" the gt
    cca::DisparityMap est = cca::read_pfm_disparity(e.left);
    cca::DisparityMap gt = cca::read_pfm_disparity(e.right);
    std::optional<cca::Image> conf;
    const std::string conf_file = list_file.empty() ? conf_path : e.gt;
    if (!conf_file.empty()) conf = cca::load_image_gray(conf_file);

    cca::MetricReport r = cca::evaluate_dp(est, gt, conf ? &*conf : nullptr);
    if (stereo) {
      std::vector<uint8_t> mask(gt.valid.begin(), gt.valid.end());
      cca::StereoMetrics sm = cca::stereo_metrics(est, gt, mask);
      r.bad_px = sm.bad_px;
      r.rmse = sm.rmse;
    }
    print_report(std::cout, r, stereo);

    std::ofstream txt(fs::path(common.out_dir) / (e.id + "_metrics.txt"));
    print_report(txt, r, stereo);
    json j = report_to_json(r, stereo);
    j["id"] = e.id;
    std::ofstream js(fs::path(common.out_dir) / (e.id + "_metrics.json"));
    js << j.dump(2) << "\n";
    all.push_back(j);

    total.ai1 += r.ai1;
    total.ai2 += r.ai2;
    total.one_minus_abs_spearman += r.one_minus_abs_spearman;
    total.rmse += r.rmse;
    ++n;
  }
  if (n > 1) {
    total.ai1 /= n;
    total.ai2 /= n;
    total.one_minus_abs_spearman /= n;
    total.rmse /= n;
    total.geometric_mean =
        std::cbrt(total.ai1 * total.ai2 * total.one_minus_abs_spearman);
    json agg;
    agg["entries"] = all;
    agg["mean"] = report_to_json(total, false);
    std::ofstream js(fs::path(common.out_dir) / "dataset_metrics.json");
    js << agg.dump(2) << "\n";
  }
  return 0;
}

int cmd_synth(const CommonArgs& common, int width, int height, double shift,
              const std::string& field, double blur, uint64_t seed) {
  cca::Config cfg = build_config(common);
  cca::Image shift_map(width, height, float(shift));
  if (field == "ramp") {
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x)
        shift_map(x, y) = float(shift * x / std::max(1, width - 1));
  } else if (field == "smooth") {
    shift_map = cca::make_smooth_field(width, height, seed + 1, shift);
  } else if (field != "constant") {
    throw cca::ConfigError("--field must be constant, ramp or smooth");
  }

  std::optional<cca::Image> blur_map;
  if (blur > 0) {
    blur_map = cca::Image(width, height);
    for (size_t i = 0; i < blur_map->size(); ++i)
      blur_map->data[i] = float(blur * std::abs(shift_map.data[i]) /
                                std::max(1e-6, std::abs(shift)));
  }

  cca::SyntheticPair pair = cca::generate_synthetic_pair(
      width, height, shift_map, blur_map ? &*blur_map : nullptr, seed,
      cfg.d_min, cfg.d_max);

  fs::path out(common.out_dir);
  fs::create_directories(out);
  cca::write_pfm((out / "left.pfm").string(), pair.left);
  cca::write_pfm((out / "right.pfm").string(), pair.right);
  cca::write_pfm((out / "gt.pfm").string(), pair.gt);
  std::cout << "wrote left.pfm right.pfm gt.pfm (" << width << "x" << height
            << ", seed " << seed << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"continuous cost aggregation disparity toolkit"};
  app.require_subcommand(1);

  CommonArgs run_args, sgm_args, eval_args, synth_args, cal_args;
  std::string left, right, list_file, id = "pair";
  std::string est_path, gt_path, conf_path, eval_list, eval_id = "pair";
  bool eval_stereo = false;
  int synth_w = 256, synth_h = 256;
  double synth_shift = 0.3, synth_blur = 0.0;
  std::string synth_field = "constant";
  uint64_t synth_seed = 7, cal_seed = 7;
  double cal_bias = 0.0;

  CLI::App* run = app.add_subcommand("run", "CCA disparity on an image pair");
  add_common(run, run_args);
  run->add_option("--left", left, "left / reference view");
  run->add_option("--right", right, "right / secondary view");
  run->add_option("--gt", gt_path, "(accepted for symmetry; used by eval)");
  run->add_option("--list", list_file, "file of 'left right [gt]' lines");
  run->add_option("--id", id, "output name stem");

  CLI::App* sgm = app.add_subcommand("sgm", "SGM baseline on an image pair");
  add_common(sgm, sgm_args);
  sgm->add_option("--left", left, "left / reference view");
  sgm->add_option("--right", right, "right / secondary view");
  sgm->add_option("--list", list_file, "file of 'left right [gt]' lines");
  sgm->add_option("--id", id, "output name stem");

  CLI::App* eval = app.add_subcommand("eval", "metrics for an estimate vs gt");
  add_common(eval, eval_args);
  eval->add_option("--est", est_path, "estimated disparity (PFM)");
  eval->add_option("--gt", gt_path, "ground-truth disparity (PFM)");
  eval->add_option("--gt-conf", conf_path, "ground-truth confidence image");
  eval->add_option("--list", eval_list, "file of 'est gt [conf]' lines");
  eval->add_option("--id", eval_id, "output name stem");
  eval->add_flag("--stereo", eval_stereo, "also report bad-px and RMSE");

  CLI::App* cal = app.add_subcommand(
      "calibrate-histeq", "measure the sub-pixel interpolation offset");
  add_common(cal, cal_args);
  cal->add_option("--seed", cal_seed, "rng seed");
  cal->add_option("--bias", cal_bias, "constant bias injected into estimates");

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic pair");
  add_common(synth, synth_args);
  synth->add_option("--width", synth_w, "image width");
  synth->add_option("--height", synth_h, "image height");
  synth->add_option("--shift", synth_shift, "disparity amplitude (px)");
  synth->add_option("--field", synth_field, "constant | ramp | smooth");
  synth->add_option("--blur", synth_blur, "max defocus blur std (px)");
  synth->add_option("--seed", synth_seed, "rng seed");

  try {
    app.parse(argc, argv);
    if (run->parsed())
      return cmd_run(run_args, left, right, list_file, id, false);
    if (sgm->parsed())
      return cmd_run(sgm_args, left, right, list_file, id, true);
    if (eval->parsed())
      return cmd_eval(eval_args, est_path, gt_path, conf_path, eval_list,
                      eval_id, eval_stereo);
    if (cal->parsed()) {
      double offset = cca::calibrate_histeq_offset(cal_seed, cal_bias);
      std::cout << "calibrated_offset = " << offset << "\n";
      return 0;
    }
    if (synth->parsed())
      return cmd_synth(synth_args, synth_w, synth_h, synth_shift, synth_field,
                       synth_blur, synth_seed);
    return 0;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const cca::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const cca::InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  } catch (const cca::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  }
}
