#include <cinttypes>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "accessmap.h"

namespace {

void log_line(const char* line, void*) { std::fprintf(stderr, "%s\n", line); }

struct Overrides {
  double vol_min = -1, vol_max = -1, margin = -1, ratio_max = -1;
  int app_min = -1;
  double resolution = -1;

  void add_flags(CLI::App* cmd) {
    cmd->add_option("--vol-min", vol_min, "Stage-1 minimum volume, m^3");
    cmd->add_option("--vol-max", vol_max, "Stage-1 maximum volume, m^3");
    cmd->add_option("--margin", margin, "Containment margin, meters");
    cmd->add_option("--ratio-max", ratio_max, "Merge volume-ratio cap");
    cmd->add_option("--app-min", app_min, "Stage-3 appearance threshold");
    cmd->add_option("--resolution", resolution, "Render resolution, m/pixel");
  }

  int apply(amap_session* s) const {
    auto set = [&](const char* key, double v) {
      return v >= 0 ? amap_session_set_number(s, key, v) : AMAP_OK;
    };
    amap_status st = AMAP_OK;
    if ((st = set("vol_min", vol_min))) return st;
    if ((st = set("vol_max", vol_max))) return st;
    if ((st = set("containment_margin", margin))) return st;
    if ((st = set("volume_ratio_max", ratio_max))) return st;
    if ((st = set("app_min", app_min))) return st;
    if ((st = set("render_resolution", resolution))) return st;
    return AMAP_OK;
  }
};

int finish(amap_session* s, amap_status st, const char* what) {
  if (st != AMAP_OK)
    std::fprintf(stderr, "error: %s: %s\n", what, amap_session_error(s));
  amap_session_close(s);
  return static_cast<int>(st);
}

amap_session* open_or_die(const std::string& config, int* rc) {
  amap_session* s = nullptr;
  amap_status st = amap_session_open(config.c_str(), &s);
  if (st != AMAP_OK) {
    std::fprintf(stderr, "error: cannot load config %s\n", config.c_str());
    *rc = static_cast<int>(st);
    return nullptr;
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"accessmap - accessibility maps from drone flight logs"};
  app.require_subcommand(1);

  std::string config, out_dir, volumes_in, volumes_out, svg_out, ply_out,
      spec_path;
  bool dry_run = false;
  uint64_t seed = 0;
  bool has_seed = false;
  Overrides ov;

  auto* run = app.add_subcommand("run", "Run the full pipeline");
  run->add_option("--config", config, "Pipeline config JSON")->required();
  run->add_option("--out", out_dir, "Output directory");
  run->add_flag("--dry-run", dry_run, "Validate inputs, write nothing");
  ov.add_flags(run);

  auto* scale = app.add_subcommand("scale", "Print the metric scale estimate");
  scale->add_option("--config", config, "Pipeline config JSON")->required();

  auto* lift = app.add_subcommand("lift", "Lift detections to raw volumes");
  lift->add_option("--config", config, "Pipeline config JSON")->required();
  lift->add_option("--out-volumes", volumes_out, "Volumes JSON output")
      ->required();
  lift->add_option("--annotated-ply", ply_out, "Annotated point cloud output");

  auto* refine = app.add_subcommand("refine", "Refine a volumes JSON file");
  refine->add_option("--config", config, "Pipeline config JSON")->required();
  refine->add_option("--in", volumes_in, "Volumes JSON input")->required();
  refine->add_option("--out", volumes_out, "Volumes JSON output")->required();
  ov.add_flags(refine);

  auto* render = app.add_subcommand("render", "Render a top-down SVG map");
  render->add_option("--config", config, "Pipeline config JSON")->required();
  render->add_option("--in", volumes_in, "Volumes JSON input")->required();
  render->add_option("--out-svg", svg_out, "SVG output path")->required();
  ov.add_flags(render);

  auto* synth = app.add_subcommand("synth", "Generate a synthetic session");
  synth->add_option("--spec", spec_path, "Scene spec JSON")->required();
  synth->add_option("--out", out_dir, "Session output directory")->required();
  synth->add_option("--seed", seed, "Override the spec's RNG seed");

  CLI11_PARSE(app, argc, argv);
  has_seed = synth->count("--seed") > 0;

  if (synth->parsed()) {
    char err[1024] = {0};
    amap_status st = amap_synth(spec_path.c_str(), out_dir.c_str(), seed,
                                has_seed ? 1 : 0, err, sizeof(err));
    if (st != AMAP_OK) std::fprintf(stderr, "error: synth: %s\n", err);
    return static_cast<int>(st);
  }

  int rc = 0;
  amap_session* s = open_or_die(config, &rc);
  if (!s) return rc;
  if (amap_status st = static_cast<amap_status>(ov.apply(s)))
    return finish(s, st, "options");

  if (run->parsed()) {
    if (!out_dir.empty()) amap_session_set_output_dir(s, out_dir.c_str());
    return finish(s, amap_run(s, dry_run ? 1 : 0, log_line, nullptr), "run");
  }
  if (scale->parsed()) {
    double factor, odom, slam, t0, t1;
    amap_status st = amap_estimate_scale(s, &factor, &odom, &slam, &t0, &t1);
    if (st == AMAP_OK)
      std::printf(
          "factor=%.9g odom_displacement_m=%.9g slam_displacement_units=%.9g "
          "window=[%.6f,%.6f]\n",
          factor, odom, slam, t0, t1);
    return finish(s, st, "scale");
  }
  if (lift->parsed()) {
    return finish(s,
                  amap_lift(s, volumes_out.c_str(),
                            ply_out.empty() ? nullptr : ply_out.c_str()),
                  "lift");
  }
  if (refine->parsed()) {
    uint64_t counts[4] = {0, 0, 0, 0};
    amap_status st =
        amap_refine_volumes(s, volumes_in.c_str(), volumes_out.c_str(), counts);
    if (st == AMAP_OK)
      std::printf("stage_counts=%" PRIu64 ",%" PRIu64 ",%" PRIu64 ",%" PRIu64
                  "\n",
                  counts[0], counts[1], counts[2], counts[3]);
    return finish(s, st, "refine");
  }
  if (render->parsed()) {
    return finish(s, amap_render(s, volumes_in.c_str(), svg_out.c_str()),
                  "render");
  }
  return finish(s, AMAP_ERR_USAGE, "no subcommand");
}
