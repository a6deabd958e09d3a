// Copyright 2026 The sotif_kitti Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sotif_kitti/baseline_detector.hpp"
#include "sotif_kitti/config.hpp"
#include "sotif_kitti/dataset_index.hpp"
#include "sotif_kitti/dataset_writer.hpp"
#include "sotif_kitti/errors.hpp"
#include "sotif_kitti/evaluation.hpp"
#include "sotif_kitti/hashing.hpp"
#include "sotif_kitti/kitti_io.hpp"
#include "sotif_kitti/report_format.hpp"
#include "sotif_kitti/atomic_file.hpp"

#include <CLI11.hpp>
#include <fmt/chrono.h>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
namespace sk = sotif_kitti;

namespace
{

enum ExitCode : int { kOk = 0, kUsage = 2, kRuntime = 3, kEmpty = 4 };

struct CommonOptions
{
  std::string config_path;
  std::size_t jobs{std::max(1U, std::thread::hardware_concurrency())};
};

struct RunManifest
{
  std::string command;
  std::string config_digest;
  std::uint64_t seed{0};
  std::string started_at;
  nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
  nlohmann::ordered_json outputs = nlohmann::ordered_json::object();
};

std::string utc_now()
{
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::time(nullptr)));
}

void write_run_manifest(const RunManifest & m, const fs::path & dir)
{
  nlohmann::ordered_json doc;
  doc["command"] = m.command;
  doc["config_digest"] = m.config_digest;
  doc["seed"] = m.seed;
  doc["tool_version"] = SOTIF_KITTI_VERSION;
  doc["started_at"] = m.started_at;
  doc["finished_at"] = utc_now();
  doc["inputs"] = m.inputs;
  doc["outputs"] = m.outputs;
  sk::write_file_atomic(dir / sk::layout::kRunManifest, doc.dump(2) + "\n");
}

sk::ToolkitConfig load_or_default(const std::string & path)
{
  return path.empty() ? sk::ToolkitConfig{} : sk::load_config(path);
}

void report_violations(const sk::StructureViolation & e)
{
  for (const auto & v : e.violations()) {
    fmt::print(stderr, "  {}\n", sk::describe(v));
  }
}

// Refuses to touch a non-empty directory unless it holds a previous dataset and
// `force` is set.
void prepare_output_dir(const fs::path & out, bool force)
{
  if (fs::exists(out) && !fs::is_empty(out)) {
    if (!force) {
      throw sk::ConfigError(out.string() + " is not empty (use --force to replace a dataset)");
    }
    if (!fs::exists(out / sk::layout::kManifest)) {
      throw sk::ConfigError(out.string() + " does not look like a dataset, refusing to replace it");
    }
    fs::remove_all(out);
  }
  fs::create_directories(out);
}

int cmd_generate(
  const CommonOptions & common, const fs::path & out, std::optional<std::uint64_t> seed, bool force)
{
  RunManifest m;
  m.command = "generate";
  m.started_at = utc_now();
  sk::ToolkitConfig cfg;
  try {
    cfg = load_or_default(common.config_path);
    if (seed) {
      cfg.scenario.seed = *seed;
    }
    cfg.validate();
    prepare_output_dir(out, force);
  } catch (const sk::ConfigError & e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kUsage;
  }
  m.config_digest = cfg.digest();
  m.seed = cfg.scenario.seed;
  m.inputs["config"] = common.config_path.empty() ? "<built-in defaults>" : common.config_path;
  try {
    sk::GenerationOptions opts;
    opts.jobs = common.jobs;
    const sk::DatasetIndex index =
      sk::generate_dataset(cfg.scenario, cfg.lidar, cfg.per_frame_weather(), out, opts);
    m.outputs["dataset"] = out.string();
    m.outputs["frames"] = index.frame_ids.size();
    m.outputs["test_frames"] = index.ids_in(sk::Split::Test).size();
    m.outputs["val_frames"] = index.ids_in(sk::Split::Val).size();
    m.outputs["tree_hash"] = sk::tree_hash(out);
    write_run_manifest(m, out);
    fmt::print(
      "generated {} frames ({} test / {} val) in {}\ntree hash {}\n", index.frame_ids.size(),
      m.outputs["test_frames"].get<std::size_t>(), m.outputs["val_frames"].get<std::size_t>(),
      out.string(), m.outputs["tree_hash"].get<std::string>());
    return kOk;
  } catch (const sk::ConfigError & e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kUsage;
  } catch (const sk::InfeasibleConfig & e) {
    fmt::print(stderr, "infeasible scenario: {}\n", e.what());
    return kUsage;
  } catch (const sk::StructureViolation & e) {
    fmt::print(stderr, "generated dataset failed validation:\n");
    report_violations(e);
    return kRuntime;
  }
}

int cmd_validate(const fs::path & root)
{
  if (!fs::is_directory(root)) {
    fmt::print(stderr, "not a directory: {}\n", root.string());
    return kUsage;
  }
  try {
    const sk::DatasetIndex index = sk::validate_dataset(root);
    fmt::print(
      "valid: {} frames ({} test / {} val)\n", index.frame_ids.size(),
      index.ids_in(sk::Split::Test).size(), index.ids_in(sk::Split::Val).size());
    return kOk;
  } catch (const sk::StructureViolation & e) {
    fmt::print(stderr, "{} violation(s):\n", e.violations().size());
    report_violations(e);
    return kRuntime;
  }
}

int cmd_detect(const CommonOptions & common, const fs::path & dataset, const fs::path & out)
{
  RunManifest m;
  m.command = "detect";
  m.started_at = utc_now();
  sk::ToolkitConfig cfg;
  sk::DatasetIndex index;
  try {
    cfg = load_or_default(common.config_path);
    index = sk::validate_dataset(dataset);
  } catch (const sk::ConfigError & e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kUsage;
  } catch (const sk::StructureViolation & e) {
    fmt::print(stderr, "invalid dataset {}:\n", dataset.string());
    report_violations(e);
    return kUsage;
  }
  m.config_digest = cfg.digest();
  m.seed = cfg.scenario.seed;
  m.inputs["dataset"] = dataset.string();
  m.inputs["config"] = common.config_path.empty() ? "<built-in defaults>" : common.config_path;
  sk::detect_dataset(index, out, cfg.detector, common.jobs);
  m.outputs["predictions"] = out.string();
  m.outputs["files"] = index.frame_ids.size();
  write_run_manifest(m, out);
  fmt::print("wrote {} prediction files to {}\n", index.frame_ids.size(), out.string());
  return kOk;
}

struct EvaluateOptions
{
  fs::path dataset;
  fs::path predictions;
  fs::path out;
  std::vector<double> iou;
  std::string interp;
  std::string iou_mode;
  std::string method{"baseline"};
  bool reference{false};
};

int cmd_evaluate(const CommonOptions & common, const EvaluateOptions & o)
{
  RunManifest m;
  m.command = "evaluate";
  m.started_at = utc_now();
  sk::ToolkitConfig cfg;
  sk::FrameLabels gts;
  sk::FrameLabels preds;
  try {
    cfg = load_or_default(common.config_path);
    if (!o.iou.empty()) {
      cfg.eval.ap_thresholds = o.iou;
    }
    if (!o.interp.empty()) {
      cfg.eval.interpolation = sk::interpolation_from_string(o.interp);
    }
    if (!o.iou_mode.empty()) {
      cfg.eval.iou_mode = sk::iou_mode_from_string(o.iou_mode);
    }
    cfg.eval.validate();
    const sk::DatasetIndex index = sk::validate_dataset(o.dataset);
    gts = sk::load_ground_truth(index);
    preds = sk::load_predictions(o.predictions, index);
  } catch (const sk::StructureViolation & e) {
    fmt::print(stderr, "invalid dataset {}:\n", o.dataset.string());
    report_violations(e);
    return kUsage;
  } catch (const sk::Error & e) {
    fmt::print(stderr, "bad input: {}\n", e.what());
    return kUsage;
  }
  if (preds.empty()) {
    fmt::print(stderr, "no prediction files for any dataset frame in {}\n", o.predictions.string());
    return kEmpty;
  }
  const sk::EvalReport report = sk::evaluate(gts, preds, cfg.eval);
  fs::create_directories(o.out);
  const auto written = sk::write_report_bundle(report, o.out, o.method, o.reference);

  m.config_digest = cfg.digest();
  m.seed = cfg.scenario.seed;
  m.inputs["dataset"] = o.dataset.string();
  m.inputs["predictions"] = o.predictions.string();
  m.inputs["dataset_id"] = report.dataset_id;
  m.inputs["predictions_id"] = report.predictions_id;
  for (const auto & p : written) {
    m.outputs[p.filename().string()] = p.string();
  }
  write_run_manifest(m, o.out);
  fmt::print(
    "{}\n{}", sk::format_ap_table(report, o.method, o.reference),
    sk::format_recall_table(report, o.method, o.reference));
  return kOk;
}

sk::EvalReport read_report(const fs::path & path)
{
  try {
    return sk::report_from_json(sk::read_file_text(path));
  } catch (const sk::IoFailure & e) {
    throw sk::ConfigError(e.what());
  }
}

int cmd_report(const fs::path & report_path, const std::string & method, bool reference, const fs::path & out)
{
  sk::EvalReport report;
  try {
    report = read_report(report_path);
  } catch (const sk::ConfigError & e) {
    fmt::print(stderr, "bad report: {}\n", e.what());
    return kUsage;
  }
  const std::string ap = sk::format_ap_table(report, method, reference);
  const std::string recall = sk::format_recall_table(report, method, reference);
  if (out.empty()) {
    fmt::print("{}\n{}", ap, recall);
    return kOk;
  }
  RunManifest m;
  m.command = "report";
  m.started_at = utc_now();
  m.inputs["report"] = report_path.string();
  fs::create_directories(out);
  sk::write_file_atomic(out / "ap_table.txt", ap);
  sk::write_file_atomic(out / "recall_table.txt", recall);
  m.outputs["ap_table"] = (out / "ap_table.txt").string();
  m.outputs["recall_table"] = (out / "recall_table.txt").string();
  m.config_digest = sk::ToolkitConfig{}.digest();
  write_run_manifest(m, out);
  fmt::print("wrote tables to {}\n", out.string());
  return kOk;
}

int cmd_plot(const fs::path & report_path, const fs::path & out)
{
  sk::EvalReport report;
  try {
    report = read_report(report_path);
  } catch (const sk::ConfigError & e) {
    fmt::print(stderr, "bad report: {}\n", e.what());
    return kUsage;
  }
  RunManifest m;
  m.command = "plot";
  m.started_at = utc_now();
  m.inputs["report"] = report_path.string();
  fs::create_directories(out);
  for (const auto & p : sk::write_plots(report, out)) {
    m.outputs[p.filename().string()] = p.string();
    fmt::print("wrote {}\n", p.string());
  }
  m.config_digest = sk::ToolkitConfig{}.digest();
  write_run_manifest(m, out);
  return kOk;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Synthetic KITTI-format highway overtake dataset and 3D detection evaluation"};
  app.set_version_flag("--version", SOTIF_KITTI_VERSION);
  app.require_subcommand(1);

  CommonOptions common;
  const auto add_common = [&](CLI::App * sub, bool with_config) {
    if (with_config) {
      sub->add_option("--config", common.config_path, "TOML configuration file")
        ->check(CLI::ExistingFile);
    }
    sub->add_option("--jobs", common.jobs, "Worker threads")->check(CLI::PositiveNumber);
  };

  auto * generate = app.add_subcommand("generate", "Simulate the scenario and write a KITTI dataset");
  fs::path gen_out;
  std::optional<std::uint64_t> gen_seed;
  bool gen_force = false;
  add_common(generate, true);
  generate->add_option("--out", gen_out, "Output dataset directory")->required();
  generate->add_option("--seed", gen_seed, "Override the scenario seed");
  generate->add_flag("--force", gen_force, "Replace an existing dataset in --out");

  auto * validate = app.add_subcommand("validate", "Check the structure of a KITTI dataset");
  fs::path val_root;
  validate->add_option("dataset", val_root, "Dataset directory")->required();

  auto * detect = app.add_subcommand("detect", "Run the baseline detector over a dataset");
  fs::path det_dataset;
  fs::path det_out;
  add_common(detect, true);
  detect->add_option("--dataset", det_dataset, "Dataset directory")->required();
  detect->add_option("--out", det_out, "Prediction directory")->required();

  auto * evaluate = app.add_subcommand("evaluate", "Score predictions against a dataset");
  EvaluateOptions eval_opts;
  add_common(evaluate, true);
  evaluate->add_option("--dataset", eval_opts.dataset, "Dataset directory")->required();
  evaluate->add_option("--predictions", eval_opts.predictions, "Prediction directory")->required();
  evaluate->add_option("--out", eval_opts.out, "Report directory")->required();
  evaluate->add_option("--iou", eval_opts.iou, "IoU threshold(s) for AP");
  evaluate->add_option("--interp", eval_opts.interp, "AP interpolation")
    ->check(CLI::IsMember({"ap11", "ap40", "both"}));
  evaluate->add_option("--iou-mode", eval_opts.iou_mode, "Box overlap")
    ->check(CLI::IsMember({"3d", "bev"}));
  evaluate->add_option("--method", eval_opts.method, "Row label in the tables");
  evaluate->add_flag("--reference", eval_opts.reference, "Append published reference rows");

  auto * report = app.add_subcommand("report", "Render tables from a report.json");
  fs::path rep_path;
  fs::path rep_out;
  std::string rep_method{"baseline"};
  bool rep_reference = false;
  report->add_option("report", rep_path, "report.json")->required()->check(CLI::ExistingFile);
  report->add_option("--out", rep_out, "Write tables here instead of stdout");
  report->add_option("--method", rep_method, "Row label in the tables");
  report->add_flag("--reference", rep_reference, "Append published reference rows");

  auto * plot = app.add_subcommand("plot", "Write PR curves (CSV and SVG) from a report.json");
  fs::path plot_path;
  fs::path plot_out;
  plot->add_option("report", plot_path, "report.json")->required()->check(CLI::ExistingFile);
  plot->add_option("--out", plot_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*generate) {
      return cmd_generate(common, gen_out, gen_seed, gen_force);
    }
    if (*validate) {
      return cmd_validate(val_root);
    }
    if (*detect) {
      return cmd_detect(common, det_dataset, det_out);
    }
    if (*evaluate) {
      return cmd_evaluate(common, eval_opts);
    }
    if (*report) {
      return cmd_report(rep_path, rep_method, rep_reference, rep_out);
    }
    if (*plot) {
      return cmd_plot(plot_path, plot_out);
    }
  } catch (const sk::ConfigError & e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kUsage;
  } catch (const std::exception & e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kRuntime;
  }
  return kUsage;
}
