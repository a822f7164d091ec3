// Copyright 2026 The mayor-lab Authors. All Rights Reserved.
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

#include "app.h"

#include <fmt/format.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <optional>
#include <vector>

#include "commands.h"
#include "config.h"

namespace mayor::cli {
namespace {

constexpr const char* kSeedEnv = "MAYOR_LAB_SEED";

// Pulls `--section.key=value` arguments out of `args`.
std::vector<std::pair<std::string, std::string>> TakeOverrides(std::vector<std::string>& args) {
  std::vector<std::pair<std::string, std::string>> overrides;
  std::vector<std::string> rest;
  for (const std::string& a : args) {
    const auto eq = a.find('=');
    const auto dot = a.find('.');
    if (a.starts_with("--") && eq != std::string::npos && dot != std::string::npos && dot < eq) {
      overrides.emplace_back(a.substr(2, eq - 2), a.substr(eq + 1));
    } else {
      rest.push_back(a);
    }
  }
  args = std::move(rest);
  return overrides;
}

std::pair<std::string, fs::path> ModelArg(const std::string& text) {
  const auto eq = text.find('=');
  if (eq != std::string::npos) return {text.substr(0, eq), fs::path(text.substr(eq + 1))};
  const fs::path p(text);
  const std::string label = p.parent_path().filename().string();
  return {label.empty() ? p.stem().string() : label, p};
}

}  // namespace

int run_cli(std::span<const std::string> raw_args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(raw_args.begin(), raw_args.end());
  const auto overrides = TakeOverrides(args);

  CLI::App app{"Dense text mask-head laboratory", "mayor_lab"};
  app.require_subcommand(1);
  std::string config_path;
  int jobs = 1;
  app.add_option("--config", config_path, "INI config file")->check(CLI::ExistingFile);
  app.add_option("--jobs", jobs, "worker threads (1 = serial baseline)")
      ->check(CLI::PositiveNumber);
  app.footer("Any config key can be overridden with --section.key=value.");

  std::string out_dir, data_dir, model_path, detections_dir;
  double angle = 0.0;
  std::vector<std::string> models;

  auto* synth = app.add_subcommand("synth", "generate train/test dense-stripe scenes");
  synth->add_option("--out", out_dir, "output directory")->required();

  auto* rotate = app.add_subcommand("rotate", "rotate a dataset split");
  rotate->add_option("--data", data_dir, "split directory")->required();
  rotate->add_option("--angle", angle, "degrees, counter-clockwise")->required();
  rotate->add_option("--out", out_dir, "output directory")->required();

  auto* assign = app.add_subcommand("assign-bench", "standard vs adaptive label assignment");
  assign->add_option("--data", data_dir, "dataset root or split")->required();
  assign->add_option("--out", out_dir, "output directory")->required();

  auto* train = app.add_subcommand("train", "train a mask head");
  train->add_option("--data", data_dir, "dataset root or split")->required();
  train->add_option("--out", out_dir, "output directory")->required();

  auto* eval = app.add_subcommand("eval", "evaluate a model or a detection directory");
  eval->add_option("--data", data_dir, "dataset root or split")->required();
  auto* model_opt = eval->add_option("--model", model_path, "checkpoint");
  auto* det_opt = eval->add_option("--detections", detections_dir,
                                   "directory of gt_<id>.txt files used as detections");
  model_opt->excludes(det_opt);
  eval->add_option("--out", out_dir, "output directory")->required();

  auto* rotbench = app.add_subcommand("rotbench", "F-measure against rotation angle");
  rotbench->add_option("--data", data_dir, "dataset root or split")->required();
  rotbench->add_option("--model", models, "checkpoint, optionally label=path")->required();
  rotbench->add_option("--out", out_dir, "output directory")->required();

  auto* flops = app.add_subcommand("flops", "multiply-add counts per decoder");
  flops->add_option("--out", out_dir, "output directory");

  auto* show = app.add_subcommand("config", "print the effective config");
  bool schema = false;
  show->add_flag("--schema", schema, "list every key with its meaning");

  std::vector<std::string> argv_store{"mayor_lab"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const std::string& s : argv_store) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    RunContext ctx;
    ctx.jobs = jobs;
    ctx.log = &out;
    if (!config_path.empty()) ctx.config = load_config(config_path);
    if (const char* env = std::getenv(kSeedEnv); env != nullptr && *env != '\0') {
      set_config_value(ctx.config, "run.seed", env);
    }
    for (const auto& [key, value] : overrides) set_config_value(ctx.config, key, value);
    validate(ctx.config);

    if (*show) {
      if (schema) {
        for (const ConfigKey& k : config_schema()) out << fmt::format("{:28} {}\n", k.name, k.doc);
      } else {
        out << to_ini(ctx.config);
      }
    } else if (*synth) {
      cmd_synth(ctx, out_dir);
    } else if (*rotate) {
      cmd_rotate(ctx, data_dir, angle, out_dir);
    } else if (*assign) {
      cmd_assign_bench(ctx, data_dir, out_dir);
    } else if (*train) {
      cmd_train(ctx, data_dir, out_dir);
    } else if (*eval) {
      if (model_path.empty() && detections_dir.empty()) {
        throw std::invalid_argument("eval needs --model or --detections");
      }
      cmd_eval(ctx, data_dir, model_path, detections_dir, out_dir);
    } else if (*rotbench) {
      std::vector<std::pair<std::string, fs::path>> labelled;
      for (const std::string& m : models) labelled.push_back(ModelArg(m));
      cmd_rotbench(ctx, data_dir, labelled, out_dir);
    } else if (*flops) {
      cmd_flops(ctx, out_dir);
    }
  } catch (const std::exception& e) {
    err << "mayor_lab: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace mayor::cli
