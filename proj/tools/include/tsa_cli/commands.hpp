// Copyright (C) 2026 The TSA toolkit authors
// SPDX-License-Identifier: Apache-2.0

// The tsa command-line tool. Each command is also callable in-process.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tsa/metrics.hpp"
#include "tsa_cli/run_config.hpp"

namespace tsa::cli {

/// Files written by `synth` into its output directory.
struct DatasetFiles {
  std::string train_features;
  std::string train_annotations;
  std::string val_features;
  std::string val_annotations;
  std::string config;

  static DatasetFiles in(const std::string& dir);
};

DatasetFiles cmd_synth(const RunConfig& cfg, const std::string& out_dir);

/// Per-epoch losses go to `loss_csv` as epoch,learning_rate,loss.
void cmd_train_detector(const RunConfig& cfg, const std::string& features, const std::string& annotations,
                        const std::string& checkpoint_out, const std::string& loss_csv, std::ostream& log);

void cmd_train_phi(const RunConfig& cfg, const std::string& features, const std::string& annotations,
                   const std::string& detector_checkpoint, const std::string& phi_out, const std::string& loss_csv,
                   std::ostream& log);

void cmd_propose(const RunConfig& cfg, const std::string& features, const std::string& detector_checkpoint,
                 const std::string& phi_checkpoint, const std::string& out);

/// Paths written next to a report file: <stem>.ar_an.csv and
/// <stem>.recall_iou.csv, where <stem> is the report path minus extension.
struct ReportFiles {
  std::string report;
  std::string ar_an_csv;
  std::string recall_iou_csv;

  static ReportFiles for_report(const std::string& report_path);
};

EvalReport cmd_eval(const RunConfig& cfg, const std::string& proposals, const std::string& annotations,
                    const std::string& report_out);

/// Line chart of a two-column CSV (header row names the axes).
std::string render_svg(const std::string& csv_text, const std::string& title);

/// Writes <out_dir>/<csv stem>.svg for each CSV; returns the SVG paths.
std::vector<std::string> cmd_plot(const std::vector<std::string>& csv_files, const std::string& out_dir);

/// Full command-line entry point; returns the process exit code
/// (0 ok, 2 usage or config, 3 data, 4 numeric).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tsa::cli
