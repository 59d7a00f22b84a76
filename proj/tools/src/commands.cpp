// Copyright (C) 2026 The TSA toolkit authors
// SPDX-License-Identifier: Apache-2.0

#include "tsa_cli/commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <ostream>
#include <sstream>

#include "tsa/checkpoint.hpp"
#include "tsa/error.hpp"
#include "tsa/pipeline.hpp"
#include "tsa/text.hpp"

namespace tsa::cli {

namespace fs = std::filesystem;

namespace {

struct LoadedSet {
  std::vector<FeatureSequence> features;
  std::vector<AnnotationSet> annotations;  // aligned with features
};

LoadedSet load_set(const std::string& features, const std::string& annotations) {
  LoadedSet s;
  s.features = read_feature_file(features);
  s.annotations = align_annotations(s.features, read_annotation_file(annotations));
  return s;
}

void check_dim(const RunConfig& cfg, const std::vector<FeatureSequence>& features) {
  for (const auto& f : features) {
    if (f.dim() != cfg.detector.input_dim) {
      throw DataError("video '" + f.video_id + "' has feature dimension " + std::to_string(f.dim()) +
                      ", detector expects " + std::to_string(cfg.detector.input_dim));
    }
  }
}

Detector load_detector(const RunConfig& cfg, const std::string& path) {
  Detector detector(cfg.detector);
  load_checkpoint(path, cfg.detector.digest(), detector.params());
  return detector;
}

std::string loss_csv_text(const std::vector<double>& losses, const LearningRateSchedule& lr) {
  std::ostringstream out;
  out << "epoch,learning_rate,loss\n";
  for (std::size_t e = 0; e < losses.size(); ++e) {
    out << e << ',' << text::format_double(lr.at(e)) << ',' << text::format_double(losses[e]) << '\n';
  }
  return out.str();
}

void ensure_parent(const std::string& path) {
  const auto parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

void write(const std::string& path, const std::string& contents) {
  ensure_parent(path);
  text::write_file(path, contents);
}

std::string svg_number(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

DatasetFiles DatasetFiles::in(const std::string& dir) {
  const fs::path d(dir);
  return {(d / "train.features").string(), (d / "train.annotations").string(), (d / "val.features").string(),
          (d / "val.annotations").string(), (d / "run.conf").string()};
}

DatasetFiles cmd_synth(const RunConfig& cfg, const std::string& out_dir) {
  cfg.validate();
  const auto videos = generate_dataset(cfg.synth);
  const auto split = split_videos(videos.size(), cfg.val_fraction, cfg.seed);
  auto pick = [&](const std::vector<std::size_t>& idx, std::vector<FeatureSequence>& f, std::vector<AnnotationSet>& a) {
    for (std::size_t i : idx) {
      f.push_back(videos[i].features);
      a.push_back(videos[i].annotations);
    }
  };
  std::vector<FeatureSequence> train_f, val_f;
  std::vector<AnnotationSet> train_a, val_a;
  pick(split.train, train_f, train_a);
  pick(split.val, val_f, val_a);

  fs::create_directories(out_dir);
  const auto files = DatasetFiles::in(out_dir);
  write_feature_file(files.train_features, train_f);
  write_annotation_file(files.train_annotations, train_a);
  write_feature_file(files.val_features, val_f);
  write_annotation_file(files.val_annotations, val_a);
  text::write_file(files.config, format_run_config(cfg));
  return files;
}

void cmd_train_detector(const RunConfig& cfg, const std::string& features, const std::string& annotations,
                        const std::string& checkpoint_out, const std::string& loss_csv, std::ostream& log) {
  cfg.validate();
  const auto set = load_set(features, annotations);
  check_dim(cfg, set.features);
  const auto samples = training_samples(set.features, set.annotations, cfg.inflation);
  const auto result = train_detector(samples, cfg.detector, cfg.detector_train, [&](std::size_t e, double loss, double lr) {
    log << "detector epoch " << e << " lr " << lr << " loss " << loss << '\n' << std::flush;
  });
  ensure_parent(checkpoint_out);
  save_checkpoint(checkpoint_out, result.detector.params(), cfg.detector.digest());
  write(loss_csv, loss_csv_text(result.epoch_loss, cfg.detector_train.lr));
}

void cmd_train_phi(const RunConfig& cfg, const std::string& features, const std::string& annotations,
                   const std::string& detector_checkpoint, const std::string& phi_out, const std::string& loss_csv,
                   std::ostream& log) {
  cfg.validate();
  const auto set = load_set(features, annotations);
  check_dim(cfg, set.features);
  const auto detector = load_detector(cfg, detector_checkpoint);
  const auto triples = detect_all(detector, set.features, cfg.threads);

  PhiModel model;
  std::tie(model.d_min, model.d_max) = duration_stats(set.annotations);
  PairingConfig pairing = cfg.proposal.pairing;
  pairing.d_min = model.d_min;
  pairing.d_max = model.d_max;
  const auto samples = collect_phi_samples(triples, set.annotations, pairing, cfg.seed);
  if (samples.empty()) {
    throw DataError("no start/end pairs pass the gates on the training videos; the detector is not confident anywhere");
  }
  log << "phi samples " << samples.size() << '\n';
  auto result = train_phi(samples, cfg.phi_train);
  for (std::size_t e = 0; e < result.epoch_loss.size(); ++e) {
    log << "phi epoch " << e << " loss " << result.epoch_loss[e] << '\n';
  }
  model.network = std::move(result.network);
  ensure_parent(phi_out);
  save_phi_model(phi_out, model);
  write(loss_csv, loss_csv_text(result.epoch_loss, cfg.phi_train.lr));
}

void cmd_propose(const RunConfig& cfg, const std::string& features, const std::string& detector_checkpoint,
                 const std::string& phi_checkpoint, const std::string& out) {
  cfg.validate();
  auto videos = read_feature_file(features);
  check_dim(cfg, videos);
  std::stable_sort(videos.begin(), videos.end(),
                   [](const FeatureSequence& a, const FeatureSequence& b) { return a.video_id < b.video_id; });
  const auto detector = load_detector(cfg, detector_checkpoint);
  const auto phi = load_phi_model(phi_checkpoint);
  const auto triples = detect_all(detector, videos, cfg.threads);
  const auto proposals = propose_all(triples, videos, phi, cfg.proposal, cfg.threads);
  ensure_parent(out);
  write_proposal_file(out, proposals);
}

ReportFiles ReportFiles::for_report(const std::string& report_path) {
  fs::path stem(report_path);
  stem.replace_extension();
  return {report_path, stem.string() + ".ar_an.csv", stem.string() + ".recall_iou.csv"};
}

EvalReport cmd_eval(const RunConfig& cfg, const std::string& proposals, const std::string& annotations,
                    const std::string& report_out) {
  cfg.validate();
  const auto preds = to_predictions(read_proposal_file(proposals));
  const auto gt = read_annotation_file(annotations);
  const auto report = evaluate(preds, gt, cfg.eval);
  const auto files = ReportFiles::for_report(report_out);
  write(files.report, format_report(report));
  write(files.ar_an_csv, format_ar_an_csv(report));
  write(files.recall_iou_csv, format_recall_iou_csv(report));
  return report;
}

std::string render_svg(const std::string& csv_text, const std::string& title) {
  std::istringstream in(csv_text);
  std::string header;
  if (!std::getline(in, header)) throw DataError("plot: empty CSV");
  const auto names = text::split(text::trim(header), ',');
  if (names.size() != 2) throw DataError("plot: expected a two-column CSV header, got '" + header + "'");
  std::vector<std::pair<double, double>> pts;
  std::string line;
  for (std::size_t n = 2; std::getline(in, line); ++n) {
    if (text::trim(line).empty()) continue;
    const auto cells = text::split(text::trim(line), ',');
    if (cells.size() != 2) throw DataError("plot: CSV line " + std::to_string(n) + " does not have two columns");
    pts.emplace_back(text::parse_double(cells[0], "plot x"), text::parse_double(cells[1], "plot y"));
  }
  if (pts.empty()) throw DataError("plot: CSV has no data rows");

  constexpr double W = 640, H = 420, L = 70, R = 20, Tm = 40, B = 60;
  double x0 = pts.front().first, x1 = x0, y1 = 1.0;
  for (const auto& [x, y] : pts) {
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    y1 = std::max(y1, y);
  }
  if (x1 == x0) x1 = x0 + 1.0;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - y / y1 * (H - Tm - B); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
      << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << title << "</text>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = x0 + (x1 - x0) * i / 5.0;
    const double yv = y1 * i / 5.0;
    svg << "<line x1=\"" << px(xv) << "\" y1=\"" << py(0) << "\" x2=\"" << px(xv) << "\" y2=\"" << py(y1)
        << "\" stroke=\"#ddd\"/>\n";
    svg << "<line x1=\"" << px(x0) << "\" y1=\"" << py(yv) << "\" x2=\"" << px(x1) << "\" y2=\"" << py(yv)
        << "\" stroke=\"#ddd\"/>\n";
    svg << "<text x=\"" << px(xv) << "\" y=\"" << py(0) + 18 << "\" text-anchor=\"middle\">" << svg_number(xv)
        << "</text>\n";
    svg << "<text x=\"" << px(x0) - 8 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << svg_number(yv)
        << "</text>\n";
  }
  svg << "<rect x=\"" << L << "\" y=\"" << Tm << "\" width=\"" << W - L - R << "\" height=\"" << H - Tm - B
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  svg << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) svg << (i ? " " : "") << px(pts[i].first) << ',' << py(pts[i].second);
  svg << "\"/>\n";
  svg << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 18 << "\" text-anchor=\"middle\">"
      << std::string(text::trim(names[0])) << "</text>\n";
  svg << "<text transform=\"translate(18," << (Tm + H - B) / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
      << std::string(text::trim(names[1])) << "</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

std::vector<std::string> cmd_plot(const std::vector<std::string>& csv_files, const std::string& out_dir) {
  fs::create_directories(out_dir);
  std::vector<std::string> written;
  for (const auto& csv : csv_files) {
    const auto stem = fs::path(csv).stem().string();
    const auto path = (fs::path(out_dir) / (stem + ".svg")).string();
    text::write_file(path, render_svg(text::read_file(csv), stem));
    written.push_back(path);
  }
  return written;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Temporal action proposal toolkit: synthetic data, detector and confidence training, proposal "
               "generation and evaluation.",
               "tsa"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  auto* seed_opt = app.add_option("--seed", seed, "Master seed (run.seed)");
  auto* threads_opt = app.add_option("--threads", threads, "Worker threads (run.threads)")->check(CLI::PositiveNumber);
  app.add_option("--config", config_path, "Run configuration file")->check(CLI::ExistingFile);

  std::string out_dir, features, annotations, detector_ckpt, phi_ckpt, out_path, loss_csv, nms, proposals;
  std::size_t top_k = 0;
  std::vector<std::string> csvs;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset with a seeded train/val split");
  synth->add_option("--out", out_dir, "Output directory")->required();

  auto* train_det = app.add_subcommand("train-detector", "Train the start/mid/end detector");
  train_det->add_option("--features", features)->required();
  train_det->add_option("--annotations", annotations)->required();
  train_det->add_option("--out", out_path, "Detector checkpoint")->required();
  train_det->add_option("--loss-csv", loss_csv, "Per-epoch loss CSV (default <out>.loss.csv)");

  auto* train_phi_cmd = app.add_subcommand("train-phi", "Train the start/end compatibility network");
  train_phi_cmd->add_option("--features", features)->required();
  train_phi_cmd->add_option("--annotations", annotations)->required();
  train_phi_cmd->add_option("--detector", detector_ckpt)->required();
  train_phi_cmd->add_option("--out", out_path, "Phi checkpoint")->required();
  train_phi_cmd->add_option("--loss-csv", loss_csv, "Per-epoch loss CSV (default <out>.loss.csv)");

  auto* propose = app.add_subcommand("propose", "Generate ranked proposals");
  propose->add_option("--features", features)->required();
  propose->add_option("--detector", detector_ckpt)->required();
  propose->add_option("--phi", phi_ckpt)->required();
  propose->add_option("--out", out_path, "Proposal file")->required();
  auto* nms_opt = propose->add_option("--nms", nms, "greedy or soft (proposal.nms)");
  auto* top_k_opt = propose->add_option("--top-k", top_k, "Proposals kept per video (proposal.top_k)")
                        ->check(CLI::PositiveNumber);

  auto* eval = app.add_subcommand("eval", "Evaluate proposals against annotations");
  eval->add_option("--proposals", proposals)->required();
  eval->add_option("--annotations", annotations)->required();
  eval->add_option("--out", out_path, "Report file; CSVs are written next to it")->required();

  auto* plot = app.add_subcommand("plot", "Render two-column CSVs as SVG line charts");
  plot->add_option("--csv", csvs, "Input CSV (repeatable)")->required();
  plot->add_option("--out-dir", out_dir)->required();

  auto* print_config = app.add_subcommand("print-config", "Print the effective configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "error[usage]: " << msg << '\n';
    return 2;
  }

  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_run_config(config_path);
    if (seed_opt->count()) cfg.seed = seed;
    if (threads_opt->count()) cfg.threads = threads;
    if (nms_opt->count()) cfg.proposal.nms = parse_nms_method(nms);
    if (top_k_opt->count()) cfg.proposal.top_k = top_k;
    cfg.sync();
    cfg.validate();

    if (synth->parsed()) {
      const auto files = cmd_synth(cfg, out_dir);
      out << "wrote " << files.train_features << ", " << files.val_features << '\n';
    } else if (train_det->parsed()) {
      cmd_train_detector(cfg, features, annotations, out_path, loss_csv.empty() ? out_path + ".loss.csv" : loss_csv, out);
      out << "wrote " << out_path << '\n';
    } else if (train_phi_cmd->parsed()) {
      cmd_train_phi(cfg, features, annotations, detector_ckpt, out_path,
                    loss_csv.empty() ? out_path + ".loss.csv" : loss_csv, out);
      out << "wrote " << out_path << '\n';
    } else if (propose->parsed()) {
      cmd_propose(cfg, features, detector_ckpt, phi_ckpt, out_path);
      out << "wrote " << out_path << '\n';
    } else if (eval->parsed()) {
      out << format_report(cmd_eval(cfg, proposals, annotations, out_path));
    } else if (plot->parsed()) {
      for (const auto& p : cmd_plot(csvs, out_dir)) out << "wrote " << p << '\n';
    } else if (print_config->parsed()) {
      out << format_run_config(cfg);
    }
  } catch (const Error& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "error[" << to_string(e.kind()) << "]: " << msg << '\n';
    switch (e.kind()) {
      case ErrorKind::kConfig: return 2;
      case ErrorKind::kData: return 3;
      case ErrorKind::kNumeric: return 4;
    }
  } catch (const fs::filesystem_error& e) {
    err << "error[data]: " << e.what() << '\n';
    return 3;
  }
  return 0;
}

}  // namespace tsa::cli
