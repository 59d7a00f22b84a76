// Copyright (C) 2026 The TSA toolkit authors
// SPDX-License-Identifier: Apache-2.0

#include "tsa_cli/run_config.hpp"

#include <functional>
#include <set>
#include <sstream>

#include "tsa/error.hpp"
#include "tsa/text.hpp"

namespace tsa::cli {

namespace {

struct Field {
  const char* section;
  const char* key;
  std::function<std::string()> get;
  std::function<void(std::string_view)> set;
};

std::string what(const char* section, const char* key) { return std::string(section) + "." + key; }

Field size_field(const char* s, const char* k, std::size_t& v) {
  return {s, k, [&v] { return std::to_string(v); },
          [&v, s, k](std::string_view t) { v = static_cast<std::size_t>(text::parse_uint(t, what(s, k))); }};
}

Field u32_field(const char* s, const char* k, std::uint32_t& v) {
  return {s, k, [&v] { return std::to_string(v); }, [&v, s, k](std::string_view t) {
            const auto x = text::parse_uint(t, what(s, k));
            if (x > 0xffffffffull) throw ConfigError(what(s, k) + " is out of range");
            v = static_cast<std::uint32_t>(x);
          }};
}

Field u64_field(const char* s, const char* k, std::uint64_t& v) {
  return {s, k, [&v] { return std::to_string(v); }, [&v, s, k](std::string_view t) { v = text::parse_uint(t, what(s, k)); }};
}

Field real_field(const char* s, const char* k, double& v) {
  return {s, k, [&v] { return text::format_double(v); },
          [&v, s, k](std::string_view t) { v = text::parse_double(t, what(s, k)); }};
}

Field optimizer_field(const char* s, ad::OptimizerKind& v) {
  return {s, "optimizer", [&v] { return ad::to_string(v); },
          [&v](std::string_view t) { v = ad::parse_optimizer(std::string(t)); }};
}

template <typename T, typename Fmt, typename Parse>
Field list_field(const char* s, const char* k, std::vector<T>& v, Fmt fmt, Parse parse) {
  return {s, k,
          [&v, fmt] {
            std::string out;
            for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + fmt(v[i]);
            return out;
          },
          [&v, parse, s, k](std::string_view t) {
            std::vector<T> out;
            for (auto tok : text::split(t, ',')) out.push_back(parse(text::trim(tok), what(s, k)));
            if (out.empty()) throw ConfigError(what(s, k) + " must not be empty");
            v = std::move(out);
          }};
}

std::string fmt_size(std::size_t x) { return std::to_string(x); }
std::size_t parse_size(std::string_view t, const std::string& w) { return static_cast<std::size_t>(text::parse_uint(t, w)); }
std::string fmt_real(double x) { return text::format_double(x); }
double parse_real(std::string_view t, const std::string& w) { return text::parse_double(t, w); }

// channels:kernel
std::string fmt_conv(const ConvSpec& c) { return std::to_string(c.channels) + ":" + std::to_string(c.kernel); }
ConvSpec parse_conv(std::string_view t, const std::string& w) {
  const auto parts = text::split(t, ':');
  if (parts.size() != 2) throw ConfigError(w + ": expected channels:kernel, got '" + std::string(t) + "'");
  return {parse_size(text::trim(parts[0]), w), parse_size(text::trim(parts[1]), w)};
}

// d1-d2-d3
using Dilations = std::array<std::size_t, 3>;
std::string fmt_dilations(const Dilations& d) {
  return std::to_string(d[0]) + "-" + std::to_string(d[1]) + "-" + std::to_string(d[2]);
}
Dilations parse_dilations(std::string_view t, const std::string& w) {
  const auto parts = text::split(t, '-');
  if (parts.size() != 3) throw ConfigError(w + ": expected d1-d2-d3, got '" + std::string(t) + "'");
  return {parse_size(text::trim(parts[0]), w), parse_size(text::trim(parts[1]), w), parse_size(text::trim(parts[2]), w)};
}

// The branch keys describe every branch at once: a dilation triple per
// branch plus a shared kernel, width and depth.
struct BranchView {
  std::vector<Dilations> dilations;
  std::size_t kernel = 3;
  std::size_t channels = 128;
  std::size_t depth = 2;
};

BranchView view_of(const DetectorConfig& d) {
  BranchView v;
  for (const auto& b : d.branches) v.dilations.push_back(b.block.dilations);
  if (!d.branches.empty()) {
    v.kernel = d.branches.front().block.kernel_size;
    v.channels = d.branches.front().block.channels;
    v.depth = d.branches.front().depth;
  }
  return v;
}

void apply(const BranchView& v, DetectorConfig& d) {
  d.branches.clear();
  for (const auto& dil : v.dilations) d.branches.push_back({{dil, v.kernel, v.channels}, v.depth});
}

std::vector<Field> fields(RunConfig& c, BranchView& branches, std::string& grid) {
  auto& s = c.synth;
  auto& dt = c.detector_train;
  auto& pt = c.phi_train;
  auto& p = c.proposal;
  auto& e = c.eval;
  return {
      u64_field("run", "seed", c.seed),
      size_field("run", "threads", c.threads),

      size_field("synth", "video_count", s.video_count),
      size_field("synth", "length", s.length),
      size_field("synth", "feature_dim", s.feature_dim),
      size_field("synth", "min_instances", s.min_instances),
      size_field("synth", "max_instances", s.max_instances),
      real_field("synth", "min_duration", s.min_duration),
      real_field("synth", "max_duration", s.max_duration),
      size_field("synth", "class_count", s.class_count),
      real_field("synth", "noise_std", s.noise_std),
      real_field("synth", "signal_strength", s.signal_strength),
      real_field("synth", "phase_strength", s.phase_strength),
      u32_field("synth", "stride", s.stride),
      real_field("synth", "val_fraction", c.val_fraction),

      real_field("labels", "inflation", c.inflation),

      size_field("detector", "input_dim", c.detector.input_dim),
      list_field("detector", "shared_conv", c.detector.shared_conv, fmt_conv, parse_conv),
      list_field("detector", "branch_dilations", branches.dilations, fmt_dilations, parse_dilations),
      size_field("detector", "branch_kernel", branches.kernel),
      size_field("detector", "branch_channels", branches.channels),
      size_field("detector", "branch_depth", branches.depth),
      list_field("detector", "head_conv", c.detector.head_conv, fmt_conv, parse_conv),

      size_field("detector_train", "epochs", dt.epochs),
      size_field("detector_train", "batch_size", dt.batch_size),
      size_field("detector_train", "window", dt.window),
      real_field("detector_train", "lr_initial", dt.lr.initial),
      real_field("detector_train", "lr_decayed", dt.lr.decayed),
      size_field("detector_train", "lr_decay_epoch", dt.lr.decay_epoch),
      optimizer_field("detector_train", dt.optimizer),
      real_field("detector_train", "momentum", dt.momentum),

      size_field("phi_train", "epochs", pt.epochs),
      size_field("phi_train", "batch_size", pt.batch_size),
      real_field("phi_train", "lr_initial", pt.lr.initial),
      real_field("phi_train", "lr_decayed", pt.lr.decayed),
      size_field("phi_train", "lr_decay_epoch", pt.lr.decay_epoch),
      optimizer_field("phi_train", pt.optimizer),
      real_field("phi_train", "momentum", pt.momentum),

      real_field("proposal", "point_threshold", p.pairing.point_threshold),
      real_field("proposal", "mid_threshold", p.pairing.mid_threshold),
      {"proposal", "nms", [&p] { return to_string(p.nms); },
       [&p](std::string_view t) { p.nms = parse_nms_method(std::string(t)); }},
      real_field("proposal", "nms_iou_threshold", p.nms_iou_threshold),
      real_field("proposal", "soft_sigma", p.soft_sigma),
      real_field("proposal", "soft_floor", p.soft_floor),
      size_field("proposal", "top_k", p.top_k),

      list_field("eval", "ar_an", e.ar_ans, fmt_size, parse_size),
      size_field("eval", "auc_an_max", e.auc_an_max),
      {"eval", "iou_grid", [&grid] { return grid; }, [&grid](std::string_view t) { grid = std::string(t); }},
      size_field("eval", "recall_an", e.recall_an),
      list_field("eval", "recall_iou", e.recall_ious, fmt_real, parse_real),
      list_field("eval", "map_iou", e.map_ious, fmt_real, parse_real),
  };
}

std::string grid_name(const IoUGrid& grid) {
  if (grid.thresholds() == IoUGrid::thumos().thresholds()) return "thumos";
  if (grid.thresholds() == IoUGrid::activitynet().thresholds()) return "activitynet";
  std::string out;
  for (std::size_t i = 0; i < grid.size(); ++i) out += (i ? "," : "") + text::format_double(grid.thresholds()[i]);
  return out;
}

}  // namespace

void RunConfig::sync() {
  synth.seed = seed;
  detector_train.seed = seed;
  detector_train.threads = threads;
  phi_train.seed = seed;
}

void RunConfig::validate() const {
  synth.validate();
  detector.validate();
  proposal.pairing.validate();
  if (threads == 0) throw ConfigError("run.threads must be >= 1");
  if (!(val_fraction >= 0.0 && val_fraction < 1.0)) throw ConfigError("synth.val_fraction must lie in [0, 1)");
  if (!(inflation >= 0.0)) throw ConfigError("labels.inflation must be >= 0");
  if (detector.input_dim != synth.feature_dim) {
    throw ConfigError("detector.input_dim (" + std::to_string(detector.input_dim) + ") differs from synth.feature_dim (" +
                      std::to_string(synth.feature_dim) + ")");
  }
  for (const auto* t : {&detector_train.epochs, &detector_train.batch_size, &detector_train.window, &phi_train.epochs,
                        &phi_train.batch_size}) {
    if (*t == 0) throw ConfigError("epochs, batch sizes and the training window must be >= 1");
  }
  if (proposal.top_k == 0) throw ConfigError("proposal.top_k must be >= 1");
  if (!(proposal.soft_sigma > 0.0)) throw ConfigError("proposal.soft_sigma must be > 0");
  if (eval.auc_an_max == 0) throw ConfigError("eval.auc_an_max must be >= 1");
}

RunConfig parse_run_config(const std::string& text) {
  RunConfig cfg;
  BranchView branches = view_of(cfg.detector);
  std::string grid = grid_name(cfg.eval.grid);
  auto table = fields(cfg, branches, grid);
  std::set<std::string> sections;
  for (const auto& f : table) sections.insert(f.section);

  std::set<std::string> seen;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  for (std::size_t line_no = 1; std::getline(in, raw); ++line_no) {
    const auto line = text::trim(text::strip_comment(raw));
    const auto where = "config line " + std::to_string(line_no) + ": ";
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "unterminated section header");
      section = std::string(text::trim(line.substr(1, line.size() - 2)));
      if (!sections.count(section)) throw ConfigError(where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + "expected key = value");
    if (section.empty()) throw ConfigError(where + "key outside of any [section]");
    const std::string key(text::trim(line.substr(0, eq)));
    const auto value = text::trim(line.substr(eq + 1));
    const std::string full = section + "." + key;
    const Field* field = nullptr;
    for (const auto& f : table) {
      if (section == f.section && key == f.key) field = &f;
    }
    if (!field) throw ConfigError(where + "unknown key '" + full + "'");
    if (!seen.insert(full).second) throw ConfigError(where + "'" + full + "' set twice");
    try {
      field->set(value);
    } catch (const Error& e) {
      throw ConfigError(where + e.what());
    }
  }
  apply(branches, cfg.detector);
  cfg.eval.grid = IoUGrid::parse(grid);
  cfg.sync();
  cfg.validate();
  return cfg;
}

std::string format_run_config(const RunConfig& cfg) {
  RunConfig copy = cfg;
  BranchView branches = view_of(copy.detector);
  std::string grid = grid_name(copy.eval.grid);
  std::ostringstream out;
  std::string section;
  for (const auto& f : fields(copy, branches, grid)) {
    if (section != f.section) {
      if (!section.empty()) out << '\n';
      section = f.section;
      out << '[' << section << "]\n";
    }
    out << f.key << " = " << f.get() << '\n';
  }
  return out.str();
}

RunConfig load_run_config(const std::string& path) { return parse_run_config(text::read_file(path)); }

}  // namespace tsa::cli
