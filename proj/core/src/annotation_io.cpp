// Copyright (C) 2026 The TSA toolkit authors
// SPDX-License-Identifier: Apache-2.0

#include <sstream>
#include <unordered_set>

#include "tsa/error.hpp"
#include "tsa/labeling.hpp"
#include "tsa/text.hpp"

namespace tsa {

std::vector<AnnotationSet> parse_annotations(const std::string& text) {
  std::vector<AnnotationSet> videos;
  std::unordered_set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = text::split_whitespace(text::strip_comment(line));
    if (fields.empty()) continue;
    const std::string where = "annotation line " + std::to_string(line_no);
    if (fields.size() < 3 || (fields.size() - 3) % 3 != 0) {
      throw DataError(where + ": expected '<id> <T> <stride> [<start> <end> <class>]...'");
    }
    AnnotationSet video;
    video.video_id = std::string(fields[0]);
    if (!seen.insert(video.video_id).second) throw DataError(where + ": duplicate video id '" + video.video_id + "'");
    video.length = text::parse_uint(fields[1], where + " T");
    video.stride = static_cast<std::uint32_t>(text::parse_uint(fields[2], where + " stride"));
    for (std::size_t i = 3; i < fields.size(); i += 3) {
      Instance inst;
      inst.start = text::parse_double(fields[i], where + " start");
      inst.end = text::parse_double(fields[i + 1], where + " end");
      inst.class_id = static_cast<int>(text::parse_int(fields[i + 2], where + " class"));
      video.instances.push_back(inst);
    }
    try {
      video.validate();
    } catch (const DataError& e) {
      throw DataError(where + ": " + e.what());
    }
    videos.push_back(std::move(video));
  }
  return videos;
}

std::vector<AnnotationSet> read_annotation_file(const std::string& path) {
  return parse_annotations(text::read_file(path));
}

std::string format_annotations(const std::vector<AnnotationSet>& videos) {
  std::ostringstream out;
  out << "# video_id T stride [start end class]...\n";
  for (const auto& v : videos) {
    out << v.video_id << ' ' << v.length << ' ' << v.stride;
    for (const auto& inst : v.instances) {
      out << ' ' << text::format_double(inst.start) << ' ' << text::format_double(inst.end) << ' '
          << inst.class_id;
    }
    out << '\n';
  }
  return out.str();
}

void write_annotation_file(const std::string& path, const std::vector<AnnotationSet>& videos) {
  text::write_file(path, format_annotations(videos));
}

}  // namespace tsa
