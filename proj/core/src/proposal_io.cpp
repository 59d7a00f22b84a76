// Copyright (C) 2026 The TSA toolkit authors
// SPDX-License-Identifier: Apache-2.0

#include <sstream>

#include "tsa/error.hpp"
#include "tsa/proposal.hpp"
#include "tsa/text.hpp"

namespace tsa {

std::string format_proposals(const std::vector<VideoProposals>& videos) {
  std::ostringstream out;
  for (const auto& v : videos) {
    for (const auto& p : v.proposals) {
      out << v.video_id << '\t' << p.start << '\t' << p.end << '\t' << text::format_double(p.score) << '\t'
          << text::format_double(p.p_start) << '\t' << text::format_double(p.p_end) << '\t'
          << text::format_double(p.phi);
      if (p.class_id >= 0) out << '\t' << p.class_id;
      out << '\n';
    }
  }
  return out.str();
}

std::vector<VideoProposals> parse_proposals(const std::string& contents) {
  std::vector<VideoProposals> videos;
  std::istringstream in(contents);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    const auto fields = text::split(text::trim(line), '\t');
    const std::string where = "proposal line " + std::to_string(line_no);
    if (fields.size() != 7 && fields.size() != 8) {
      throw DataError(where + ": expected 7 or 8 tab-separated fields, got " + std::to_string(fields.size()));
    }
    Proposal p;
    p.start = text::parse_uint(fields[1], where + " start");
    p.end = text::parse_uint(fields[2], where + " end");
    if (!(p.start < p.end)) throw DataError(where + ": start must precede end");
    p.mid = mid_index(p.start, p.end);
    p.score = text::parse_double(fields[3], where + " score");
    p.p_start = text::parse_double(fields[4], where + " p_start");
    p.p_end = text::parse_double(fields[5], where + " p_end");
    p.phi = text::parse_double(fields[6], where + " phi");
    if (fields.size() == 8) p.class_id = static_cast<int>(text::parse_int(fields[7], where + " class"));
    const std::string id(fields[0]);
    if (videos.empty() || videos.back().video_id != id) {
      for (const auto& v : videos) {
        if (v.video_id == id) throw DataError(where + ": proposals of video '" + id + "' are not contiguous");
      }
      videos.push_back(VideoProposals{id, {}});
    }
    auto& list = videos.back().proposals;
    if (!list.empty() && list.back().score < p.score) {
      throw DataError(where + ": proposals must be sorted by score descending within a video");
    }
    list.push_back(p);
  }
  return videos;
}

void write_proposal_file(const std::string& path, const std::vector<VideoProposals>& videos) {
  text::write_file(path, format_proposals(videos));
}

std::vector<VideoProposals> read_proposal_file(const std::string& path) {
  return parse_proposals(text::read_file(path));
}

std::vector<VideoPredictions> to_predictions(const std::vector<VideoProposals>& videos) {
  std::vector<VideoPredictions> out;
  out.reserve(videos.size());
  for (const auto& v : videos) {
    VideoPredictions pred{v.video_id, {}};
    for (const auto& p : v.proposals) pred.segments.push_back({p.segment(), p.score, p.class_id});
    out.push_back(std::move(pred));
  }
  return out;
}

}  // namespace tsa
