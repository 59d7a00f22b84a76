// Copyright (C) 2026 The TSA toolkit authors
// SPDX-License-Identifier: Apache-2.0

#include <bit>
#include <cstring>

#include "tsa/error.hpp"
#include "tsa/synth.hpp"
#include "tsa/text.hpp"

namespace tsa {

namespace {

constexpr char kMagic[4] = {'T', 'S', 'A', 'F'};

template <typename U>
void put_le(std::string& out, U value) {
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<char>((value >> (8 * i)) & 0xff));
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  bool at_end() const noexcept { return pos_ == bytes_.size(); }
  std::size_t position() const noexcept { return pos_; }

  template <typename U>
  U get(const char* what) {
    need(sizeof(U), what);
    U value = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      value |= static_cast<U>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(U);
    return value;
  }

  std::string get_bytes(std::size_t n, const char* what) {
    need(n, what);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  void need(std::size_t n, const char* what) const {
    if (bytes_.size() - pos_ < n) {
      throw DataError(std::string("feature file truncated while reading ") + what + " at byte " +
                      std::to_string(pos_));
    }
  }

  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::size_t feature_record_size(const FeatureSequence& seq) {
  return 4 + 2 + 4 + seq.video_id.size() + 3 * 4 + 8 * seq.features.size();
}

std::string encode_features(const std::vector<FeatureSequence>& videos) {
  std::string out;
  for (const auto& v : videos) {
    out.reserve(out.size() + feature_record_size(v));
    out.append(kMagic, 4);
    put_le<std::uint16_t>(out, kFeatureFileVersion);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(v.video_id.size()));
    out += v.video_id;
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(v.length()));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(v.dim()));
    put_le<std::uint32_t>(out, v.stride);
    for (double x : v.features.values()) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(x));
  }
  return out;
}

std::vector<FeatureSequence> decode_features(const std::string& bytes) {
  std::vector<FeatureSequence> videos;
  Reader in(bytes);
  while (!in.at_end()) {
    const std::size_t record_at = in.position();
    if (in.get_bytes(4, "magic") != std::string(kMagic, 4)) {
      throw DataError("feature file: bad magic at byte " + std::to_string(record_at) + " (expected TSAF)");
    }
    const auto version = in.get<std::uint16_t>("version");
    if (version != kFeatureFileVersion) {
      throw DataError("feature file: unsupported version " + std::to_string(version));
    }
    FeatureSequence seq;
    const auto id_len = in.get<std::uint32_t>("id length");
    seq.video_id = in.get_bytes(id_len, "video id");
    const auto T = in.get<std::uint32_t>("T");
    const auto D = in.get<std::uint32_t>("D");
    seq.stride = in.get<std::uint32_t>("stride");
    if (T == 0 || D == 0) throw DataError("feature file: video '" + seq.video_id + "' has an empty matrix");
    std::vector<double> values(static_cast<std::size_t>(T) * D);
    for (double& x : values) x = std::bit_cast<double>(in.get<std::uint64_t>("feature values"));
    seq.features = ad::Tensor2D(D, T, std::move(values));
    if (!seq.features.all_finite()) throw DataError("feature file: non-finite values in '" + seq.video_id + "'");
    videos.push_back(std::move(seq));
  }
  return videos;
}

void write_feature_file(const std::string& path, const std::vector<FeatureSequence>& videos) {
  text::write_file(path, encode_features(videos));
}

std::vector<FeatureSequence> read_feature_file(const std::string& path) {
  return decode_features(text::read_file(path));
}

}  // namespace tsa
