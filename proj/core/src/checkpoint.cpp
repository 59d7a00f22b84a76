// Copyright (C) 2026 The TSA toolkit authors
// SPDX-License-Identifier: Apache-2.0

#include "tsa/checkpoint.hpp"

#include <bit>
#include <sstream>

#include "tsa/error.hpp"
#include "tsa/text.hpp"

namespace tsa {

namespace {

constexpr char kMagic[4] = {'T', 'S', 'A', '1'};

template <typename U>
void put_le(std::string& out, U value) {
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<char>((value >> (8 * i)) & 0xff));
}

struct Cursor {
  const std::string& bytes;
  std::size_t pos = 0;

  template <typename U>
  U get(const char* what) {
    if (bytes.size() - pos < sizeof(U)) throw DataError(std::string("checkpoint truncated reading ") + what);
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
    pos += sizeof(U);
    return v;
  }
  std::string get_bytes(std::size_t n, const char* what) {
    if (bytes.size() - pos < n) throw DataError(std::string("checkpoint truncated reading ") + what);
    std::string s = bytes.substr(pos, n);
    pos += n;
    return s;
  }
};

}  // namespace

std::string encode_checkpoint(const ad::ParamSet& params, std::uint64_t digest) {
  std::string out(kMagic, 4);
  put_le<std::uint64_t>(out, digest);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(params.size()));
  for (const auto& p : params) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(p.name.size()));
    out += p.name;
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(p.shape.size()));
    for (std::size_t d : p.shape) put_le<std::uint32_t>(out, static_cast<std::uint32_t>(d));
    for (double v : p.values) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  }
  return out;
}

void decode_checkpoint(const std::string& bytes, std::uint64_t expected_digest, ad::ParamSet& params) {
  Cursor in{bytes};
  if (in.get_bytes(4, "magic") != std::string(kMagic, 4)) throw DataError("checkpoint: bad magic (expected TSA1)");
  const auto digest = in.get<std::uint64_t>("digest");
  if (digest != expected_digest) {
    std::ostringstream os;
    os << "checkpoint: config digest mismatch (file " << std::hex << digest << ", active config "
       << expected_digest << ")";
    throw ConfigError(os.str());
  }
  const auto count = in.get<std::uint32_t>("parameter count");
  if (count != params.size()) {
    throw DataError("checkpoint: holds " + std::to_string(count) + " parameters, model has " +
                    std::to_string(params.size()));
  }
  for (auto& p : params) {
    const auto name_len = in.get<std::uint32_t>("name length");
    const std::string name = in.get_bytes(name_len, "name");
    if (name != p.name) throw DataError("checkpoint: expected parameter '" + p.name + "', found '" + name + "'");
    const auto rank = in.get<std::uint32_t>("rank");
    std::vector<std::size_t> shape(rank);
    for (auto& d : shape) d = in.get<std::uint32_t>("dims");
    if (shape != p.shape) throw DataError("checkpoint: shape mismatch for '" + name + "'");
    for (double& v : p.values) v = std::bit_cast<double>(in.get<std::uint64_t>("values"));
  }
  if (in.pos != bytes.size()) throw DataError("checkpoint: trailing bytes after the last parameter");
}

void save_checkpoint(const std::string& path, const ad::ParamSet& params, std::uint64_t digest) {
  text::write_file(path, encode_checkpoint(params, digest));
}

void load_checkpoint(const std::string& path, std::uint64_t expected_digest, ad::ParamSet& params) {
  decode_checkpoint(text::read_file(path), expected_digest, params);
}

}  // namespace tsa
