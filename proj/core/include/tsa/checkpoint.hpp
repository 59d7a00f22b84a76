// Copyright (C) 2026 The TSA toolkit authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

#include "tsa/autodiff.hpp"

namespace tsa {

// Parameter checkpoint, little endian:
//   "TSA1"          magic
//   u64             config digest
//   u32             parameter count
//   per parameter:  u32 name length, name bytes, u32 rank, u32 dims[rank],
//                   f64 values
// Loading checks the digest against the active configuration, then the
// names and shapes against the receiving ParamSet.

std::string encode_checkpoint(const ad::ParamSet& params, std::uint64_t digest);
void decode_checkpoint(const std::string& bytes, std::uint64_t expected_digest, ad::ParamSet& params);

void save_checkpoint(const std::string& path, const ad::ParamSet& params, std::uint64_t digest);
void load_checkpoint(const std::string& path, std::uint64_t expected_digest, ad::ParamSet& params);

}  // namespace tsa
