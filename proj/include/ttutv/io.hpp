#pragma once

#include <cstdint>
#include <string>

#include "ttutv/dense_tensor.hpp"
#include "ttutv/tt.hpp"

namespace ttutv {

/// Binary container for a dense tensor, fully little-endian:
///   magic "TTUTVTEN" | u32 version=1 | u32 order | u64 dims[order] | f64 payload.
/// Round trips are bitwise exact. Masks reuse the format with 0.0/1.0 payload.
inline constexpr char kTensorMagic[9] = "TTUTVTEN";
/// Container for a train:
///   magic "TTUTVCOR" | u32 version=1 | u32 order | u64 ranks[order+1]
///   | u64 dims[order] | core payloads back to back in storage order.
inline constexpr char kTrainMagic[9] = "TTUTVCOR";
inline constexpr std::uint32_t kFileVersion = 1;

void write_tensor(const std::string& path, const DenseTensor& tensor);
DenseTensor read_tensor(const std::string& path);

void write_tt(const std::string& path, const TTTensor& tt);
TTTensor read_tt(const std::string& path);

/// Text form: first non-comment line holds the whitespace-separated dims, then
/// one value per line in storage order. '#' starts a comment. Parse errors
/// report the 1-based line number as the offset.
DenseTensor read_tensor_text(const std::string& path);

/// Peeks at the magic bytes: "tensor", "train", or throws ParseError.
std::string sniff_kind(const std::string& path);

}  // namespace ttutv
