// Copyright 2026 The tofec Authors.
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


// Systematic MDS erasure code over GF(256) with strip batching.
//
// A file of K strips of b bytes is encoded into N = rK strips: strips 1..K
// are the file verbatim and parity strip K+i is sum_j C[i][j] * strip j with
// the Cauchy matrix C[i][j] = 1 / ((K + i) xor j). Every square submatrix of
// a Cauchy matrix is invertible, so any K strips recover the file; distinct
// evaluation points need N <= 256.
//
// One coded file serves every level k dividing K: batching m = K / k
// consecutive strips into a chunk turns it into an (N/m, k) code.
//
// Container layout, little-endian:
//   0  char[4] magic "TFEC"
//   4  u32     version (1)
//   8  u32     K
//   12 u32     N
//   16 u64     strip size b
//   24 u64     pad (zero bytes appended to the last data strip)
//   32 u8[N b] strips 1..N
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace tofec {

namespace gf256 {
std::uint8_t add(std::uint8_t a, std::uint8_t b);
std::uint8_t mul(std::uint8_t a, std::uint8_t b);
std::uint8_t inv(std::uint8_t a);  // a != 0
std::uint8_t div(std::uint8_t a, std::uint8_t b);
}  // namespace gf256

struct CodedFile {
  std::uint32_t K = 0;
  std::uint32_t N = 0;
  std::uint64_t strip_size = 0;
  std::uint64_t pad = 0;
  std::vector<std::uint8_t> payload;  // N * strip_size bytes

  std::uint64_t original_size() const { return K * strip_size - pad; }
  // Strip s, 1-based.
  std::span<const std::uint8_t> strip(std::uint32_t s) const;
};

inline constexpr std::uint32_t kMaxStrips = 256;

// Row s (1-based) of the N x K generator matrix.
std::vector<std::uint8_t> generator_row(std::uint32_t K, std::uint32_t s);

// K = ceil(size / b); the last strip is zero-padded. r K must be integral.
CodedFile encode(std::span<const std::uint8_t> data, std::uint64_t strip_size,
                 double redundancy);

// Default strip size: the gcd of the desired chunk sizes.
std::uint64_t default_strip_size(std::span<const std::uint64_t> chunk_sizes);

// Byte range [begin, end) of chunk j (1-based) at level k. Requires k | K.
std::pair<std::uint64_t, std::uint64_t> chunk_range(const CodedFile& coded, int k,
                                                    std::uint32_t j);
// Chunks available at level k: N / (K / k).
std::uint32_t chunk_count(const CodedFile& coded, int k);

struct Piece {
  std::uint32_t index = 0;  // 1-based strip or chunk index
  std::vector<std::uint8_t> bytes;
};

// Recovers the original bytes from exactly K distinct strips.
std::vector<std::uint8_t> decode_strips(const CodedFile& meta,
                                        std::span<const Piece> strips);
// Recovers the original bytes from exactly k distinct chunks at level k.
// Only the header fields of `meta` are read.
std::vector<std::uint8_t> decode_chunks(const CodedFile& meta, int k,
                                        std::span<const Piece> chunks);
Piece read_chunk(const CodedFile& coded, int k, std::uint32_t j);

std::vector<std::uint8_t> serialize(const CodedFile& coded);
CodedFile deserialize(std::span<const std::uint8_t> bytes);
void write_coded_file(const std::string& path, const CodedFile& coded);
CodedFile read_coded_file(const std::string& path);

}  // namespace tofec
