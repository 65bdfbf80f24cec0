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


#include "tofec/codec.h"

#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numeric>
#include <set>

#include "tofec/errors.h"

namespace tofec {
namespace gf256 {
namespace {

struct Tables {
  std::array<std::uint8_t, 512> exp{};
  std::array<int, 256> log{};
  Tables() {
    int x = 1;
    for (int i = 0; i < 255; ++i) {
      exp[i] = static_cast<std::uint8_t>(x);
      log[x] = i;
      x <<= 1;
      if (x & 0x100) x ^= 0x11d;
    }
    for (int i = 255; i < 512; ++i) exp[i] = exp[i - 255];
  }
};

const Tables& tables() {
  static const Tables t;
  return t;
}

}  // namespace

std::uint8_t add(std::uint8_t a, std::uint8_t b) { return a ^ b; }

std::uint8_t mul(std::uint8_t a, std::uint8_t b) {
  if (a == 0 || b == 0) return 0;
  const auto& t = tables();
  return t.exp[t.log[a] + t.log[b]];
}

std::uint8_t inv(std::uint8_t a) {
  if (a == 0) throw NumericError("zero has no inverse in GF(256)");
  const auto& t = tables();
  return t.exp[255 - t.log[a]];
}

std::uint8_t div(std::uint8_t a, std::uint8_t b) { return mul(a, inv(b)); }

}  // namespace gf256

namespace {

// dst ^= c * src
void mul_add(std::span<std::uint8_t> dst, std::span<const std::uint8_t> src,
             std::uint8_t c) {
  if (c == 0) return;
  std::array<std::uint8_t, 256> row;
  for (int v = 0; v < 256; ++v) row[v] = gf256::mul(c, static_cast<std::uint8_t>(v));
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] ^= row[src[i]];
}

void check_header(const CodedFile& c) {
  if (c.K < 1 || c.N < c.K || c.N > kMaxStrips) throw InputError("bad (N, K)");
  if (c.strip_size < 1) throw InputError("strip size must be positive");
  if (c.pad >= c.strip_size) throw InputError("pad must be smaller than a strip");
}

std::uint32_t strips_per_chunk(const CodedFile& c, int k) {
  if (k < 1 || c.K % static_cast<std::uint32_t>(k) != 0) {
    throw InputError("level k = " + std::to_string(k) + " does not divide K = " +
                     std::to_string(c.K));
  }
  return c.K / static_cast<std::uint32_t>(k);
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_le(std::span<const std::uint8_t> b, std::size_t at, int width) {
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(b[at + i]) << (8 * i);
  return v;
}

constexpr std::size_t kHeaderSize = 32;
constexpr std::uint32_t kVersion = 1;

}  // namespace

std::span<const std::uint8_t> CodedFile::strip(std::uint32_t s) const {
  if (s < 1 || s > N) throw InputError("strip index out of range");
  return std::span<const std::uint8_t>(payload).subspan((s - 1) * strip_size, strip_size);
}

std::vector<std::uint8_t> generator_row(std::uint32_t K, std::uint32_t s) {
  std::vector<std::uint8_t> row(K, 0);
  if (s <= K) {
    row[s - 1] = 1;
    return row;
  }
  const std::uint32_t x = s - 1;  // K + i for parity i
  if (x > 255) throw InputError("strip index exceeds the field size");
  for (std::uint32_t j = 0; j < K; ++j) {
    row[j] = gf256::inv(static_cast<std::uint8_t>(x ^ j));
  }
  return row;
}

CodedFile encode(std::span<const std::uint8_t> data, std::uint64_t strip_size,
                 double redundancy) {
  if (data.empty()) throw InputError("cannot encode an empty file");
  if (strip_size < 1) throw InputError("strip size must be positive");
  if (!(redundancy >= 1)) throw InputError("redundancy must be at least 1");
  CodedFile c;
  const std::uint64_t k = (data.size() + strip_size - 1) / strip_size;
  const double n_real = redundancy * static_cast<double>(k);
  const double n_round = std::round(n_real);
  if (std::abs(n_real - n_round) > 1e-9) throw InputError("r K must be an integer");
  if (n_round > kMaxStrips) {
    throw InputError("N = " + std::to_string(static_cast<long long>(n_round)) +
                     " exceeds the GF(256) bound of 256 strips");
  }
  c.K = static_cast<std::uint32_t>(k);
  c.N = static_cast<std::uint32_t>(n_round);
  c.strip_size = strip_size;
  c.pad = k * strip_size - data.size();
  c.payload.assign(c.N * strip_size, 0);
  std::memcpy(c.payload.data(), data.data(), data.size());
  const std::span<const std::uint8_t> sys(c.payload.data(), c.K * strip_size);
  for (std::uint32_t s = c.K + 1; s <= c.N; ++s) {
    const auto row = generator_row(c.K, s);
    std::span<std::uint8_t> dst(c.payload.data() + (s - 1) * strip_size, strip_size);
    for (std::uint32_t j = 0; j < c.K; ++j) {
      mul_add(dst, sys.subspan(j * strip_size, strip_size), row[j]);
    }
  }
  return c;
}

std::uint64_t default_strip_size(std::span<const std::uint64_t> chunk_sizes) {
  std::uint64_t g = 0;
  for (auto s : chunk_sizes) g = std::gcd(g, s);
  if (g == 0) throw InputError("chunk sizes must include a positive value");
  return g;
}

std::uint32_t chunk_count(const CodedFile& coded, int k) {
  return coded.N / strips_per_chunk(coded, k);
}

std::pair<std::uint64_t, std::uint64_t> chunk_range(const CodedFile& coded, int k,
                                                    std::uint32_t j) {
  check_header(coded);
  const std::uint32_t m = strips_per_chunk(coded, k);
  if (j < 1 || j > coded.N / m) throw InputError("chunk index out of range");
  const std::uint64_t len = static_cast<std::uint64_t>(m) * coded.strip_size;
  return {(j - 1) * len, j * len};
}

Piece read_chunk(const CodedFile& coded, int k, std::uint32_t j) {
  const auto [b, e] = chunk_range(coded, k, j);
  if (e > coded.payload.size()) throw InputError("payload is shorter than its header");
  return {j, std::vector<std::uint8_t>(coded.payload.begin() + static_cast<std::ptrdiff_t>(b),
                                       coded.payload.begin() + static_cast<std::ptrdiff_t>(e))};
}

std::vector<std::uint8_t> decode_strips(const CodedFile& meta,
                                        std::span<const Piece> strips) {
  check_header(meta);
  const std::uint32_t K = meta.K;
  const std::uint64_t b = meta.strip_size;
  if (strips.size() != K) {
    throw InputError("decoding needs exactly K = " + std::to_string(K) + " strips");
  }
  std::set<std::uint32_t> seen;
  for (const auto& p : strips) {
    if (p.index < 1 || p.index > meta.N) throw InputError("strip index out of range");
    if (!seen.insert(p.index).second) throw InputError("duplicate strip index");
    if (p.bytes.size() != b) throw InputError("strip has the wrong size");
  }

  std::vector<std::uint8_t> out(K * b, 0);
  // Systematic strips land in place; only the missing ones need solving.
  std::vector<bool> have(K, false);
  for (const auto& p : strips) {
    if (p.index <= K) {
      std::memcpy(out.data() + (p.index - 1) * b, p.bytes.data(), b);
      have[p.index - 1] = true;
    }
  }
  std::vector<std::uint32_t> missing;
  for (std::uint32_t j = 0; j < K; ++j) {
    if (!have[j]) missing.push_back(j);
  }
  if (!missing.empty()) {
    // Each parity strip minus its known-column contributions is a linear
    // combination of the missing data strips: solve that square system.
    const std::size_t m = missing.size();
    std::vector<std::vector<std::uint8_t>> a;
    std::vector<std::vector<std::uint8_t>> rhs;
    for (const auto& p : strips) {
      if (p.index <= K) continue;
      const auto row = generator_row(K, p.index);
      std::vector<std::uint8_t> r = p.bytes;
      for (std::uint32_t j = 0; j < K; ++j) {
        if (have[j]) mul_add(r, std::span<const std::uint8_t>(out).subspan(j * b, b), row[j]);
      }
      std::vector<std::uint8_t> coeffs(m);
      for (std::size_t c = 0; c < m; ++c) coeffs[c] = row[missing[c]];
      a.push_back(std::move(coeffs));
      rhs.push_back(std::move(r));
    }
    for (std::size_t col = 0; col < m; ++col) {
      std::size_t piv = col;
      while (piv < m && a[piv][col] == 0) ++piv;
      if (piv == m) throw NumericError("singular decoding matrix");
      std::swap(a[piv], a[col]);
      std::swap(rhs[piv], rhs[col]);
      const std::uint8_t scale = gf256::inv(a[col][col]);
      for (auto& v : a[col]) v = gf256::mul(v, scale);
      for (auto& v : rhs[col]) v = gf256::mul(v, scale);
      for (std::size_t r = 0; r < m; ++r) {
        if (r == col || a[r][col] == 0) continue;
        const std::uint8_t f = a[r][col];
        for (std::size_t c = 0; c < m; ++c) a[r][c] ^= gf256::mul(f, a[col][c]);
        mul_add(rhs[r], rhs[col], f);
      }
    }
    for (std::size_t c = 0; c < m; ++c) {
      std::memcpy(out.data() + missing[c] * b, rhs[c].data(), b);
    }
  }
  out.resize(meta.original_size());
  return out;
}

std::vector<std::uint8_t> decode_chunks(const CodedFile& meta, int k,
                                        std::span<const Piece> chunks) {
  check_header(meta);
  const std::uint32_t m = strips_per_chunk(meta, k);
  if (chunks.size() != static_cast<std::size_t>(k)) {
    throw InputError("decoding at level k needs exactly k chunks");
  }
  std::set<std::uint32_t> seen;
  std::vector<Piece> strips;
  for (const auto& c : chunks) {
    if (c.index < 1 || c.index > meta.N / m) throw InputError("chunk index out of range");
    if (!seen.insert(c.index).second) throw InputError("duplicate chunk index");
    if (c.bytes.size() != m * meta.strip_size) throw InputError("chunk has the wrong size");
    for (std::uint32_t s = 0; s < m; ++s) {
      const auto first = c.bytes.begin() + static_cast<std::ptrdiff_t>(s * meta.strip_size);
      strips.push_back({(c.index - 1) * m + s + 1,
                        std::vector<std::uint8_t>(
                            first, first + static_cast<std::ptrdiff_t>(meta.strip_size))});
    }
  }
  return decode_strips(meta, strips);
}

std::vector<std::uint8_t> serialize(const CodedFile& coded) {
  check_header(coded);
  if (coded.payload.size() != coded.N * coded.strip_size) {
    throw InputError("payload size does not match the header");
  }
  std::vector<std::uint8_t> out{'T', 'F', 'E', 'C'};
  out.reserve(kHeaderSize + coded.payload.size());
  put_u32(out, kVersion);
  put_u32(out, coded.K);
  put_u32(out, coded.N);
  put_u64(out, coded.strip_size);
  put_u64(out, coded.pad);
  out.insert(out.end(), coded.payload.begin(), coded.payload.end());
  return out;
}

CodedFile deserialize(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderSize || std::memcmp(bytes.data(), "TFEC", 4) != 0) {
    throw InputError("not a coded file");
  }
  if (get_le(bytes, 4, 4) != kVersion) throw InputError("unsupported coded file version");
  CodedFile c;
  c.K = static_cast<std::uint32_t>(get_le(bytes, 8, 4));
  c.N = static_cast<std::uint32_t>(get_le(bytes, 12, 4));
  c.strip_size = get_le(bytes, 16, 8);
  c.pad = get_le(bytes, 24, 8);
  check_header(c);
  if (bytes.size() - kHeaderSize != c.N * c.strip_size) {
    throw InputError("coded file payload has the wrong length");
  }
  c.payload.assign(bytes.begin() + kHeaderSize, bytes.end());
  return c;
}

void write_coded_file(const std::string& path, const CodedFile& coded) {
  const auto bytes = serialize(coded);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

CodedFile read_coded_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

}  // namespace tofec
