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


#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <random>

#include "doctest.h"
#include "tofec/codec.h"
#include "tofec/errors.h"

using namespace tofec;

namespace {

std::vector<std::uint8_t> random_bytes(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::vector<std::uint8_t> v(n);
  for (auto& b : v) b = static_cast<std::uint8_t>(g());
  return v;
}

// Calls f on every K-subset of {1..N}.
template <class F>
void for_each_subset(std::uint32_t n, std::uint32_t k, F&& f) {
  std::vector<bool> mask(n, false);
  std::fill(mask.begin(), mask.begin() + k, true);
  do {
    std::vector<std::uint32_t> idx;
    for (std::uint32_t i = 0; i < n; ++i) {
      if (mask[i]) idx.push_back(i + 1);
    }
    f(idx);
  } while (std::prev_permutation(mask.begin(), mask.end()));
}

}  // namespace

TEST_CASE("GF(256) arithmetic") {
  CHECK(gf256::mul(2, 0x80) == 0x1d);
  for (int a = 1; a < 256; ++a) {
    const auto x = static_cast<std::uint8_t>(a);
    REQUIRE(gf256::mul(x, gf256::inv(x)) == 1);
    REQUIRE(gf256::div(gf256::mul(x, 7), 7) == x);
  }
  CHECK_THROWS_AS(gf256::inv(0), NumericError);
}

TEST_CASE("encode layout") {
  const auto data = random_bytes(3000, 1);
  const auto c = encode(data, 500, 2.0);
  CHECK(c.K == 6);
  CHECK(c.N == 12);
  CHECK(c.payload.size() == 6000);
  CHECK(std::equal(data.begin(), data.end(), c.payload.begin()));

  const auto same = encode(data, 500, 1.0);
  CHECK(same.payload == data);

  const std::vector<std::uint8_t> small{1, 2, 3, 4};
  const auto rep = encode(small, 4, 2.0);
  CHECK(rep.K == 1);
  CHECK(rep.N == 2);
  const auto s1 = rep.strip(1), s2 = rep.strip(2);
  CHECK(std::equal(s1.begin(), s1.end(), s2.begin()));

  CHECK_THROWS_AS(encode(data, 500, 1.1), InputError);
  CHECK_THROWS_AS(encode(random_bytes(200, 2), 1, 2.0), InputError);  // N = 400
  CHECK_THROWS_AS(encode({}, 4, 2.0), InputError);
}

TEST_CASE("chunk ranges at several levels") {
  const auto c = encode(random_bytes(3000, 2), 500, 2.0);
  CHECK(chunk_range(c, 1, 1) == std::pair<std::uint64_t, std::uint64_t>{0, 3000});
  CHECK(chunk_range(c, 1, 2) == std::pair<std::uint64_t, std::uint64_t>{3000, 6000});
  CHECK(chunk_count(c, 3) == 6);
  CHECK(chunk_range(c, 3, 2) == std::pair<std::uint64_t, std::uint64_t>{1000, 2000});
  CHECK(chunk_range(c, 6, 7) == std::pair<std::uint64_t, std::uint64_t>{3000, 3500});
  CHECK_THROWS_AS(chunk_range(c, 4, 1), InputError);
  CHECK_THROWS_AS(chunk_range(c, 2, 5), InputError);
}

TEST_CASE("every K-subset decodes") {
  for (auto [n, k] : {std::pair<std::uint32_t, std::uint32_t>{4, 2}, {6, 3}, {12, 6}}) {
    const auto data = random_bytes(k * 64, n);
    const auto c = encode(data, 64, static_cast<double>(n) / k);
    std::size_t subsets = 0;
    for_each_subset(n, k, [&](const std::vector<std::uint32_t>& idx) {
      std::vector<Piece> pieces;
      for (auto s : idx) {
        const auto st = c.strip(s);
        pieces.push_back({s, {st.begin(), st.end()}});
      }
      REQUIRE(decode_strips(c, pieces) == data);
      ++subsets;
    });
    if (n == 12) CHECK(subsets == 924);
  }
}

TEST_CASE("level consistency on one coded file") {
  const auto data = random_bytes(6 * 128, 9);
  const auto c = encode(data, 128, 2.0);
  for (int k : {1, 2, 3, 6}) {
    const auto count = chunk_count(c, k);
    for_each_subset(count, static_cast<std::uint32_t>(k), [&](const std::vector<std::uint32_t>& idx) {
      std::vector<Piece> chunks;
      for (auto j : idx) chunks.push_back(read_chunk(c, k, j));
      REQUIRE(decode_chunks(c, k, chunks) == data);
    });
  }
  std::vector<Piece> two{read_chunk(c, 2, 2), read_chunk(c, 2, 4)};
  CHECK(decode_chunks(c, 2, two) == data);
  std::vector<Piece> parity{read_chunk(c, 1, 2)};
  CHECK(decode_chunks(c, 1, parity) == data);
  std::vector<Piece> dup{read_chunk(c, 2, 1), read_chunk(c, 2, 1)};
  CHECK_THROWS_AS(decode_chunks(c, 2, dup), InputError);
  std::vector<Piece> few{read_chunk(c, 3, 1)};
  CHECK_THROWS_AS(decode_chunks(c, 3, few), InputError);
}

TEST_CASE("padding round trips for every pad length") {
  const std::uint64_t b = 16;
  for (std::uint64_t len = 3 * b; len > 2 * b; --len) {
    const auto data = random_bytes(len, len);
    const auto c = encode(data, b, 2.0);
    CHECK(c.pad == 3 * b - len);
    std::vector<Piece> parity;
    for (std::uint32_t s = 4; s <= 6; ++s) {
      const auto st = c.strip(s);
      parity.push_back({s, {st.begin(), st.end()}});
    }
    CHECK(decode_strips(c, parity) == data);
  }
}

TEST_CASE("default strip size is the gcd of chunk sizes") {
  const std::vector<std::uint64_t> sizes{3000000, 1500000, 1000000, 500000};
  CHECK(default_strip_size(sizes) == 500000);
}

TEST_CASE("container format") {
  const auto data = random_bytes(1000, 4);
  const auto c = encode(data, 300, 2.0);
  const auto bytes = serialize(c);
  REQUIRE(bytes.size() == 32 + c.payload.size());
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "TFEC");
  CHECK(bytes[4] == 1);
  CHECK(bytes[8] == 4);    // K
  CHECK(bytes[12] == 8);   // N
  CHECK(bytes[16] == 44);  // 300 = 0x12c
  CHECK(bytes[17] == 1);
  CHECK(bytes[24] == 200);  // pad
  const auto back = deserialize(bytes);
  CHECK(back.K == c.K);
  CHECK(back.N == c.N);
  CHECK(back.pad == c.pad);
  CHECK(back.payload == c.payload);
  auto broken = bytes;
  broken[0] = 'X';
  CHECK_THROWS_AS(deserialize(broken), InputError);
  broken = bytes;
  broken.pop_back();
  CHECK_THROWS_AS(deserialize(broken), InputError);

  const auto path = std::filesystem::temp_directory_path() / "tofec_codec_test.tfec";
  write_coded_file(path.string(), c);
  CHECK(read_coded_file(path.string()).payload == c.payload);
  std::filesystem::remove(path);
}
