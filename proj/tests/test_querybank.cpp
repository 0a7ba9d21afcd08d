#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "clipsep/querybank.hpp"
#include "clipsep/rng.hpp"

using namespace clipsep;

namespace {

std::vector<float> random_vec(Rng& rng) {
  std::vector<float> v(kEmbedDim);
  for (auto& x : v) x = float(rng.normal());
  return v;
}

}  // namespace

TEST_CASE("embedding bank save/load round trip is bitwise lossless") {
  Rng rng(1);
  EmbeddingBank bank;
  bank.add("violin", random_vec(rng));
  bank.add("dog barking", random_vec(rng));
  bank.add("rain", random_vec(rng));
  bank.save("/tmp/clipsep_test_bank.qemb");

  auto loaded = EmbeddingBank::load("/tmp/clipsep_test_bank.qemb");
  REQUIRE(loaded.size() == 3);
  for (const auto& id : {"violin", "dog barking", "rain"}) {
    const auto& a = bank.lookup(id);
    const auto& b = loaded.lookup(id);
    REQUIRE(b.size() == std::size_t(kEmbedDim));
    CHECK(std::equal(a.begin(), a.end(), b.begin()));
  }
}

TEST_CASE("embedding bank format errors") {
  SECTION("wrong magic") {
    std::ofstream os("/tmp/clipsep_bad_magic.qemb", std::ios::binary);
    os << "NOTABANKxxxxxxxxxxx";
    os.close();
    CHECK_THROWS_AS(EmbeddingBank::load("/tmp/clipsep_bad_magic.qemb"), FormatError);
  }
  SECTION("wrong dim field") {
    std::string buf = "QEMBANK1";
    const std::uint32_t dim = 256, count = 0;
    buf.append(reinterpret_cast<const char*>(&dim), 4);
    buf.append(reinterpret_cast<const char*>(&count), 4);
    std::ofstream os("/tmp/clipsep_bad_dim.qemb", std::ios::binary);
    os.write(buf.data(), std::streamsize(buf.size()));
    os.close();
    CHECK_THROWS_AS(EmbeddingBank::load("/tmp/clipsep_bad_dim.qemb"), FormatError);
  }
  SECTION("truncated record") {
    Rng rng(2);
    EmbeddingBank bank;
    bank.add("a", random_vec(rng));
    bank.save("/tmp/clipsep_trunc.qemb");
    std::ifstream in("/tmp/clipsep_trunc.qemb", std::ios::binary);
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();
    std::ofstream os("/tmp/clipsep_trunc.qemb", std::ios::binary);
    os.write(buf.data(), 100);  // cut inside the first record
    os.close();
    try {
      EmbeddingBank::load("/tmp/clipsep_trunc.qemb");
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(e.byte_offset > 0);
    }
  }
}

TEST_CASE("frame_query averages three frame embeddings") {
  Rng rng(3);
  EmbeddingBank bank;
  auto e1 = random_vec(rng), e2 = random_vec(rng), e3 = random_vec(rng);
  bank.add("f0", e1);
  bank.add("f1", e2);
  bank.add("f2", e3);

  SECTION("mean of identical vectors is the vector") {
    auto q = frame_query(bank, {"f0", "f0", "f0"});
    CHECK(q.modality == QueryModality::image);
    for (int i = 0; i < kEmbedDim; ++i) CHECK(q.vector[std::size_t(i)] == e1[std::size_t(i)]);
  }
  SECTION("mean matches a scalar-loop oracle") {
    auto q = frame_query(bank, {"f0", "f1", "f2"});
    for (int i = 0; i < kEmbedDim; ++i) {
      const float expected =
          (e1[std::size_t(i)] + e2[std::size_t(i)] + e3[std::size_t(i)]) / 3.0f;
      CHECK(q.vector[std::size_t(i)] == Catch::Approx(expected).margin(1e-6));
    }
  }
  SECTION("missing id names the id") {
    try {
      frame_query(bank, {"f0", "nope", "f2"});
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("nope") != std::string::npos);
    }
  }
  SECTION("empty id list is rejected") {
    CHECK_THROWS_AS(frame_query(bank, {}), InvalidInput);
  }
}

TEST_CASE("text_query uses the four ensembling templates verbatim") {
  Rng rng(4);
  EmbeddingBank bank;
  // The four template strings instantiated with "dog barking".
  const std::vector<std::string> expected_ids = {
      "a photo of dog barking",
      "a photo of the small dog barking",
      "a low resolution photo of a dog barking",
      "a photo of many dog barking",
  };
  auto inst = default_query_templates().instantiate("dog barking");
  REQUIRE(inst == expected_ids);

  std::vector<std::vector<float>> vecs;
  for (const auto& id : expected_ids) {
    vecs.push_back(random_vec(rng));
    bank.add(id, vecs.back());
  }

  SECTION("mean over four distinct vectors") {
    auto q = text_query(bank, "dog barking");
    CHECK(q.modality == QueryModality::text);
    for (int i = 0; i < kEmbedDim; ++i) {
      float expected = 0;
      for (const auto& v : vecs) expected += v[std::size_t(i)];
      expected /= 4.0f;
      CHECK(q.vector[std::size_t(i)] == Catch::Approx(expected).margin(1e-6));
    }
  }
  SECTION("identical template vectors collapse to that vector") {
    EmbeddingBank flat;
    auto v = random_vec(rng);
    for (const auto& id : default_query_templates().instantiate("rain")) flat.add(id, v);
    auto q = text_query(flat, "rain");
    for (int i = 0; i < kEmbedDim; ++i) CHECK(q.vector[std::size_t(i)] == v[std::size_t(i)]);
  }
  SECTION("missing instantiated ids are listed") {
    try {
      text_query(bank, "cat");
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("a photo of cat") != std::string::npos);
      CHECK(std::string(e.what()).find("a photo of many cat") != std::string::npos);
    }
  }
}

TEST_CASE("mean-embedding queries are permutation invariant") {
  Rng rng(5);
  EmbeddingBank bank;
  bank.add("a", random_vec(rng));
  bank.add("b", random_vec(rng));
  bank.add("c", random_vec(rng));
  auto q1 = frame_query(bank, {"a", "b", "c"});
  auto q2 = frame_query(bank, {"c", "a", "b"});
  for (int i = 0; i < kEmbedDim; ++i)
    CHECK(q1.vector[std::size_t(i)] == Catch::Approx(q2.vector[std::size_t(i)]).margin(1e-6));
}

TEST_CASE("template validation") {
  QueryTemplateSet empty;
  CHECK_THROWS_AS(empty.validate(), InvalidInput);
  QueryTemplateSet no_ph{{"a photo of"}};
  CHECK_THROWS_AS(no_ph.validate(), InvalidInput);
  QueryTemplateSet two_ph{{"{} and {}"}};
  CHECK_THROWS_AS(two_ph.validate(), InvalidInput);
}
