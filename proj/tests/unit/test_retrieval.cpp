#include <doctest.h>

#include <cmath>
#include <random>

#include "../oracles.hpp"
#include "ginger/error.hpp"
#include "ginger/retrieval.hpp"

using namespace ginger;

namespace {

std::vector<Passage> five_docs() {
  return {Passage("d1", "Apple pie is a classic dessert."),
          Passage("d2", "The apple orchard grows many apple varieties, apple after apple."),
          Passage("d3", "Pie crust needs butter and flour."), Passage("d4", "Bananas are yellow."),
          Passage("d5", "Grandma's apple pie recipe: apple, pie dough, cinnamon.")};
}

// Fixed vectors keyed by text, for dense tests.
class TableEmbedder : public EmbeddingProvider {
 public:
  explicit TableEmbedder(std::map<std::string, std::vector<float>> table, std::size_t dim)
      : table_(std::move(table)), dim_(dim) {}
  std::size_t dimension() const override { return dim_; }
  std::vector<float> embed(std::string_view text) const override {
    return table_.at(std::string(text));
  }

 private:
  std::map<std::string, std::vector<float>> table_;
  std::size_t dim_;
};

}  // namespace

TEST_CASE("index statistics") {
  std::vector<Passage> ps = {Passage("a", "one two three"), Passage("b", "one two three four five")};
  const auto index = index_corpus(ps);
  CHECK(index.doc_count() == 2);
  CHECK(index.avg_doc_length() == doctest::Approx(4.0));
  CHECK(index.postings("one").size() == 2);
  CHECK(index.postings("five").size() == 1);
  CHECK(index.postings("six").empty());
}

TEST_CASE("empty corpus gives an empty index") {
  const auto index = index_corpus({});
  CHECK(index.doc_count() == 0);
  CHECK(sparse_search(index, "anything", 10).empty());
}

TEST_CASE("duplicate passage ids are rejected") {
  std::vector<Passage> ps = {Passage("a", "x"), Passage("a", "y")};
  try {
    index_corpus(ps);
    FAIL("expected DuplicatePassageId");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DuplicatePassageId);
  }
}

TEST_CASE("sparse search basics") {
  std::vector<Passage> one = {Passage("only", "Solar energy is clean.")};
  const auto idx = index_corpus(one);
  const auto r = sparse_search(idx, "solar", 5, "q");
  REQUIRE(r.size() == 1);
  CHECK(r[0].passage_id == "only");
  CHECK(r.query_id() == "q");
  CHECK(sparse_search(index_corpus(five_docs()), "zebra quantum", 5).empty());
}

TEST_CASE("sparse search matches the hand-computed BM25 oracle") {
  // Frozen from an independent evaluation of BM25 (k1 = 1.2, b = 0.75,
  // idf = ln(1 + (N - df + .5)/(df + .5))) over all five documents.
  const auto r = sparse_search(index_corpus(five_docs()), "apple pie", 10);
  REQUIRE(r.size() == 4);
  CHECK(r.ids() == std::vector<std::string>{"d5", "d1", "d2", "d3"});
  CHECK(r[0].score == doctest::Approx(1.3586162849133951).epsilon(1e-12));
  CHECK(r[1].score == doctest::Approx(1.1324982655844105).epsilon(1e-12));
  CHECK(r[2].score == doctest::Approx(0.8434505911047072).epsilon(1e-12));
  CHECK(r[3].score == doctest::Approx(0.5662491327922052).epsilon(1e-12));
  CHECK(sparse_search(index_corpus(five_docs()), "apple pie", 2).size() == 2);
}

TEST_CASE("index snapshot round-trips") {
  const auto index = index_corpus(five_docs());
  const auto copy = SparseIndex::from_json(nlohmann::json::parse(index.to_json().dump()));
  CHECK(copy.doc_count() == index.doc_count());
  CHECK(copy.avg_doc_length() == index.avg_doc_length());
  CHECK(sparse_search(copy, "apple pie", 10) == sparse_search(index, "apple pie", 10));
  CHECK_THROWS_AS(SparseIndex::from_json(nlohmann::json{{"doc_ids", {"a"}}}), Error);
}

TEST_CASE("dense search by cosine similarity") {
  TableEmbedder emb({{"a", {1, 0, 0}}, {"b", {0, 1, 0}}, {"c", {0, 0, 1}}, {"qa", {1, 0, 0}},
                     {"qz", {0, 0, 0}}},
                    3);
  std::vector<Passage> ps = {Passage("pa", "a"), Passage("pb", "b"), Passage("pc", "c")};
  const auto vecs = embed_corpus(emb, ps);
  const auto hit = dense_search(emb, vecs, "qa", 3, "q");
  CHECK(hit[0].passage_id == "pa");
  CHECK(hit[0].score == doctest::Approx(1.0));

  const auto none = dense_search(emb, vecs, "qz", 3, "q");
  CHECK(none.ids() == std::vector<std::string>{"pa", "pb", "pc"});
  for (const auto& e : none.entries()) CHECK(e.score == 0.0);

  TableEmbedder wrong({{"x", {1, 0}}}, 2);
  try {
    dense_search(wrong, vecs, "x", 3);
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DimensionMismatch);
  }
}

TEST_CASE("dense search matches exhaustive dot products") {
  const std::vector<std::vector<float>> v = {{1, 2, 0, 1}, {0, 1, 1, 0}, {3, 0, 1, 1}, {-1, 1, 0, 2}};
  const std::vector<float> q = {1, 1, 0, 1};
  std::map<std::string, std::vector<float>> table = {{"q", q}};
  std::vector<Passage> ps;
  oracle::Ranking expected;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto key = "t" + std::to_string(i);
    table[key] = v[i];
    ps.emplace_back("p" + std::to_string(i), key);
    double dot = 0, nq = 0, nv = 0;
    for (std::size_t d = 0; d < 4; ++d) {
      dot += q[d] * v[i][d];
      nq += q[d] * q[d];
      nv += v[i][d] * v[i][d];
    }
    expected.emplace_back("p" + std::to_string(i), dot / std::sqrt(nq * nv));
  }
  expected = oracle::sort_canonical(expected);
  TableEmbedder emb(table, 4);
  const auto got = dense_search(emb, embed_corpus(emb, ps), "q", 4);
  REQUIRE(got.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(got[i].passage_id == expected[i].first);
    CHECK(got[i].score == doctest::Approx(expected[i].second).epsilon(1e-12));
  }
}

TEST_CASE("hashing embedder is deterministic and normalized") {
  HashingEmbedder emb(64);
  const auto a = emb.embed("Solar panels are cheap");
  CHECK(a == emb.embed("solar PANELS are cheap!"));
  double norm = 0;
  for (float x : a) norm += x * x;
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(cosine_similarity(a, emb.embed("solar panels are cheap")) == doctest::Approx(1.0));
  for (float x : emb.embed("...")) CHECK(x == 0.0F);
}

TEST_CASE("rrf fuse examples") {
  RankedList a("q", {{"d", 3.0}, {"x", 2.0}});
  RankedList b("q", {{"d", 9.0}, {"y", 1.0}, {"z", 0.5}});
  RankedList c("q", {{"u", 9.0}, {"v", 8.0}, {"w", 7.0}});
  const auto fused = rrf_fuse({{a, b}, 60.0}, 10);
  CHECK(fused[0].passage_id == "d");
  CHECK(fused[0].score == doctest::Approx(2.0 / 61.0).epsilon(1e-15));
  CHECK(2.0 / 61.0 == doctest::Approx(0.032787).epsilon(1e-5));

  const auto single = rrf_fuse({{c}, 60.0}, 10);
  CHECK(single.ids() == c.ids());
  CHECK(single[2].score == 1.0 / 63.0);

  CHECK(rrf_fuse({{a, b}, 60.0}, 1).size() == 1);
}

TEST_CASE("rrf of a list with itself keeps its order") {
  RankedList a("q", {{"p1", 0.9}, {"p2", 0.8}, {"p3", 0.1}, {"p0", 0.05}});
  CHECK(rrf_fuse({{a, a}, 60.0}, 10).ids() == a.ids());
}

TEST_CASE("rrf rejects mismatched query ids") {
  RankedList a("q1", {{"d", 1.0}});
  RankedList b("q2", {{"d", 1.0}});
  try {
    rrf_fuse({{a, b}, 60.0}, 10);
    FAIL("expected QueryIdMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::QueryIdMismatch);
  }
  CHECK_THROWS_AS(rrf_fuse({{}, 60.0}, 10), Error);
}

TEST_CASE("rrf is monotone in rank") {
  std::mt19937 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::string> docs;
    for (int i = 0; i < 8; ++i) docs.push_back("d" + std::to_string(i));
    auto make = [&](std::vector<std::string> order) {
      std::vector<RankedEntry> e;
      for (std::size_t i = 0; i < order.size(); ++i) e.push_back({order[i], double(order.size() - i)});
      return RankedList("q", e);
    };
    auto first = docs;
    auto second = docs;
    std::shuffle(first.begin(), first.end(), rng);
    std::shuffle(second.begin(), second.end(), rng);
    const auto pos = rng() % 7 + 1;  // move the doc at pos one place up
    auto improved = first;
    std::swap(improved[pos], improved[pos - 1]);
    const auto target = first[pos];
    auto score_of = [&](const RankedList& l) {
      for (const auto& e : l.entries())
        if (e.passage_id == target) return e.score;
      return 0.0;
    };
    const auto before = rrf_fuse({{make(first), make(second)}, 60.0}, 100);
    const auto after = rrf_fuse({{make(improved), make(second)}, 60.0}, 100);
    CHECK(score_of(after) >= score_of(before));
  }
}
