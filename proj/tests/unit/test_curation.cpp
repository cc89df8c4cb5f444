#include <doctest.h>

#include <algorithm>
#include <random>

#include "../oracles.hpp"
#include "ginger/curation.hpp"
#include "ginger/error.hpp"
#include "ginger/reranker.hpp"

using namespace ginger;
using namespace ginger::llm;

namespace {

ErrorKind kind_of(const Passage& p, const std::string& annotated) {
  try {
    parse_annotations(p, {p.id, annotated});
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::InvalidArgument;
}

class CannedProvider : public Provider {
 public:
  explicit CannedProvider(std::string text) : text_(std::move(text)) {}
  std::string complete(const CompletionRequest&, const RenderedPrompt&) override { return text_; }

 private:
  std::string text_;
};

ProviderPolicy fast() {
  ProviderPolicy p;
  p.max_retries = 0;
  p.backoff_base = std::chrono::milliseconds(0);
  p.rate_limit = 1e6;
  return p;
}

// Maps each text to a fixed vector.
class TableEmbedder : public EmbeddingProvider {
 public:
  explicit TableEmbedder(std::map<std::string, std::vector<float>> t) : table_(std::move(t)) {}
  std::size_t dimension() const override { return 2; }
  std::vector<float> embed(std::string_view text) const override { return table_.at(std::string(text)); }

 private:
  std::map<std::string, std::vector<float>> table_;
};

}  // namespace

TEST_CASE("annotation offsets point into the original passage") {
  const Passage p("p1", "Solar is cheap. Wind is too. Cost fell.");
  const auto n = parse_annotations(p, {"p1", "<START>Solar is cheap.</END> Wind is too. <START>Cost fell.</END>"});
  REQUIRE(n.size() == 2);
  CHECK(n[0].start == 0);
  CHECK(n[0].end == 15);
  CHECK(n[0].text == "Solar is cheap.");
  CHECK(n[1].start == 29);
  CHECK(n[1].end == 39);
  CHECK(n[1].text == "Cost fell.");
  CHECK(n[1].passage_id == "p1");
}

TEST_CASE("annotation offsets count code points") {
  const Passage p("p", "Café au lait. Crème brûlée.");
  const auto n = parse_annotations(p, {"p", "Café au lait. <START>Crème brûlée.</END>"});
  REQUIRE(n.size() == 1);
  CHECK(n[0].start == 14);
  CHECK(n[0].end == 27);
  CHECK(n[0].text == "Crème brûlée.");
}

TEST_CASE("no tags means no nuggets and empty pairs are skipped") {
  const Passage p("p", "Nothing relevant here.");
  CHECK(parse_annotations(p, {"p", "Nothing relevant here."}).empty());
  CHECK(parse_annotations(p, {"p", "<START></END>Nothing relevant here."}).empty());
}

TEST_CASE("whitespace-only differences fall back to normalized matching") {
  const Passage p("p", "Alpha  beta.\nGamma delta.");
  const auto n = parse_annotations(p, {"p", " Alpha beta. <START>Gamma delta.</END>\n"});
  REQUIRE(n.size() == 1);
  CHECK(n[0].text == "Gamma delta.");
  CHECK(n[0].start == 13);
  CHECK(n[0].end == 25);
}

TEST_CASE("malformed tags and altered text are rejected") {
  const Passage p("p", "Alpha beta gamma.");
  CHECK(kind_of(p, "<START>Alpha <START>beta</END></END> gamma.") == ErrorKind::MalformedTags);
  CHECK(kind_of(p, "Alpha</END> beta gamma.") == ErrorKind::MalformedTags);
  CHECK(kind_of(p, "<START>Alpha beta gamma.") == ErrorKind::MalformedTags);
  CHECK(kind_of(p, "<START>Alpha beta</END> gamma!") == ErrorKind::AnnotationMismatch);
  CHECK(kind_of(p, "<START>Alpha Beta</END> gamma.") == ErrorKind::AnnotationMismatch);
}

TEST_CASE("annotation round trip fuzz") {
  std::mt19937 rng(17);
  const std::vector<std::string> words = {"solar", "wind", "é", "cost", "grid", "日本", "power", "x"};
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::string> toks;
    const auto len = 3 + rng() % 12;
    for (std::size_t i = 0; i < len; ++i) toks.push_back(words[rng() % words.size()]);
    std::string original;
    std::vector<std::pair<std::size_t, std::size_t>> spans;  // token ranges
    std::string annotated;
    std::size_t i = 0;
    while (i < len) {
      if (!original.empty()) {
        original += ' ';
        annotated += ' ';
      }
      if (rng() % 3 == 0) {
        const auto j = std::min<std::size_t>(len, i + 1 + rng() % 3);
        std::string chunk;
        for (std::size_t t = i; t < j; ++t) chunk += (t > i ? " " : "") + toks[t];
        original += chunk;
        annotated += "<START>" + chunk + "</END>";
        spans.emplace_back(i, j);
        i = j;
      } else {
        original += toks[i];
        annotated += toks[i];
        ++i;
      }
    }
    const Passage p("p", original);
    const auto nuggets = parse_annotations(p, {"p", annotated});
    REQUIRE(nuggets.size() == spans.size());
    for (std::size_t s = 0; s < spans.size(); ++s) {
      CHECK(InformationNugget::slice(p, nuggets[s].start, nuggets[s].end).text == nuggets[s].text);
    }
  }
}

TEST_CASE("detect_nuggets uses the provider") {
  Gateway gw(std::make_shared<MockProvider>(), fast());
  const auto a = detect_nuggets(gw, Query("q", "solar cost"), Passage("p1", "Solar is cheap. Wind is too. Cost fell."));
  CHECK(a.passage_id == "p1");
  CHECK(a.annotated_text == "<START>Solar is cheap.</END> Wind is too. <START>Cost fell.</END>");
}

TEST_CASE("agglomerate examples") {
  const SimilarityMatrix sim = {{1, 0.9, 0.1, 0.1}, {0.9, 1, 0.1, 0.1}, {0.1, 0.1, 1, 0.8}, {0.1, 0.1, 0.8, 1}};
  using Groups = std::vector<std::vector<std::size_t>>;
  CHECK(agglomerate(sim, {0.6, 1}) == Groups{{0, 1}, {2, 3}});
  CHECK(agglomerate(sim, {0.85, 1}) == Groups{{0, 1}, {2}, {3}});
  CHECK(agglomerate(sim, {0.05, 1}) == Groups{{0, 1, 2, 3}});
  CHECK(agglomerate(sim, {0.85, 2}) == Groups{{0, 1}, {2, 3}});
  CHECK(agglomerate({}, {0.6, 1}).empty());
  CHECK(agglomerate({{1}}, {0.6, 3}) == Groups{{0}});
}

TEST_CASE("agglomerate matches the brute-force oracle on dyadic matrices") {
  std::mt19937 rng(33);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + rng() % 7;
    SimilarityMatrix sim(n, std::vector<double>(n, 1.0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) sim[i][j] = sim[j][i] = double(rng() % 17) / 16.0;
    const double threshold = double(1 + rng() % 7) / 8.0;
    const std::size_t min_size = 1 + rng() % 3;
    CHECK(agglomerate(sim, {threshold, min_size}) == oracle::agglomerative(sim, threshold, min_size));
  }
}

TEST_CASE("clustering parameters are validated") {
  CHECK_THROWS_AS(validate(ClusteringParams{1.5, 1}), Error);
  CHECK_THROWS_AS(validate(ClusteringParams{0.5, 0}), Error);
  CHECK_NOTHROW(validate(ClusteringParams{}));
}

TEST_CASE("cluster_nuggets is a partition independent of input order") {
  const Passage p1("p1", "Sun one. Sun two. Rain three.");
  const Passage p2("p2", "Rain four. Sun five.");
  auto nuggets = parse_annotations(p1, {"p1", "<START>Sun one.</END> <START>Sun two.</END> <START>Rain three.</END>"});
  auto more = parse_annotations(p2, {"p2", "<START>Rain four.</END> <START>Sun five.</END>"});
  nuggets.insert(nuggets.end(), more.begin(), more.end());
  TableEmbedder emb({{"Sun one.", {1, 0}}, {"Sun two.", {1, 0.1F}}, {"Sun five.", {0.9F, 0}},
                     {"Rain three.", {0, 1}}, {"Rain four.", {0.1F, 1}}});
  const auto clusters = cluster_nuggets(nuggets, emb, {0.6, 1});
  REQUIRE(clusters.size() == 2);
  CHECK(clusters[0].cluster_id == "c001");
  CHECK(clusters[1].cluster_id == "c002");
  std::size_t total = 0;
  for (const auto& c : clusters) total += c.nuggets.size();
  CHECK(total == nuggets.size());
  CHECK(clusters[0].representative_text == "Sun one. Sun two. Sun five.");
  CHECK(clusters[0].source_passage_ids() == std::vector<std::string>{"p1", "p2"});

  std::mt19937 rng(1);
  for (int i = 0; i < 10; ++i) {
    std::shuffle(nuggets.begin(), nuggets.end(), rng);
    const auto again = cluster_nuggets(nuggets, emb, {0.6, 1});
    REQUIRE(again.size() == clusters.size());
    for (std::size_t c = 0; c < again.size(); ++c) CHECK(again[c].nuggets == clusters[c].nuggets);
  }
  CHECK_THROWS_AS(cluster_nuggets({}, emb, {0.6, 1}), Error);
}

TEST_CASE("rank_clusters orders by pairwise preference") {
  const Passage p("p", "Wind blows. Solar cost fell.");
  auto nuggets = parse_annotations(p, {"p", "<START>Wind blows.</END> <START>Solar cost fell.</END>"});
  std::vector<FacetCluster> clusters = {FacetCluster("c001", {nuggets[0]}), FacetCluster("c002", {nuggets[1]})};
  const auto ranked = rank_clusters(OverlapLogisticScorer{}, Query("q", "solar cost"), clusters);
  REQUIRE(ranked.size() == 2);
  CHECK(ranked[0].cluster_id == "c002");
  CHECK(ranked[0].rank == 1);
  CHECK(ranked[1].rank == 2);
}

TEST_CASE("curate_context skips passages that fail verification") {
  HashingEmbedder emb(64);
  std::vector<Passage> ps = {Passage("p1", "Solar is cheap. Wind is too."), Passage("p2", "Nothing here.")};
  Gateway good(std::make_shared<MockProvider>(), fast());
  const auto r = curate_context(good, emb, OverlapLogisticScorer{}, Query("q", "solar"), ps, {});
  REQUIRE(r.clusters.size() == 1);
  CHECK(r.clusters[0].nuggets[0].text == "Solar is cheap.");
  CHECK(r.skipped.empty());

  Gateway altered(std::make_shared<CannedProvider>("<START>Something else</END>"), fast());
  try {
    curate_context(altered, emb, OverlapLogisticScorer{}, Query("q", "solar"), ps, {});
    FAIL("expected NoNuggets");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoNuggets);
  }
}
