#include "ginger/curation.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <limits>

#include "ginger/error.hpp"
#include "ginger/text.hpp"

namespace ginger {

namespace {

struct Stripped {
  std::string text;
  std::vector<text::ByteSpan> spans;  // byte offsets into `text`
};

Stripped strip_tags(const std::string& annotated) {
  Stripped out;
  out.text.reserve(annotated.size());
  bool open = false;
  std::size_t span_start = 0;
  for (std::size_t i = 0; i < annotated.size();) {
    const auto rest = std::string_view(annotated).substr(i);
    if (rest.starts_with(kNuggetOpenTag)) {
      if (open) throw Error(ErrorKind::MalformedTags, "nested <START> at byte " + std::to_string(i));
      open = true;
      span_start = out.text.size();
      i += kNuggetOpenTag.size();
    } else if (rest.starts_with(kNuggetCloseTag)) {
      if (!open) throw Error(ErrorKind::MalformedTags, "</END> without <START> at byte " + std::to_string(i));
      open = false;
      out.spans.push_back({span_start, out.text.size()});
      i += kNuggetCloseTag.size();
    } else {
      out.text.push_back(annotated[i++]);
    }
  }
  if (open) throw Error(ErrorKind::MalformedTags, "unclosed <START>");
  return out;
}

bool space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

// Whitespace-collapsed, trimmed copy of `s`. `source[i]` is the byte of `s`
// that produced normalized byte i; `emitted[b]` is how many normalized bytes
// precede source byte b (size s.size() + 1).
struct Normalized {
  std::string text;
  std::vector<std::size_t> source;
  std::vector<std::size_t> emitted;
};

Normalized normalize(std::string_view s) {
  Normalized n;
  n.emitted.resize(s.size() + 1);
  bool pending_space = false;
  for (std::size_t b = 0; b < s.size(); ++b) {
    if (space(s[b])) {
      n.emitted[b] = n.text.size();
      if (!n.text.empty() && !pending_space) {
        pending_space = true;
        n.text.push_back(' ');
        n.source.push_back(b);
      }
      continue;
    }
    pending_space = false;
    n.emitted[b] = n.text.size();
    n.text.push_back(s[b]);
    n.source.push_back(b);
  }
  if (pending_space) {
    n.text.pop_back();
    n.source.pop_back();
    for (auto& e : n.emitted) e = std::min(e, n.text.size());
  }
  n.emitted[s.size()] = n.text.size();
  return n;
}

std::vector<InformationNugget> to_nuggets(const Passage& passage,
                                          const std::vector<text::ByteSpan>& byte_spans) {
  std::vector<InformationNugget> out;
  for (const auto& span : byte_spans) {
    if (span.end <= span.begin) continue;
    out.push_back(InformationNugget::slice(passage, text::byte_to_scalar(passage.text, span.begin),
                                           text::byte_to_scalar(passage.text, span.end)));
  }
  return out;
}

}  // namespace

AnnotatedPassage detect_nuggets(llm::Gateway& gateway, const Query& query, const Passage& passage) {
  llm::CompletionRequest req;
  req.template_id = llm::TemplateId::nugget_detection;
  req.bindings = {{"query", query.text}, {"passage", passage.text}};
  // The passage is copied back with tags, so leave room for all of it.
  req.max_tokens = static_cast<int>(std::max<std::size_t>(512, passage.text.size()));
  return {passage.id, gateway.complete(req)};
}

std::vector<InformationNugget> parse_annotations(const Passage& original,
                                                 const AnnotatedPassage& annotated) {
  const Stripped stripped = strip_tags(annotated.annotated_text);
  if (stripped.text == original.text) return to_nuggets(original, stripped.spans);

  const Normalized want = normalize(original.text);
  const Normalized got = normalize(stripped.text);
  if (want.text != got.text) {
    throw Error(ErrorKind::AnnotationMismatch,
                "annotation of passage '" + original.id + "' alters the text");
  }
  std::vector<text::ByteSpan> mapped;
  for (const auto& span : stripped.spans) {
    std::size_t b = got.emitted[span.begin];
    std::size_t e = got.emitted[span.end];
    // Spans never start or end on a collapsed space.
    while (b < e && want.text[b] == ' ') ++b;
    while (e > b && want.text[e - 1] == ' ') --e;
    if (e <= b) continue;
    mapped.push_back({want.source[b], want.source[e - 1] + 1});
  }
  return to_nuggets(original, mapped);
}

void validate(const ClusteringParams& params) {
  if (!(params.similarity_threshold > 0.0 && params.similarity_threshold < 1.0)) {
    throw Error(ErrorKind::ConfigInvalid, "similarity_threshold in (0, 1)");
  }
  if (params.min_cluster_size < 1) throw Error(ErrorKind::ConfigInvalid, "min_cluster_size ≥ 1");
}

std::vector<std::vector<std::size_t>> agglomerate(const SimilarityMatrix& similarity,
                                                  const ClusteringParams& params) {
  validate(params);
  const std::size_t n = similarity.size();
  for (const auto& row : similarity) {
    if (row.size() != n) throw Error(ErrorKind::DimensionMismatch, "similarity matrix is not square");
  }
  // groups[i] ordered by first member; link[i][j] is the sum of member
  // similarities, so merging is exact addition.
  std::vector<std::vector<std::size_t>> groups(n);
  for (std::size_t i = 0; i < n; ++i) groups[i] = {i};
  SimilarityMatrix link = similarity;

  auto average = [&](std::size_t a, std::size_t b) {
    return link[a][b] / static_cast<double>(groups[a].size() * groups[b].size());
  };
  auto merge = [&](std::size_t a, std::size_t b) {  // a < b
    for (std::size_t j = 0; j < groups.size(); ++j) {
      link[a][j] += link[b][j];
      link[j][a] = link[a][j];
    }
    groups[a].insert(groups[a].end(), groups[b].begin(), groups[b].end());
    std::sort(groups[a].begin(), groups[a].end());
    groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(b));
    link.erase(link.begin() + static_cast<std::ptrdiff_t>(b));
    for (auto& row : link) row.erase(row.begin() + static_cast<std::ptrdiff_t>(b));
  };

  while (groups.size() > 1) {
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_a = 0, best_b = 0;
    for (std::size_t a = 0; a < groups.size(); ++a) {
      for (std::size_t b = a + 1; b < groups.size(); ++b) {
        const double s = average(a, b);
        if (s > best) {
          best = s;
          best_a = a;
          best_b = b;
        }
      }
    }
    if (best < params.similarity_threshold) break;
    merge(best_a, best_b);
  }

  while (groups.size() > 1) {
    std::size_t small = groups.size();
    for (std::size_t i = 0; i < groups.size(); ++i) {
      if (groups[i].size() < params.min_cluster_size &&
          (small == groups.size() || groups[i].size() < groups[small].size())) {
        small = i;
      }
    }
    if (small == groups.size()) break;
    double best = -std::numeric_limits<double>::infinity();
    std::size_t nearest = 0;
    for (std::size_t j = 0; j < groups.size(); ++j) {
      if (j == small) continue;
      const double s = average(small, j);
      if (s > best) {
        best = s;
        nearest = j;
      }
    }
    merge(std::min(small, nearest), std::max(small, nearest));
  }
  return groups;
}

std::vector<FacetCluster> cluster_nuggets(std::vector<InformationNugget> nuggets,
                                          const EmbeddingProvider& embedder,
                                          const ClusteringParams& params) {
  if (nuggets.empty()) throw Error(ErrorKind::InvalidArgument, "no nuggets to cluster");
  std::sort(nuggets.begin(), nuggets.end(), nugget_before);

  std::vector<std::vector<float>> vectors;
  vectors.reserve(nuggets.size());
  for (const auto& n : nuggets) vectors.push_back(embedder.embed(n.text));
  SimilarityMatrix sim(nuggets.size(), std::vector<double>(nuggets.size(), 1.0));
  for (std::size_t i = 0; i < nuggets.size(); ++i) {
    for (std::size_t j = i + 1; j < nuggets.size(); ++j) {
      sim[i][j] = sim[j][i] = cosine_similarity(vectors[i], vectors[j]);
    }
  }

  std::vector<FacetCluster> clusters;
  const auto groups = agglomerate(sim, params);
  clusters.reserve(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    std::vector<InformationNugget> members;
    for (auto i : groups[g]) members.push_back(nuggets[i]);
    char id[16];
    std::snprintf(id, sizeof id, "c%03zu", g + 1);
    clusters.emplace_back(id, std::move(members));
  }
  return clusters;
}

std::vector<FacetCluster> rank_clusters(const PairwiseScorer& scorer, const Query& query,
                                        std::vector<FacetCluster> clusters) {
  if (clusters.empty()) throw Error(ErrorKind::InvalidArgument, "no clusters to rank");
  std::vector<Passage> pseudo;
  pseudo.reserve(clusters.size());
  for (const auto& c : clusters) pseudo.emplace_back(c.cluster_id, c.representative_text);
  const RankedList order =
      aggregate_pairwise(build_pairwise_matrix(scorer, query.text, pseudo), query.id);

  std::vector<FacetCluster> ranked;
  ranked.reserve(clusters.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    auto it = std::find_if(clusters.begin(), clusters.end(), [&](const FacetCluster& c) {
      return c.cluster_id == order[r].passage_id;
    });
    it->rank = static_cast<int>(r + 1);
    ranked.push_back(std::move(*it));
  }
  return ranked;
}

CurationResult curate_context(llm::Gateway& gateway, const EmbeddingProvider& embedder,
                              const PairwiseScorer& scorer, const Query& query,
                              std::span<const Passage> passages, const ClusteringParams& params) {
  CurationResult result;
  std::vector<InformationNugget> nuggets;
  for (const auto& p : passages) {
    try {
      auto found = parse_annotations(p, detect_nuggets(gateway, query, p));
      nuggets.insert(nuggets.end(), std::make_move_iterator(found.begin()),
                     std::make_move_iterator(found.end()));
    } catch (const Error& e) {
      result.skipped.emplace_back(p.id, e.what());
    }
  }
  if (nuggets.empty()) {
    throw Error(ErrorKind::NoNuggets, "no verified nugget for query '" + query.id + "'");
  }
  result.clusters = rank_clusters(scorer, query, cluster_nuggets(std::move(nuggets), embedder, params));
  return result;
}

}  // namespace ginger
