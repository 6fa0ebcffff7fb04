#include <algorithm>
#include <cmath>
#include <queue>
#include <unordered_map>
#include <unordered_set>

#include "lyricbench/error.h"
#include "lyricbench/smt.h"

namespace lyricbench::smt {

void DecoderOptions::validate() const {
  if (beam_size < 1) throw InvalidArgument("beam_size must be >= 1");
  if (distortion_limit < 0) throw InvalidArgument("distortion_limit must be >= 0");
  if (max_options < 1) throw InvalidArgument("max_options must be >= 1");
}

Decoder::Decoder(const PhraseTable& table, const NGramLM& lm, DecoderOptions options)
    : table_(table), lm_(lm), options_(options) {
  options_.validate();
}

namespace {

struct SpanOption {
  int start = 0;
  int end = 0;
  TokenSeq target;
  std::vector<WordId> ids;
  FeatureVector partial{};  // phrase scores and word penalty
  double partial_score = 0;
  bool copied = false;
};

struct Edge {
  int from = -1;
  const SpanOption* option = nullptr;  // nullptr for the closing </s> edge
  FeatureVector delta{};
  double delta_score = 0;
};

struct Node {
  std::vector<std::uint64_t> coverage;
  int covered = 0;
  int next_pos = 0;  // one past the last translated span
  std::vector<WordId> lm_state;
  double score = 0;
  FeatureVector features{};
  Edge best;
  std::vector<Edge> arcs;  // losing incoming edges, kept for n-best
};

bool covered(const std::vector<std::uint64_t>& cov, int i) { return (cov[i / 64] >> (i % 64)) & 1u; }

std::string state_key(const Node& n) {
  std::string key(reinterpret_cast<const char*>(n.coverage.data()), n.coverage.size() * sizeof(std::uint64_t));
  key.append(reinterpret_cast<const char*>(&n.next_pos), sizeof n.next_pos);
  key.append(reinterpret_cast<const char*>(n.lm_state.data()), n.lm_state.size() * sizeof(WordId));
  return key;
}

class Search {
 public:
  Search(const PhraseTable& table, const NGramLM& lm, const DecoderOptions& opt, const TokenSeq& source,
         const FeatureWeights& weights, bool keep_arcs)
      : lm_(lm), opt_(opt), source_(source), weights_(weights), keep_arcs_(keep_arcs) {
    if (source.empty()) throw InvalidArgument("decode: empty source");
    weights.validate();
    build_options(table);
    run();
  }

  Translation best() const {
    int best_node = -1;
    double best_score = 0;
    Edge best_final;
    for (int idx : stacks_.back()) {
      Edge e = final_edge(idx);
      const double s = nodes_[idx].score + e.delta_score;
      if (best_node < 0 || s > best_score) {
        best_node = idx;
        best_score = s;
        best_final = e;
      }
    }
    std::vector<const Edge*> path;
    for (int v = best_node; v != 0; v = nodes_[v].best.from) path.push_back(&nodes_[v].best);
    std::reverse(path.begin(), path.end());
    path.push_back(&best_final);
    return assemble(path);
  }

  std::vector<Translation> nbest(int n) const {
    std::vector<Translation> out{best()};
    std::unordered_set<std::string> seen{textproc::join(out[0].output)};
    if (n == 1) return out;

    // Backward A*: a partial path is a suffix ending at the final state;
    // node scores are exact best prefix scores, so completions pop in order.
    struct Cell {
      const Edge* edge;
      int next;
    };
    struct Item {
      double priority;
      double suffix;
      int node;
      int cell;
      std::size_t seq;
      bool operator<(const Item& o) const {
        if (priority != o.priority) return priority < o.priority;
        return seq > o.seq;
      }
    };
    std::vector<Edge> finals;
    finals.reserve(stacks_.back().size());
    for (int idx : stacks_.back()) finals.push_back(final_edge(idx));
    std::vector<Cell> cells;
    std::priority_queue<Item> queue;
    std::size_t seq = 0;
    for (std::size_t k = 0; k < finals.size(); ++k) {
      cells.push_back({&finals[k], -1});
      const int idx = stacks_.back()[k];
      queue.push({nodes_[idx].score + finals[k].delta_score, finals[k].delta_score, idx,
                  static_cast<int>(cells.size()) - 1, seq++});
    }
    const std::size_t max_pops = 20000 + 200 * static_cast<std::size_t>(n);
    std::size_t pops = 0;
    while (!queue.empty() && static_cast<int>(out.size()) < n && pops++ < max_pops) {
      Item item = queue.top();
      queue.pop();
      if (item.node == 0) {
        std::vector<const Edge*> path;
        for (int c = item.cell; c >= 0; c = cells[c].next) path.push_back(cells[c].edge);
        Translation t = assemble(path);
        if (seen.insert(textproc::join(t.output)).second) out.push_back(std::move(t));
        continue;
      }
      const Node& node = nodes_[item.node];
      auto push = [&](const Edge& e) {
        cells.push_back({&e, item.cell});
        const double suffix = item.suffix + e.delta_score;
        queue.push({nodes_[e.from].score + suffix, suffix, e.from, static_cast<int>(cells.size()) - 1, seq++});
      };
      push(node.best);
      for (const auto& e : node.arcs) push(e);
    }
    std::stable_sort(out.begin() + 1, out.end(),
                     [](const Translation& a, const Translation& b) { return a.score > b.score; });
    return out;
  }

 private:
  void build_options(const PhraseTable& table) {
    const int n = static_cast<int>(source_.size());
    const int max_len = std::max(1, table.max_source_length());
    spans_.assign(n, {});
    for (int s = 0; s < n; ++s) {
      spans_[s].resize(std::min(max_len, n - s));
      for (int len = 1; len <= static_cast<int>(spans_[s].size()); ++len) {
        const TokenSeq phrase(source_.begin() + s, source_.begin() + s + len);
        const auto* opts = table.options(phrase);
        auto& list = spans_[s][len - 1];
        if (opts) {
          for (const auto& o : *opts) {
            SpanOption so;
            so.start = s;
            so.end = s + len;
            so.target = o.target;
            for (const auto& w : o.target) so.ids.push_back(lm_.id(w));
            so.partial[kPhiFe] = std::log(std::max(o.scores.phi_fe, align::kProbabilityFloor));
            so.partial[kPhiEf] = std::log(std::max(o.scores.phi_ef, align::kProbabilityFloor));
            so.partial[kLexFe] = std::log(std::max(o.scores.lex_fe, align::kProbabilityFloor));
            so.partial[kLexEf] = std::log(std::max(o.scores.lex_ef, align::kProbabilityFloor));
            so.partial[kWordPenalty] = -static_cast<double>(o.target.size());
            so.partial_score = weights_.dot(so.partial);
            list.push_back(std::move(so));
          }
          std::stable_sort(list.begin(), list.end(), [](const SpanOption& a, const SpanOption& b) {
            return a.partial_score > b.partial_score;
          });
          if (static_cast<int>(list.size()) > opt_.max_options) list.resize(opt_.max_options);
        }
        if (len == 1 && list.empty()) {
          SpanOption so;
          so.start = s;
          so.end = s + 1;
          so.target = {source_[s]};
          so.ids = {lm_.id(source_[s])};
          so.partial = {oov_log_cost(), oov_log_cost(), oov_log_cost(), oov_log_cost(), 0.0, -1.0, 0.0};
          so.partial_score = weights_.dot(so.partial);
          so.copied = true;
          list.push_back(std::move(so));
        }
      }
    }
  }

  void run() {
    const int n = static_cast<int>(source_.size());
    const std::size_t words = (static_cast<std::size_t>(n) + 63) / 64;
    Node root;
    root.coverage.assign(words, 0);
    if (lm_.order() > 1) root.lm_state.push_back(lm_.id(kBos));
    nodes_.push_back(std::move(root));
    stacks_.assign(n + 1, {});
    stacks_[0].push_back(0);
    std::vector<std::unordered_map<std::string, int>> index(n + 1);

    const int d = opt_.distortion_limit;
    std::vector<WordId> history;
    for (int k = 0; k < n; ++k) {
      prune(stacks_[k]);
      for (int idx : stacks_[k]) {
        for (int s = 0; s < n; ++s) {
          if (covered(nodes_[idx].coverage, s)) continue;
          if (std::abs(s - nodes_[idx].next_pos) > d) continue;
          for (std::size_t len = 1; len <= spans_[s].size(); ++len) {
            const int e = s + static_cast<int>(len);
            if (covered(nodes_[idx].coverage, e - 1)) break;
            const auto& list = spans_[s][len - 1];
            if (list.empty()) continue;
            Node next;
            next.coverage = nodes_[idx].coverage;
            for (int i = s; i < e; ++i) next.coverage[i / 64] |= std::uint64_t{1} << (i % 64);
            int first_gap = 0;
            while (first_gap < n && covered(next.coverage, first_gap)) ++first_gap;
            if (first_gap < s && e - first_gap > d) continue;
            next.covered = k + (e - s);
            next.next_pos = e;
            for (const auto& so : list) expand(idx, next, so, history, index[next.covered]);
          }
        }
      }
    }
  }

  void expand(int from, const Node& shape, const SpanOption& so, std::vector<WordId>& history,
              std::unordered_map<std::string, int>& index) {
    const Node& prev = nodes_[from];
    Edge edge;
    edge.from = from;
    edge.option = &so;
    edge.delta = so.partial;
    history.assign(prev.lm_state.begin(), prev.lm_state.end());
    double lm = 0.0;
    for (WordId w : so.ids) {
      lm += std::log(lm_.score_ids(history.data(), history.size(), w));
      history.push_back(w);
    }
    edge.delta[kLm] = lm;
    edge.delta[kDistortion] = -std::abs(so.start - prev.next_pos);
    edge.delta_score = weights_.dot(edge.delta);
    const double score = prev.score + edge.delta_score;

    Node next = shape;
    const std::size_t keep = std::min<std::size_t>(history.size(), static_cast<std::size_t>(lm_.order() - 1));
    next.lm_state.assign(history.end() - static_cast<long>(keep), history.end());
    const std::string key = state_key(next);
    auto it = index.find(key);
    if (it != index.end()) {
      Node& existing = nodes_[it->second];
      if (score > existing.score) {
        if (keep_arcs_) existing.arcs.push_back(existing.best);
        existing.best = edge;
        existing.score = score;
        existing.features = add(nodes_[from].features, edge.delta);
      } else if (keep_arcs_) {
        existing.arcs.push_back(edge);
      }
      return;
    }
    next.score = score;
    next.features = add(prev.features, edge.delta);
    next.best = edge;
    index.emplace(key, static_cast<int>(nodes_.size()));
    stacks_[next.covered].push_back(static_cast<int>(nodes_.size()));
    nodes_.push_back(std::move(next));
  }

  // Histogram pruning; equal scores keep the earlier hypothesis.
  void prune(std::vector<int>& stack) const {
    std::stable_sort(stack.begin(), stack.end(), [&](int a, int b) { return nodes_[a].score > nodes_[b].score; });
    if (static_cast<int>(stack.size()) > opt_.beam_size) stack.resize(opt_.beam_size);
  }

  Edge final_edge(int idx) const {
    Edge e;
    e.from = idx;
    const auto& st = nodes_[idx].lm_state;
    e.delta[kLm] = std::log(lm_.score_ids(st.data(), st.size(), lm_.id(kEos)));
    e.delta_score = weights_.dot(e.delta);
    return e;
  }

  static FeatureVector add(FeatureVector a, const FeatureVector& b) {
    for (int k = 0; k < kNumFeatures; ++k) a[k] += b[k];
    return a;
  }

  // `path` runs from the first phrase edge to the closing edge.
  Translation assemble(const std::vector<const Edge*>& path) const {
    Translation t;
    for (const Edge* e : path) {
      t.score += e->delta_score;
      t.features = add(t.features, e->delta);
      if (!e->option) continue;
      const SpanOption& so = *e->option;
      t.output.insert(t.output.end(), so.target.begin(), so.target.end());
      t.derivation.push_back({so.start, so.end, so.target, so.copied});
    }
    return t;
  }

  const NGramLM& lm_;
  const DecoderOptions& opt_;
  const TokenSeq& source_;
  const FeatureWeights& weights_;
  bool keep_arcs_;
  std::vector<std::vector<std::vector<SpanOption>>> spans_;  // [start][len-1]
  std::vector<Node> nodes_;
  std::vector<std::vector<int>> stacks_;
};

}  // namespace

Translation Decoder::decode(const TokenSeq& source, const FeatureWeights& weights) const {
  return Search(table_, lm_, options_, source, weights, false).best();
}

std::vector<Translation> Decoder::nbest(const TokenSeq& source, const FeatureWeights& weights, int n) const {
  if (n < 1) throw InvalidArgument("nbest: n must be >= 1");
  return Search(table_, lm_, options_, source, weights, true).nbest(n);
}

}  // namespace lyricbench::smt
