// Copyright 2026 The qlog Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qlog/summarizer.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "qlog/errors.h"
#include "qlog/sql.h"

namespace qlog {
namespace {

using json = nlohmann::json;

// Complete-subtree id of every node, bottom-up.
std::vector<FeatureId> full_ids(const LabeledAst& ast, DigestRegistry& reg) {
  std::vector<FeatureId> ids(ast.size(), 0);
  std::vector<FeatureId> bag;
  for (NodeIndex n : ast.post_order()) {
    const AstNode& node = ast.node(n);
    FeatureId atom = reg.intern_atom(ast.label(n));
    if (node.children.empty()) {
      ids[n] = atom;
      continue;
    }
    bag.clear();
    for (NodeIndex c : node.children) bag.push_back(ids[c]);
    ids[n] = reg.digest_list({atom, reg.digest_bag(bag)});
  }
  return ids;
}

// Fragment verbs in explanation order.
constexpr std::string_view kVerbs[] = {"read from", "join",      "left join", "right join",
                                       "full join", "cross join", "select",   "filter on",
                                       "filter groups on", "group by", "order by"};

int verb_rank(std::string_view verb) {
  for (std::size_t i = 0; i < std::size(kVerbs); ++i) {
    if (kVerbs[i] == verb) return static_cast<int>(i);
  }
  return static_cast<int>(std::size(kVerbs));
}

std::string_view join_verb(Atom a) {
  switch (a) {
    case Atom::kLeftJoin:
      return "left join";
    case Atom::kRightJoin:
      return "right join";
    case Atom::kFullJoin:
      return "full join";
    case Atom::kCrossJoin:
      return "cross join";
    default:
      return "join";
  }
}

struct RawFragment {
  std::string verb;
  FeatureId id;
  std::string text;
};

void conjuncts(const LabeledAst& ast, NodeIndex n, std::vector<NodeIndex>* out) {
  const AstNode& node = ast.node(n);
  if (node.atom == Atom::kAnd) {
    for (NodeIndex c : node.children) conjuncts(ast, c, out);
  } else {
    out->push_back(n);
  }
}

std::vector<RawFragment> fragments_of(const LabeledAst& ast, const std::vector<FeatureId>& ids) {
  std::vector<RawFragment> out;
  auto add = [&](std::string_view verb, NodeIndex n, std::string text) {
    out.push_back({std::string(verb), ids[n], std::move(text)});
  };
  for (NodeIndex n = 0; n < ast.size(); ++n) {
    const AstNode& node = ast.node(n);
    switch (node.atom) {
      case Atom::kTableRef:
        add("read from", n, to_sql(ast, n));
        break;
      case Atom::kJoin:
      case Atom::kLeftJoin:
      case Atom::kRightJoin:
      case Atom::kFullJoin:
      case Atom::kCrossJoin: {
        std::string text = to_sql(ast, node.children[0]) + " with " + to_sql(ast, node.children[1]);
        if (node.children.size() > 2) {
          text += " on " + to_sql(ast, ast.node(node.children[2]).children[0]);
        }
        add(join_verb(node.atom), n, std::move(text));
        break;
      }
      case Atom::kCols:
        for (NodeIndex c : node.children) add("select", c, to_sql(ast, c));
        break;
      case Atom::kWhere:
      case Atom::kHaving: {
        std::vector<NodeIndex> cs;
        conjuncts(ast, node.children[0], &cs);
        for (NodeIndex c : cs) {
          add(node.atom == Atom::kWhere ? "filter on" : "filter groups on", c, to_sql(ast, c));
        }
        break;
      }
      case Atom::kGroupBy:
      case Atom::kOrderBy:
        for (NodeIndex c : node.children) {
          add(node.atom == Atom::kGroupBy ? "group by" : "order by", c, to_sql(ast, c));
        }
        break;
      default:
        break;
    }
  }
  return out;
}

std::string escape_dot(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out;
}

std::string percent(std::uint32_t support, std::uint32_t n) {
  if (support == n) return "all queries";
  return std::to_string(static_cast<unsigned>(100ull * support / n)) + "% of queries";
}

}  // namespace

// --- FP-tree --------------------------------------------------------------------

FPTree::FPTree() : nodes_(1) {}

bool operator==(const FPNode& a, const FPNode& b) {
  return a.feature == b.feature && a.count == b.count && a.parent == b.parent &&
         a.children == b.children;
}

bool operator==(const HeaderEntry& a, const HeaderEntry& b) {
  return a.feature == b.feature && a.support == b.support && a.nodes == b.nodes;
}

bool operator==(const FPTree& a, const FPTree& b) {
  return a.nodes_ == b.nodes_ && a.header_ == b.header_;
}

FPTree FPTree::build(std::span<const std::vector<FeatureId>> transactions,
                     const ItemOrder& order) {
  FPTree t;
  std::vector<std::vector<FeatureId>> sets;
  sets.reserve(transactions.size());
  std::unordered_map<FeatureId, std::uint32_t> support;
  for (const auto& tx : transactions) {
    std::vector<FeatureId> s = tx;
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    for (FeatureId f : s) ++support[f];
    sets.push_back(std::move(s));
  }

  std::vector<FeatureId> items;
  items.reserve(support.size());
  for (const auto& [f, _] : support) items.push_back(f);
  std::sort(items.begin(), items.end(), [&](FeatureId a, FeatureId b) {
    std::uint32_t sa = support[a];
    std::uint32_t sb = support[b];
    if (order) {
      if (order(a, sa, b, sb)) return true;
      if (order(b, sb, a, sa)) return false;
      return a < b;
    }
    return sa != sb ? sa > sb : a < b;
  });
  std::unordered_map<FeatureId, std::uint32_t> rank;
  for (std::uint32_t i = 0; i < items.size(); ++i) rank[items[i]] = i;

  // Transactions as rank sequences, inserted in lexicographic order so the
  // node numbering is independent of the input order.
  std::vector<std::vector<std::uint32_t>> ranked;
  ranked.reserve(sets.size());
  for (const auto& s : sets) {
    std::vector<std::uint32_t> r;
    r.reserve(s.size());
    for (FeatureId f : s) r.push_back(rank[f]);
    std::sort(r.begin(), r.end());
    ranked.push_back(std::move(r));
  }
  std::sort(ranked.begin(), ranked.end());

  for (const auto& r : ranked) {
    std::uint32_t cur = 0;
    ++t.nodes_[0].count;
    for (std::uint32_t item : r) {
      FeatureId f = items[item];
      std::uint32_t next = 0;
      for (std::uint32_t c : t.nodes_[cur].children) {
        if (t.nodes_[c].feature == f) {
          next = c;
          break;
        }
      }
      if (next == 0) {
        FPNode node;
        node.feature = f;
        node.parent = static_cast<std::int32_t>(cur);
        next = static_cast<std::uint32_t>(t.nodes_.size());
        t.nodes_.push_back(std::move(node));
        t.nodes_[cur].children.push_back(next);
      }
      ++t.nodes_[next].count;
      cur = next;
    }
  }

  t.header_.resize(items.size());
  for (std::uint32_t i = 0; i < items.size(); ++i) {
    t.header_[i].feature = items[i];
    t.header_[i].support = support[items[i]];
  }
  std::vector<std::uint32_t> stack{0};
  while (!stack.empty()) {
    std::uint32_t n = stack.back();
    stack.pop_back();
    if (n != 0) t.header_[rank[t.nodes_[n].feature]].nodes.push_back(n);
    const auto& kids = t.nodes_[n].children;
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
  }
  return t;
}

std::uint32_t FPTree::support(FeatureId feature) const {
  for (const HeaderEntry& h : header_) {
    if (h.feature == feature) return h.support;
  }
  return 0;
}

std::uint32_t support_threshold(double tau, std::uint32_t n) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw PreconditionError("tau must lie in [0, 1]");
  // The epsilon keeps e.g. 0.8 * 10 from rounding up to 9.
  return static_cast<std::uint32_t>(std::ceil(tau * n - 1e-9));
}

std::vector<std::pair<FeatureId, std::uint32_t>> FPTree::common_features(double tau) const {
  std::uint32_t min_support = support_threshold(tau, transactions());
  std::vector<std::pair<FeatureId, std::uint32_t>> out;
  for (const HeaderEntry& h : header_) {
    if (h.support >= min_support) out.emplace_back(h.feature, h.support);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  return out;
}

std::string describe_feature(const DigestRegistry& registry, FeatureId id, std::size_t max_chars) {
  std::string out;
  bool truncated = false;
  std::function<void(FeatureId)> emit = [&](FeatureId f) {
    if (out.size() > max_chars) {
      truncated = true;
      return;
    }
    DigestKey k = registry.key(f);
    auto elems = [&](std::span<const FeatureId> es) {
      for (std::size_t i = 0; i < es.size(); ++i) {
        if (i > 0) out += ' ';
        emit(es[i]);
      }
    };
    switch (k.kind) {
      case DigestKind::kAtom:
        out += k.text;
        break;
      case DigestKind::kList:
        if (k.elements.size() == 2 && registry.key(k.elements[0]).kind == DigestKind::kAtom &&
            registry.key(k.elements[1]).kind == DigestKind::kBag) {
          out += '(';
          emit(k.elements[0]);
          DigestKey bag = registry.key(k.elements[1]);
          for (FeatureId c : bag.elements) {
            out += ' ';
            emit(c);
          }
          out += ')';
        } else {
          out += '<';
          elems(k.elements);
          out += '>';
        }
        break;
      case DigestKind::kBag:
        out += '[';
        elems(k.elements);
        out += ']';
        break;
      case DigestKind::kSet:
        out += '{';
        elems(k.elements);
        out += '}';
        break;
    }
  };
  emit(id);
  if (truncated || out.size() > max_chars) {
    out.resize(max_chars > 3 ? max_chars - 3 : 0);
    out += "...";
  }
  return out;
}

// --- Summaries ----------------------------------------------------------------------

std::string_view cluster_label_name(ClusterLabel label) {
  switch (label) {
    case ClusterLabel::kSafe:
      return "safe";
    case ClusterLabel::kUnsafe:
      return "unsafe";
    case ClusterLabel::kUnknown:
      break;
  }
  return "unknown";
}

std::optional<ClusterLabel> cluster_label_from_name(std::string_view name) {
  for (ClusterLabel l : {ClusterLabel::kUnknown, ClusterLabel::kSafe, ClusterLabel::kUnsafe}) {
    if (cluster_label_name(l) == name) return l;
  }
  return std::nullopt;
}

std::uint32_t medoid(std::span<const std::uint32_t> members, const SkeletonCorpus& corpus,
                     bool normalize, const DistanceMatrix* matrix) {
  if (members.empty()) throw PreconditionError("medoid: empty cluster");
  std::uint32_t best = members[0];
  double best_sum = 0.0;
  bool first = true;
  for (std::uint32_t a : members) {
    double sum = 0.0;
    for (std::uint32_t b : members) {
      if (a == b) continue;
      if (matrix != nullptr) {
        sum += (*matrix)(a, b);
      } else {
        const auto& u = corpus.skeletons[a].vector;
        const auto& v = corpus.skeletons[b].vector;
        sum += normalize ? normalized_distance(u, v) : distance(u, v);
      }
    }
    if (first || sum < best_sum || (sum == best_sum && a < best)) {
      best = a;
      best_sum = sum;
      first = false;
    }
  }
  return best;
}

ClusterSummary summarize(std::uint32_t id, std::span<const std::uint32_t> members,
                         const SkeletonCorpus& corpus, const FeatureExtractor& extractor,
                         const SummaryOptions& options, const DistanceMatrix* matrix) {
  if (members.empty()) throw PreconditionError("summarize: empty cluster");
  DigestRegistry& reg = extractor.registry();
  ClusterSummary s;
  s.id = id;
  s.members.assign(members.begin(), members.end());
  std::sort(s.members.begin(), s.members.end());
  s.members.erase(std::unique(s.members.begin(), s.members.end()), s.members.end());
  s.tau = options.tau;
  const std::uint32_t n = s.size();
  const std::uint32_t threshold = support_threshold(options.tau, n);

  std::vector<std::vector<FeatureId>> transactions;
  transactions.reserve(n);
  for (std::uint32_t m : s.members) {
    s.query_count += corpus.skeletons.at(m).count;
    transactions.push_back(corpus.skeletons[m].vector.keys());
  }
  s.tree = FPTree::build(transactions);
  for (const auto& [f, sup] : s.tree.common_features(options.tau)) {
    s.common_features.push_back({f, sup, describe_feature(reg, f)});
  }

  s.representative = medoid(s.members, corpus, options.normalize, matrix);
  const QuerySkeleton& rep = corpus.skeletons[s.representative];
  s.representative_text = rep.text;

  // Node signatures decide the common/variable styling of the drawing.
  std::unordered_map<FeatureId, std::uint32_t> sig_support;
  std::vector<FeatureId> rep_sig;
  // Readable fragments, keyed by (verb, subtree id).
  std::map<std::pair<std::string, FeatureId>, std::pair<std::uint32_t, std::string>> frags;
  for (std::uint32_t m : s.members) {
    const LabeledAst& ast = corpus.skeletons[m].ast;
    ExtractResult r = extractor.extract(ast);
    std::unordered_set<FeatureId> seen(r.node_signature.begin(), r.node_signature.end());
    for (FeatureId f : seen) ++sig_support[f];
    if (m == s.representative) rep_sig = std::move(r.node_signature);

    std::vector<FeatureId> ids = full_ids(ast, reg);
    std::set<std::pair<std::string, FeatureId>> mine;
    for (RawFragment& f : fragments_of(ast, ids)) {
      auto key = std::make_pair(f.verb, f.id);
      if (!mine.insert(key).second) continue;
      auto [it, inserted] = frags.try_emplace(key, 0, std::move(f.text));
      ++it->second.first;
    }
  }
  s.common_nodes.resize(rep_sig.size());
  for (std::size_t i = 0; i < rep_sig.size(); ++i) {
    s.common_nodes[i] = sig_support[rep_sig[i]] >= threshold;
  }
  for (auto& [key, value] : frags) {
    if (value.first >= threshold && value.first > 0) {
      s.fragments.push_back({key.first, value.second, value.first});
    }
  }
  std::sort(s.fragments.begin(), s.fragments.end(), [](const Fragment& a, const Fragment& b) {
    int ra = verb_rank(a.verb);
    int rb = verb_rank(b.verb);
    if (ra != rb) return ra < rb;
    if (a.support != b.support) return a.support > b.support;
    return a.text < b.text;
  });
  s.explanation = explain(s, corpus);
  return s;
}

std::string explain(const ClusterSummary& summary, const SkeletonCorpus& corpus) {
  std::ostringstream out;
  const std::uint32_t n = summary.size();
  out << n << (n == 1 ? " skeleton, " : " skeletons, ") << summary.query_count
      << (summary.query_count == 1 ? " query" : " queries");
  if (n == 1) {
    out << ": " << corpus.skeletons.at(summary.members[0]).text << "\n";
    return out.str();
  }
  if (summary.fragments.empty()) {
    out << ": no dominant shared structure\n";
    return out.str();
  }
  out << ".\n";
  for (const Fragment& f : summary.fragments) {
    out << "- " << percent(f.support, n) << ' ' << f.verb << ' ' << f.text << "\n";
  }
  return out.str();
}

std::string visualize(const ClusterSummary& summary, const SkeletonCorpus& corpus) {
  const LabeledAst& ast = corpus.skeletons.at(summary.representative).ast;
  std::ostringstream out;
  out << "digraph cluster_" << summary.id << " {\n";
  out << "  label=\"cluster " << summary.id << ": " << escape_dot(summary.representative_text)
      << "\";\n";
  out << "  node [shape=box, fontname=\"Helvetica\"];\n";
  for (NodeIndex i = 0; i < ast.size(); ++i) {
    bool common = i < summary.common_nodes.size() && summary.common_nodes[i];
    out << "  n" << i << " [label=\"" << escape_dot(ast.label(i)) << "\", class=\""
        << (common ? "common" : "variable") << "\", "
        << (common ? "style=filled, fillcolor=\"#cde8cd\"" : "style=dashed, color=\"#b03030\"")
        << "];\n";
  }
  for (NodeIndex i = 0; i < ast.size(); ++i) {
    for (NodeIndex c : ast.node(i).children) out << "  n" << i << " -> n" << c << ";\n";
  }
  out << "}\n";
  return out.str();
}

std::string summary_to_json(const ClusterSummary& summary, const SkeletonCorpus& corpus) {
  json j;
  j["id"] = summary.id;
  j["label"] = cluster_label_name(summary.label);
  j["size"] = {{"skeletons", summary.size()}, {"queries", summary.query_count}};
  j["tau"] = summary.tau;
  j["members"] = summary.members;
  j["representative"] = {{"skeleton", summary.representative},
                         {"text", summary.representative_text}};
  json common = json::array();
  for (const CommonFeature& f : summary.common_features) {
    common.push_back({{"id", f.id},
                      {"support", f.support},
                      {"fraction", static_cast<double>(f.support) / summary.size()},
                      {"text", f.text}});
  }
  j["common_features"] = std::move(common);
  json frags = json::array();
  for (const Fragment& f : summary.fragments) {
    frags.push_back({{"verb", f.verb},
                     {"text", f.text},
                     {"support", f.support},
                     {"fraction", static_cast<double>(f.support) / summary.size()}});
  }
  j["fragments"] = std::move(frags);
  j["explanation"] = explain(summary, corpus);
  return j.dump(1) + "\n";
}

std::string fptree_to_json(const FPTree& tree, const DigestRegistry& registry) {
  std::function<json(std::uint32_t)> node = [&](std::uint32_t n) {
    const FPNode& fn = tree.nodes()[n];
    json j;
    if (n != 0) {
      j["feature"] = fn.feature;
      j["text"] = describe_feature(registry, fn.feature);
    }
    j["count"] = fn.count;
    json kids = json::array();
    for (std::uint32_t c : fn.children) kids.push_back(node(c));
    j["children"] = std::move(kids);
    return j;
  };
  json j;
  j["transactions"] = tree.transactions();
  json header = json::array();
  for (const HeaderEntry& h : tree.header()) {
    header.push_back({{"feature", h.feature}, {"support", h.support}, {"nodes", h.nodes.size()}});
  }
  j["header"] = std::move(header);
  j["root"] = node(0);
  return j.dump() + "\n";
}

}  // namespace qlog
