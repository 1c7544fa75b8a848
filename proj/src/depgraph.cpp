#include "fgfuzz/depgraph.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "json.hpp"

namespace fgfuzz {

std::string to_string(EdgeLabel l) {
  switch (l) {
  case EdgeLabel::C: return "C";
  case EdgeLabel::I: return "I";
  case EdgeLabel::Au: return "Au";
  case EdgeLabel::Ac: return "Ac";
  case EdgeLabel::Derive: return "Derive";
  }
  return "C";
}

EdgeLabel edge_label(Property p) {
  switch (p) {
  case Property::Confidentiality: return EdgeLabel::C;
  case Property::Integrity: return EdgeLabel::I;
  case Property::Authentication: return EdgeLabel::Au;
  case Property::Accounting: return EdgeLabel::Ac;
  }
  return EdgeLabel::C;
}

std::set<std::string> DependencyGraph::in_neighbors(const std::string& node,
                                                    EdgeLabel label) const {
  std::set<std::string> out;
  for (const auto& e : edges)
    if (e.to == node && e.label == label) out.insert(e.from);
  return out;
}

std::set<std::string> DependencyGraph::out_neighbors(const std::string& node,
                                                     EdgeLabel label) const {
  std::set<std::string> out;
  for (const auto& e : edges)
    if (e.from == node && e.label == label) out.insert(e.to);
  return out;
}

std::string SecurityVector::to_string() const {
  std::ostringstream s;
  s << "[" << v[0] << "," << v[1] << "," << v[2] << "," << v[3] << "]";
  return s.str();
}

DependencyGraph build_graph(const ProtocolModel& model) {
  DependencyGraph g;
  for (const auto& id : model.identifiers) g.nodes.insert(id.name);
  for (const auto& e : model.protections)
    for (Property p : kAllProperties)
      for (const auto& q : e.get(p).protectors)
        g.edges.insert(DepEdge{q, e.identifier, edge_label(p)});
  for (const auto& k : model.kdfs)
    for (const auto& in : k.inputs) g.edges.insert(DepEdge{in, k.output, EdgeLabel::Derive});
  return g;
}

namespace {

void require_node(const DependencyGraph& g, const std::string& identifier) {
  if (!g.has_node(identifier)) throw UnknownIdentifier(identifier);
}

// Distinct unprotected ancestors reached by expanding protectors through
// their own protectors for the same property. Protection graphs are DAGs
// (validated), so plain memoized recursion terminates.
std::set<std::string> frontier_of(const DependencyGraph& g, const std::string& node, EdgeLabel l,
                                  std::map<std::string, std::set<std::string>>& memo) {
  auto it = memo.find(node);
  if (it != memo.end()) return it->second;
  std::set<std::string> protectors = g.in_neighbors(node, l);
  std::set<std::string> result;
  if (protectors.empty()) {
    result.insert(node);
  } else {
    for (const auto& q : protectors) {
      auto sub = frontier_of(g, q, l, memo);
      result.insert(sub.begin(), sub.end());
    }
  }
  memo.emplace(node, result);
  return result;
}

long long additive_level(const DependencyGraph& g, const std::string& node, EdgeLabel l,
                         std::map<std::string, long long>& memo) {
  auto it = memo.find(node);
  if (it != memo.end()) return it->second;
  long long v = 1;
  for (const auto& q : g.in_neighbors(node, l)) v += additive_level(g, q, l, memo);
  memo.emplace(node, v);
  return v;
}

} // namespace

std::set<std::string> frontier_set(const DependencyGraph& g, const std::string& identifier,
                                   Property p) {
  require_node(g, identifier);
  EdgeLabel l = edge_label(p);
  if (g.in_neighbors(identifier, l).empty()) return {};
  std::map<std::string, std::set<std::string>> memo;
  return frontier_of(g, identifier, l, memo);
}

SecurityVector security_vector(const DependencyGraph& g, const std::string& identifier,
                               VectorMode mode) {
  require_node(g, identifier);
  SecurityVector out;
  for (std::size_t i = 0; i < 4; ++i) {
    Property p = kAllProperties[i];
    EdgeLabel l = edge_label(p);
    if (mode == VectorMode::Frontier) {
      if (g.in_neighbors(identifier, l).empty()) {
        out[i] = 0;
      } else {
        std::map<std::string, std::set<std::string>> memo;
        out[i] = static_cast<long long>(frontier_of(g, identifier, l, memo).size());
      }
    } else {
      std::map<std::string, long long> memo;
      out[i] = additive_level(g, identifier, l, memo);
    }
  }
  return out;
}

double weighted_score(const SecurityVector& v, const WeightVector& w) {
  return w.c * static_cast<double>(v[0]) + w.i * static_cast<double>(v[1]) +
         w.au * static_cast<double>(v[2]) + w.ac * static_cast<double>(v[3]);
}

std::vector<std::pair<std::string, double>> rank_identifiers(const DependencyGraph& g,
                                                             const WeightVector& w,
                                                             VectorMode mode) {
  std::vector<std::pair<std::string, double>> out;
  out.reserve(g.nodes.size());
  for (const auto& n : g.nodes) out.emplace_back(n, weighted_score(security_vector(g, n, mode), w));
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second < b.second;
    return a.first < b.first;
  });
  return out;
}

DependencyGraph dependency_subgraph(const DependencyGraph& g, const std::string& identifier) {
  require_node(g, identifier);
  std::set<std::string> keep;
  std::function<void(const std::string&)> visit = [&](const std::string& node) {
    if (!keep.insert(node).second) return;
    for (const auto& e : g.edges)
      if (e.to == node) visit(e.from);
  };
  visit(identifier);
  DependencyGraph out;
  out.nodes = keep;
  for (const auto& e : g.edges)
    if (keep.count(e.from) && keep.count(e.to)) out.edges.insert(e);
  return out;
}

std::string to_dot(const DependencyGraph& g) {
  std::ostringstream s;
  s << "digraph dependencies {\n  rankdir=BT;\n";
  for (const auto& n : g.nodes) s << "  \"" << n << "\";\n";
  for (const auto& e : g.edges)
    s << "  \"" << e.from << "\" -> \"" << e.to << "\" [label=\"" << to_string(e.label)
      << "\"];\n";
  s << "}\n";
  return s.str();
}

std::string graph_to_json(const DependencyGraph& g) {
  nlohmann::ordered_json j;
  j["nodes"] = g.nodes;
  j["edges"] = nlohmann::ordered_json::array();
  for (const auto& e : g.edges)
    j["edges"].push_back({{"from", e.from}, {"to", e.to}, {"label", to_string(e.label)}});
  return j.dump(2);
}

} // namespace fgfuzz
