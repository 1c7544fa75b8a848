#pragma once

#include "fgfuzz/model.hpp"

#include <array>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace fgfuzz {

// Edge labels: one per protected property, plus derivation edges from each
// kdf input to its output.
enum class EdgeLabel { C, I, Au, Ac, Derive };

std::string to_string(EdgeLabel l);
EdgeLabel edge_label(Property p);

struct DepEdge {
  std::string from; // protector / derivation input
  std::string to;   // protected identifier / derivation output
  EdgeLabel label;
  friend auto operator<=>(const DepEdge&, const DepEdge&) = default;
};

struct DependencyGraph {
  std::set<std::string> nodes;
  std::set<DepEdge> edges;

  bool has_node(const std::string& name) const { return nodes.count(name) != 0; }

  // Protectors (or derivation inputs) of `node` under `label`.
  std::set<std::string> in_neighbors(const std::string& node, EdgeLabel label) const;
  std::set<std::string> out_neighbors(const std::string& node, EdgeLabel label) const;
};

// [c, i, au, ac]; 0 means unprotected for that property.
struct SecurityVector {
  std::array<long long, 4> v{0, 0, 0, 0};

  long long& operator[](std::size_t i) { return v[i]; }
  long long operator[](std::size_t i) const { return v[i]; }
  long long get(Property p) const { return v[static_cast<std::size_t>(p)]; }

  friend bool operator==(const SecurityVector&, const SecurityVector&) = default;
  std::string to_string() const;
};

struct WeightVector {
  double c = 1.0, i = 1.0, au = 0.5, ac = 0.5;
  friend bool operator==(const WeightVector&, const WeightVector&) = default;
};

enum class VectorMode {
  // Per property: 0 when unprotected, else the size of the minimal frontier
  // of unprotected ancestors reached by expanding protectors.
  Frontier,
  // Literal recursive accumulation starting from [1,1,1,1].
  Additive,
};

// Builds the labeled dependency graph. Precondition: validate(model) empty.
DependencyGraph build_graph(const ProtocolModel& model);

// Throws UnknownIdentifier when the identifier is not a node.
SecurityVector security_vector(const DependencyGraph& graph, const std::string& identifier,
                               VectorMode mode = VectorMode::Frontier);

// The frontier set itself (distinct unprotected ancestors for the property);
// empty when the identifier is unprotected. Exposed for reporting.
std::set<std::string> frontier_set(const DependencyGraph& graph, const std::string& identifier,
                                   Property p);

double weighted_score(const SecurityVector& v, const WeightVector& w);

// Ascending by score; ties broken lexicographically by identifier name.
std::vector<std::pair<std::string, double>> rank_identifiers(const DependencyGraph& graph,
                                                             const WeightVector& w,
                                                             VectorMode mode = VectorMode::Frontier);

// Induced subgraph of the identifier and all of its ancestors (protectors and
// derivation inputs, transitively).
DependencyGraph dependency_subgraph(const DependencyGraph& graph, const std::string& identifier);

std::string to_dot(const DependencyGraph& graph);
std::string graph_to_json(const DependencyGraph& graph);

} // namespace fgfuzz
