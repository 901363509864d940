#pragma once

#include "contract_diag/term_id.hpp"

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace contract_diag {

/// Provenance DAG over term identities: an edge u -> w means u was used to
/// produce w. Vertex labels hold the rendered term.
class ProvenanceGraph {
 public:
  void add_vertex(const TermId& id, const std::string& label) { vertices_.emplace(id, label); }
  void add_edge(const TermId& from, const TermId& to) {
    edges_.emplace(from, to);
    predecessors_[to].insert(from);
  }

  void merge(const ProvenanceGraph& other) {
    for (const auto& [id, label] : other.vertices_) add_vertex(id, label);
    for (const auto& [u, w] : other.edges_) add_edge(u, w);
  }

  bool contains(const TermId& id) const { return vertices_.count(id) > 0; }
  const std::map<TermId, std::string>& vertices() const { return vertices_; }
  const std::set<std::pair<TermId, TermId>>& edges() const { return edges_; }

  const std::set<TermId>& predecessors(const TermId& id) const {
    static const std::set<TermId> none;
    auto it = predecessors_.find(id);
    return it == predecessors_.end() ? none : it->second;
  }
  std::size_t in_degree(const TermId& id) const { return predecessors(id).size(); }

  /// Vertices with in-degree 0 that reach `target` (including `target` itself
  /// when it has no predecessors).
  std::set<TermId> leaves_reaching(const TermId& target) const {
    std::set<TermId> seen{target};
    std::vector<TermId> stack{target};
    std::set<TermId> out;
    while (!stack.empty()) {
      TermId cur = stack.back();
      stack.pop_back();
      const auto& preds = predecessors(cur);
      if (preds.empty()) out.insert(cur);
      for (const auto& p : preds)
        if (seen.insert(p).second) stack.push_back(p);
    }
    return out;
  }

 private:
  std::map<TermId, std::string> vertices_;
  std::set<std::pair<TermId, TermId>> edges_;
  std::map<TermId, std::set<TermId>> predecessors_;
};

using CompositionGraph = ProvenanceGraph;
using DiagnosticsGraph = ProvenanceGraph;

}  // namespace contract_diag
