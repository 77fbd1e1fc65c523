#pragma once

// Shortest-path oracle for edit distance, independent of the DP.
//
// Every string over the alphabet with length <= max_len is a node; one
// insertion, deletion or substitution is an edge. An optimal edit script can
// be reordered as substitutions, then deletions, then insertions, so it never
// leaves the length band [min(|a|,|b|), max(|a|,|b|)] and BFS restricted to
// length <= max_len finds the exact minimum.

#include <cstddef>
#include <map>
#include <queue>
#include <string>
#include <vector>

namespace sfr::oracle {

class EditGraph {
 public:
  EditGraph(std::string alphabet, std::size_t max_len) : alphabet_(std::move(alphabet)), max_len_(max_len) {
    enumerate("", 0);
    for (std::size_t i = 0; i < nodes_.size(); ++i) index_[nodes_[i]] = i;
    adjacency_.resize(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      for (const auto& next : neighbours(nodes_[i])) adjacency_[i].push_back(index_.at(next));
    }
  }

  const std::vector<std::string>& nodes() const { return nodes_; }

  // Distances from `source` to every node.
  std::vector<int> distances_from(const std::string& source) const {
    std::vector<int> dist(nodes_.size(), -1);
    std::queue<std::size_t> frontier;
    const std::size_t s = index_.at(source);
    dist[s] = 0;
    frontier.push(s);
    while (!frontier.empty()) {
      const std::size_t u = frontier.front();
      frontier.pop();
      for (const std::size_t v : adjacency_[u]) {
        if (dist[v] < 0) {
          dist[v] = dist[u] + 1;
          frontier.push(v);
        }
      }
    }
    return dist;
  }

  std::size_t index_of(const std::string& s) const { return index_.at(s); }

 private:
  void enumerate(const std::string& prefix, std::size_t len) {
    nodes_.push_back(prefix);
    if (len == max_len_) return;
    for (char c : alphabet_) enumerate(prefix + c, len + 1);
  }

  std::vector<std::string> neighbours(const std::string& s) const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < s.size(); ++i) {
      out.push_back(s.substr(0, i) + s.substr(i + 1));
      for (char c : alphabet_) {
        if (c != s[i]) {
          std::string t = s;
          t[i] = c;
          out.push_back(t);
        }
      }
    }
    if (s.size() < max_len_) {
      for (std::size_t i = 0; i <= s.size(); ++i) {
        for (char c : alphabet_) out.push_back(s.substr(0, i) + c + s.substr(i));
      }
    }
    return out;
  }

  std::string alphabet_;
  std::size_t max_len_;
  std::vector<std::string> nodes_;
  std::map<std::string, std::size_t> index_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

}  // namespace sfr::oracle
