#pragma once

// Exact min-cost flow via successive shortest augmenting paths with
// Johnson potentials. Costs must be non-negative. Ties in the Dijkstra
// queue break toward lower node ids, which makes the returned flow a
// deterministic function of the construction order.

#include <cstdint>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

namespace dctraj::flow {

class MinCostFlow {
 public:
  explicit MinCostFlow(int num_nodes) : head_(num_nodes, -1) {}

  int num_nodes() const { return static_cast<int>(head_.size()); }

  // Returns the edge id; pass it to flow_on() after solving.
  int add_edge(int from, int to, std::int64_t capacity, std::int64_t cost) {
    if (cost < 0) throw std::invalid_argument("MinCostFlow: negative cost");
    const int id = static_cast<int>(edges_.size());
    edges_.push_back({to, head_[from], capacity, cost});
    head_[from] = id;
    edges_.push_back({from, head_[to], 0, -cost});
    head_[to] = id + 1;
    return id;
  }

  struct Result {
    std::int64_t flow = 0;
    std::int64_t cost = 0;
  };

  // Sends at most max_flow units from source to sink, augmenting one
  // shortest path at a time.
  Result solve(int source, int sink,
               std::int64_t max_flow = std::numeric_limits<std::int64_t>::max()) {
    const std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
    const int n = num_nodes();
    std::vector<std::int64_t> potential(n, 0), dist(n);
    std::vector<int> prev_edge(n);
    Result res;

    while (res.flow < max_flow) {
      std::fill(dist.begin(), dist.end(), kInf);
      std::fill(prev_edge.begin(), prev_edge.end(), -1);
      dist[source] = 0;
      using Item = std::pair<std::int64_t, int>;  // (dist, node): id breaks ties
      std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
      pq.push({0, source});
      while (!pq.empty()) {
        auto [du, u] = pq.top();
        pq.pop();
        if (du > dist[u]) continue;
        for (int e = head_[u]; e != -1; e = edges_[e].next) {
          const Edge& ed = edges_[e];
          if (ed.capacity <= 0) continue;
          const std::int64_t nd =
              du + ed.cost + potential[u] - potential[ed.to];
          if (nd < dist[ed.to]) {
            dist[ed.to] = nd;
            prev_edge[ed.to] = e;
            pq.push({nd, ed.to});
          }
        }
      }
      if (dist[sink] >= kInf) break;  // no augmenting path left
      for (int i = 0; i < n; ++i)
        if (dist[i] < kInf) potential[i] += dist[i];

      std::int64_t push = max_flow - res.flow;
      for (int e = prev_edge[sink]; e != -1;) {
        push = std::min(push, edges_[e].capacity);
        const int from = edges_[e ^ 1].to;
        e = from == source ? -1 : prev_edge[from];
      }
      for (int e = prev_edge[sink]; e != -1;) {
        edges_[e].capacity -= push;
        edges_[e ^ 1].capacity += push;
        res.cost += push * edges_[e].cost;
        const int from = edges_[e ^ 1].to;
        e = from == source ? -1 : prev_edge[from];
      }
      res.flow += push;
    }
    return res;
  }

  std::int64_t flow_on(int edge_id) const {
    return edges_[edge_id ^ 1].capacity;  // reverse capacity == routed flow
  }

 private:
  struct Edge {
    int to;
    int next;
    std::int64_t capacity;
    std::int64_t cost;
  };
  std::vector<int> head_;
  std::vector<Edge> edges_;
};

}  // namespace dctraj::flow
