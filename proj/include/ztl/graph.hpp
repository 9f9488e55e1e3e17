#pragma once

#include <vector>

namespace ztl {

// Tarjan strongly connected components; returns component index per vertex,
// components numbered in reverse topological order.
struct SccResult {
  std::vector<int> comp;
  int count = 0;
};

inline SccResult strongly_connected_components(const std::vector<std::vector<int>>& adj) {
  const int n = static_cast<int>(adj.size());
  SccResult res;
  res.comp.assign(static_cast<std::size_t>(n), -1);
  std::vector<int> index(static_cast<std::size_t>(n), -1), low(static_cast<std::size_t>(n), 0);
  std::vector<bool> on_stack(static_cast<std::size_t>(n), false);
  std::vector<int> stack;
  int next_index = 0;

  // Iterative Tarjan to avoid deep recursion.
  struct Frame { int v; std::size_t ei; };
  for (int s = 0; s < n; ++s) {
    if (index[static_cast<std::size_t>(s)] != -1) continue;
    std::vector<Frame> call{{s, 0}};
    index[static_cast<std::size_t>(s)] = low[static_cast<std::size_t>(s)] = next_index++;
    stack.push_back(s);
    on_stack[static_cast<std::size_t>(s)] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.ei < adj[static_cast<std::size_t>(f.v)].size()) {
        int w = adj[static_cast<std::size_t>(f.v)][f.ei++];
        if (index[static_cast<std::size_t>(w)] == -1) {
          index[static_cast<std::size_t>(w)] = low[static_cast<std::size_t>(w)] = next_index++;
          stack.push_back(w);
          on_stack[static_cast<std::size_t>(w)] = true;
          call.push_back({w, 0});
        } else if (on_stack[static_cast<std::size_t>(w)]) {
          low[static_cast<std::size_t>(f.v)] =
              std::min(low[static_cast<std::size_t>(f.v)], index[static_cast<std::size_t>(w)]);
        }
      } else {
        int v = f.v;
        call.pop_back();
        if (!call.empty())
          low[static_cast<std::size_t>(call.back().v)] =
              std::min(low[static_cast<std::size_t>(call.back().v)], low[static_cast<std::size_t>(v)]);
        if (low[static_cast<std::size_t>(v)] == index[static_cast<std::size_t>(v)]) {
          while (true) {
            int w = stack.back();
            stack.pop_back();
            on_stack[static_cast<std::size_t>(w)] = false;
            res.comp[static_cast<std::size_t>(w)] = res.count;
            if (w == v) break;
          }
          ++res.count;
        }
      }
    }
  }
  return res;
}

}  // namespace ztl
