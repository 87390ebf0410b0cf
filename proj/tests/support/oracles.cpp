#include "support/oracles.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>

namespace leofuzz::oracles {

namespace {

bool is_subsequence(const std::vector<std::string>& needle,
                    const std::vector<std::string>& hay) {
  std::size_t i = 0;
  for (const auto& h : hay) {
    if (i < needle.size() && needle[i] == h) ++i;
  }
  return i == needle.size();
}

}  // namespace

std::size_t lcs_exhaustive(const std::vector<std::string>& a,
                           const std::vector<std::string>& b) {
  const auto& small = a.size() <= b.size() ? a : b;
  const auto& large = a.size() <= b.size() ? b : a;
  if (small.size() > 20) throw std::runtime_error("lcs_exhaustive: input too large");
  std::size_t best = 0;
  for (std::uint32_t mask = 0; mask < (1u << small.size()); ++mask) {
    std::vector<std::string> sub;
    for (std::size_t i = 0; i < small.size(); ++i)
      if (mask & (1u << i)) sub.push_back(small[i]);
    if (sub.size() > best && is_subsequence(sub, large)) best = sub.size();
  }
  return best;
}

std::vector<std::vector<std::string>> simple_paths(const Digraph& g,
                                                   const std::string& root,
                                                   const std::string& node) {
  std::map<std::string, std::vector<std::string>> succ;
  for (const auto& n : g.nodes) succ[n];
  for (const auto& [a, b] : g.edges) succ[a].push_back(b);

  std::vector<std::vector<std::string>> out;
  std::vector<std::string> path;
  std::set<std::string> on_path;
  std::function<void(const std::string&)> dfs = [&](const std::string& u) {
    path.push_back(u);
    on_path.insert(u);
    if (u == node) {
      out.push_back(path);
    } else {
      for (const auto& v : succ[u])
        if (!on_path.count(v)) dfs(v);
    }
    on_path.erase(u);
    path.pop_back();
  };
  if (succ.count(root)) dfs(root);
  return out;
}

std::vector<std::string> dominators_bruteforce(const Digraph& g,
                                               const std::string& root,
                                               const std::string& node) {
  auto paths = simple_paths(g, root, node);
  if (paths.empty()) return {};
  std::set<std::string> doms(paths[0].begin(), paths[0].end());
  for (std::size_t i = 1; i < paths.size(); ++i) {
    std::set<std::string> here(paths[i].begin(), paths[i].end());
    std::set<std::string> keep;
    for (const auto& d : doms)
      if (here.count(d)) keep.insert(d);
    doms.swap(keep);
  }
  return {doms.begin(), doms.end()};
}

long double rate_reference(long double rate, long double cdsc, long double t,
                           long double epoch, long double gamma, long double delta) {
  const long double arg = cdsc / sqrtl(t) * sqrtl(epoch);
  long double r = rate - gamma * (tanhl(arg) - delta);
  if (r < 0.0L) r = 0.0L;
  if (r > 1.0L) r = 1.0L;
  return r;
}

}  // namespace leofuzz::oracles
