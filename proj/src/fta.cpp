#include "uam/fta.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace uam::fta {

double event_probability(const BasicEvent& e) {
  if (e.fixed_probability) return *e.fixed_probability;
  return 1.0 - std::exp(-e.lambda * e.exposure);
}

namespace {

bool is_event(const FaultTree& tree, const std::string& id) {
  return tree.events.count(id) != 0;
}

const Gate& gate_at(const FaultTree& tree, const std::string& id) {
  auto it = tree.gates.find(id);
  if (it == tree.gates.end()) {
    throw FtaError("tree '" + tree.id + "': unknown node '" + id + "'");
  }
  return it->second;
}

// Events reachable from each node, memoized by node id.
using EventSets = std::map<std::string, std::set<std::string>>;

const std::set<std::string>& events_under(const FaultTree& tree, const std::string& id,
                                          EventSets& memo) {
  auto it = memo.find(id);
  if (it != memo.end()) return it->second;
  std::set<std::string> out;
  if (is_event(tree, id)) {
    out.insert(id);
  } else {
    for (const auto& child : gate_at(tree, id).children) {
      const auto& sub = events_under(tree, child, memo);
      out.insert(sub.begin(), sub.end());
    }
  }
  return memo.emplace(id, std::move(out)).first->second;
}

bool subtrees_share_events(const FaultTree& tree, const std::string& id, EventSets& memo) {
  if (is_event(tree, id)) return false;
  const Gate& gate = gate_at(tree, id);
  std::set<std::string> seen;
  for (const auto& child : gate.children) {
    for (const auto& ev : events_under(tree, child, memo)) {
      if (!seen.insert(ev).second) return true;
    }
  }
  for (const auto& child : gate.children) {
    if (subtrees_share_events(tree, child, memo)) return true;
  }
  return false;
}

// Exact combination assuming the children of every gate are independent,
// which holds when no two sibling subtrees share an event.
double eval_disjoint(const FaultTree& tree, const std::string& id) {
  if (is_event(tree, id)) return event_probability(tree.events.at(id));
  const Gate& gate = gate_at(tree, id);
  std::vector<double> p;
  p.reserve(gate.children.size());
  for (const auto& child : gate.children) p.push_back(eval_disjoint(tree, child));
  switch (gate.op) {
    case GateOp::And: {
      double prod = 1.0;
      for (double x : p) prod *= x;
      return prod;
    }
    case GateOp::Or: {
      double none = 1.0;
      for (double x : p) none *= 1.0 - x;
      return 1.0 - none;
    }
    case GateOp::KofN: {
      // Poisson-binomial tail: dp[j] = P(exactly j children failed).
      std::vector<double> dp(p.size() + 1, 0.0);
      dp[0] = 1.0;
      for (size_t i = 0; i < p.size(); ++i) {
        for (size_t j = i + 1; j-- > 0;) {
          dp[j + 1] += dp[j] * p[i];
          dp[j] *= 1.0 - p[i];
        }
      }
      double tail = 0.0;
      for (size_t j = static_cast<size_t>(gate.k); j < dp.size(); ++j) tail += dp[j];
      return tail;
    }
  }
  throw FtaError("unreachable gate kind");
}

constexpr int kMaxExactCutSets = 20;
constexpr size_t kMaxIntermediateSets = 1'000'000;

// Inclusion-exclusion over a family of cut sets (exact, 2^m terms).
double inclusion_exclusion(const FaultTree& tree, const std::vector<CutSet>& sets) {
  std::map<std::string, int> index;
  for (const auto& cs : sets) {
    for (const auto& ev : cs.events) index.emplace(ev, static_cast<int>(index.size()));
  }
  std::vector<double> p(index.size());
  for (const auto& [ev, i] : index) p[i] = event_probability(tree.events.at(ev));
  std::vector<std::vector<int>> masks(sets.size());
  for (size_t i = 0; i < sets.size(); ++i) {
    for (const auto& ev : sets[i].events) masks[i].push_back(index.at(ev));
  }

  double total = 0.0;
  std::vector<char> covered(index.size(), 0);
  // Depth-first over subsets; product updated incrementally on inclusion.
  auto rec = [&](auto&& self, size_t i, double prod, int count) -> void {
    if (i == sets.size()) {
      if (count > 0) total += (count % 2 == 1 ? prod : -prod);
      return;
    }
    self(self, i + 1, prod, count);
    double inc = prod;
    std::vector<int> added;
    for (int e : masks[i]) {
      if (!covered[e]) {
        covered[e] = 1;
        added.push_back(e);
        inc *= p[e];
      }
    }
    self(self, i + 1, inc, count + 1);
    for (int e : added) covered[e] = 0;
  };
  rec(rec, 0, 1.0, 0);
  return total;
}

void check_acyclic(const FaultTree& tree, const std::string& id,
                   std::set<std::string>& path, std::set<std::string>& done) {
  if (is_event(tree, id)) return;
  if (done.count(id)) return;
  if (!path.insert(id).second) {
    throw FtaError("tree '" + tree.id + "': cycle through gate '" + id + "'");
  }
  for (const auto& child : gate_at(tree, id).children) {
    check_acyclic(tree, child, path, done);
  }
  path.erase(id);
  done.insert(id);
}

}  // namespace

void validate(const FaultTree& tree) {
  if (tree.top.empty()) throw FtaError("tree '" + tree.id + "': no top node");
  for (const auto& [id, ev] : tree.events) {
    if (!(ev.lambda >= 0.0) || !std::isfinite(ev.lambda)) {
      throw FtaError("event '" + id + "': lambda must be >= 0");
    }
    if (!(ev.exposure > 0.0)) {
      throw FtaError("event '" + id + "': exposure must be > 0");
    }
    if (ev.fixed_probability &&
        !(*ev.fixed_probability >= 0.0 && *ev.fixed_probability <= 1.0)) {
      throw FtaError("event '" + id + "': fixed probability outside [0,1]");
    }
  }
  for (const auto& [id, gate] : tree.gates) {
    if (gate.children.empty()) throw FtaError("gate '" + id + "': no children");
    if (tree.events.count(id)) {
      throw FtaError("'" + id + "' declared as both event and gate");
    }
    for (const auto& child : gate.children) {
      if (!is_event(tree, child) && tree.gates.count(child) == 0) {
        throw FtaError("gate '" + id + "': unknown child '" + child + "'");
      }
    }
    if (gate.op == GateOp::KofN &&
        (gate.k < 1 || gate.k > static_cast<int>(gate.children.size()))) {
      throw FtaError("gate '" + id + "': k outside [1, children]");
    }
  }
  if (!is_event(tree, tree.top) && tree.gates.count(tree.top) == 0) {
    throw FtaError("tree '" + tree.id + "': unknown top node '" + tree.top + "'");
  }
  std::set<std::string> path, done;
  check_acyclic(tree, tree.top, path, done);
}

double evaluate_top(const FaultTree& tree) {
  validate(tree);
  EventSets memo;
  if (!subtrees_share_events(tree, tree.top, memo)) {
    return eval_disjoint(tree, tree.top);
  }
  auto sets = minimal_cut_sets(tree);
  if (sets.size() > kMaxExactCutSets) {
    throw FtaError("tree '" + tree.id + "': " + std::to_string(sets.size()) +
                   " cut sets with shared events exceed the exact limit of " +
                   std::to_string(kMaxExactCutSets) + "; use monte_carlo_top");
  }
  return inclusion_exclusion(tree, sets);
}

std::vector<CutSet> minimal_cut_sets(const FaultTree& tree) {
  validate(tree);
  // MOCUS: each working set is a conjunction of node refs; expand gates
  // until only basic events remain.
  std::vector<std::set<std::string>> work = {{tree.top}};
  bool expanded = true;
  while (expanded) {
    expanded = false;
    std::vector<std::set<std::string>> next;
    for (const auto& ws : work) {
      auto git = std::find_if(ws.begin(), ws.end(),
                              [&](const std::string& id) { return !is_event(tree, id); });
      if (git == ws.end()) {
        next.push_back(ws);
        continue;
      }
      expanded = true;
      const Gate& gate = gate_at(tree, *git);
      std::set<std::string> base = ws;
      base.erase(*git);
      auto push = [&](const std::vector<std::string>& members) {
        std::set<std::string> out = base;
        out.insert(members.begin(), members.end());
        next.push_back(std::move(out));
      };
      switch (gate.op) {
        case GateOp::And:
          push(gate.children);
          break;
        case GateOp::Or:
          for (const auto& child : gate.children) push({child});
          break;
        case GateOp::KofN: {
          // every k-subset of the children
          int n = static_cast<int>(gate.children.size());
          int k = gate.k;
          std::vector<int> idx(static_cast<size_t>(k));
          for (int i = 0; i < k; ++i) idx[static_cast<size_t>(i)] = i;
          while (true) {
            std::vector<std::string> members;
            for (int i : idx) members.push_back(gate.children[static_cast<size_t>(i)]);
            push(members);
            int i = k - 1;
            while (i >= 0 && idx[static_cast<size_t>(i)] == n - k + i) --i;
            if (i < 0) break;
            ++idx[static_cast<size_t>(i)];
            for (int j = i + 1; j < k; ++j) {
              idx[static_cast<size_t>(j)] = idx[static_cast<size_t>(j - 1)] + 1;
            }
          }
          break;
        }
      }
      if (next.size() > kMaxIntermediateSets) {
        throw FtaError("tree '" + tree.id + "': cut set expansion exceeds 1e6 sets");
      }
    }
    work = std::move(next);
  }

  // subset minimization: drop any set containing another as a subset
  std::sort(work.begin(), work.end(),
            [](const auto& a, const auto& b) { return a.size() < b.size(); });
  std::vector<std::set<std::string>> minimal;
  for (const auto& ws : work) {
    bool dominated = false;
    for (const auto& kept : minimal) {
      if (std::includes(ws.begin(), ws.end(), kept.begin(), kept.end())) {
        dominated = true;
        break;
      }
    }
    if (!dominated) minimal.push_back(ws);
  }

  std::vector<CutSet> out;
  out.reserve(minimal.size());
  for (const auto& ws : minimal) {
    CutSet cs;
    cs.events.assign(ws.begin(), ws.end());
    cs.probability = 1.0;
    for (const auto& ev : cs.events) {
      cs.probability *= event_probability(tree.events.at(ev));
    }
    out.push_back(std::move(cs));
  }
  std::sort(out.begin(), out.end(), [](const CutSet& a, const CutSet& b) {
    if (a.events.size() != b.events.size()) return a.events.size() < b.events.size();
    return a.events < b.events;
  });
  return out;
}

Importance importance(const FaultTree& tree, const std::string& event_id) {
  if (!tree.events.count(event_id)) {
    throw FtaError("tree '" + tree.id + "': unknown event '" + event_id + "'");
  }
  double p_top = evaluate_top(tree);
  FaultTree cond = tree;
  cond.events.at(event_id).fixed_probability = 1.0;
  double p_on = evaluate_top(cond);
  cond.events.at(event_id).fixed_probability = 0.0;
  double p_off = evaluate_top(cond);

  Importance out;
  out.birnbaum = p_on - p_off;
  if (p_top == 0.0) {
    throw FtaError("tree '" + tree.id + "': P(top) = 0, Fussell-Vesely undefined");
  }
  std::vector<CutSet> containing;
  for (auto& cs : minimal_cut_sets(tree)) {
    if (std::find(cs.events.begin(), cs.events.end(), event_id) != cs.events.end()) {
      containing.push_back(std::move(cs));
    }
  }
  if (containing.size() > static_cast<size_t>(kMaxExactCutSets)) {
    throw FtaError("tree '" + tree.id + "': too many cut sets for exact Fussell-Vesely");
  }
  out.fussell_vesely = inclusion_exclusion(tree, containing) / p_top;
  return out;
}

std::vector<std::pair<std::string, Importance>> importance_ranking(const FaultTree& tree) {
  std::vector<std::pair<std::string, Importance>> out;
  for (const auto& [id, ev] : tree.events) {
    out.emplace_back(id, importance(tree, id));
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.second.birnbaum > b.second.birnbaum;
  });
  return out;
}

namespace {

bool eval_bool(const FaultTree& tree, const std::string& id,
               const std::map<std::string, bool>& state) {
  auto it = state.find(id);
  if (it != state.end()) return it->second;
  const Gate& gate = gate_at(tree, id);
  int on = 0;
  switch (gate.op) {
    case GateOp::And:
      for (const auto& c : gate.children) {
        if (!eval_bool(tree, c, state)) return false;
      }
      return true;
    case GateOp::Or:
      for (const auto& c : gate.children) {
        if (eval_bool(tree, c, state)) return true;
      }
      return false;
    case GateOp::KofN:
      for (const auto& c : gate.children) {
        if (eval_bool(tree, c, state)) ++on;
      }
      return on >= gate.k;
  }
  return false;
}

}  // namespace

MonteCarloResult monte_carlo_top(const FaultTree& tree, std::uint64_t trials,
                                 std::uint64_t seed) {
  validate(tree);
  if (trials < 1) throw FtaError("monte_carlo_top: trials must be >= 1");
  std::vector<std::pair<std::string, double>> probs;  // sorted by id (map order)
  for (const auto& [id, ev] : tree.events) probs.emplace_back(id, event_probability(ev));

  std::mt19937_64 rng(seed);
  // 53-bit uniform in [0,1); avoids distribution objects so that streams
  // are bit-identical across standard library implementations
  auto uniform = [&rng]() { return (rng() >> 11) * 0x1.0p-53; };

  std::map<std::string, bool> state;
  std::uint64_t hits = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    for (const auto& [id, p] : probs) state[id] = uniform() < p;
    if (eval_bool(tree, tree.top, state)) ++hits;
  }
  MonteCarloResult out;
  out.trials = trials;
  out.hits = hits;
  out.estimate = static_cast<double>(hits) / static_cast<double>(trials);
  out.std_error =
      std::sqrt(out.estimate * (1.0 - out.estimate) / static_cast<double>(trials));
  out.reliable = hits >= 10;
  return out;
}

double brute_force_top(const FaultTree& tree) {
  validate(tree);
  size_t n = tree.events.size();
  if (n > 20) throw FtaError("brute_force_top: more than 20 events");
  std::vector<std::string> ids;
  std::vector<double> p;
  for (const auto& [id, ev] : tree.events) {
    ids.push_back(id);
    p.push_back(event_probability(ev));
  }
  double total = 0.0;
  std::map<std::string, bool> state;
  for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
    double weight = 1.0;
    for (size_t i = 0; i < n; ++i) {
      bool on = (mask >> i) & 1;
      state[ids[i]] = on;
      weight *= on ? p[i] : 1.0 - p[i];
    }
    if (weight > 0.0 && eval_bool(tree, tree.top, state)) total += weight;
  }
  return total;
}

}  // namespace uam::fta
