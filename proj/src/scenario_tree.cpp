//
//  scenario_tree.cpp — ruc
//

#include "ruc/scenario_tree.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace ruc {

int ScenarioTree::add_root(double demand) {
  if (!nodes_.empty()) throw ValidationError("tree already has a root");
  TreeNode n;
  n.id = 0;
  n.period = 1;
  n.demand = demand;
  nodes_.push_back(n);
  return 0;
}

int ScenarioTree::add_child(int parent, double cond_prob, double demand) {
  if (finalized_) throw ValidationError("tree is finalized");
  if (parent < 0 || parent >= size()) throw ValidationError("add_child: bad parent id");
  TreeNode n;
  n.id = size();
  n.period = nodes_[parent].period + 1;
  n.parent = parent;
  n.cond_prob = cond_prob;
  n.demand = demand;
  nodes_.push_back(n);
  nodes_[parent].children.push_back(n.id);
  return n.id;
}

void ScenarioTree::finalize() {
  if (nodes_.empty()) throw ValidationError("empty tree");
  horizon_ = 0;
  for (auto& n : nodes_) horizon_ = std::max(horizon_, n.period);

  nodes_[0].path_prob = 1.0;
  for (auto& n : nodes_) {
    if (n.id == 0) continue;
    n.path_prob = nodes_[n.parent].path_prob * n.cond_prob;
  }

  stages_.assign(horizon_, {});
  leaves_.clear();
  for (const auto& n : nodes_) {
    stages_[n.period - 1].push_back(n.id);
    if (n.children.empty()) {
      if (n.period != horizon_)
        throw ValidationError("node " + std::to_string(n.id) + " is a leaf before the horizon");
      leaves_.push_back(n.id);
    } else {
      double csum = 0.0;
      for (int c : n.children) {
        if (nodes_[c].period != n.period + 1)
          throw ValidationError("child period must be parent period + 1");
        csum += nodes_[c].cond_prob;
      }
      if (std::abs(csum - 1.0) > 1e-9)
        throw ValidationError("sibling probabilities at node " + std::to_string(n.id) +
                              " sum to " + std::to_string(csum));
    }
  }

  double lsum = 0.0;
  for (int l : leaves_) lsum += nodes_[l].path_prob;
  if (std::abs(lsum - 1.0) > 1e-12)
    throw ValidationError("leaf path probabilities sum to " + std::to_string(lsum));
  finalized_ = true;
}

ScenarioTree build_tree(const Instance& inst, double epsilon) {
  if (epsilon < 0.0) throw ValidationError("epsilon must be >= 0");
  if (epsilon >= 1.0) throw ValidationError("epsilon must be < 1 (nonpositive demand possible)");
  const auto& spec = inst.scenario;
  if (spec.branch_probs.size() != 2)
    throw ValidationError("scenario spec: branch_probs must be a pair");
  const int T = inst.horizon;
  for (int p : spec.branch_periods)
    if (p < 2 || p > T) throw ValidationError("branch period out of 2..T");

  ScenarioTree tree;
  tree.add_root(inst.base_demand[0]);

  // Frontier of (node id, block multiplier); grown breadth-first period by
  // period so node ids are in BFS order and the low-multiplier child comes
  // first (leaf order matches the low..high scenario enumeration).
  std::vector<std::pair<int, double>> frontier = {{0, 1.0}};
  const double mult[2] = {1.0 - epsilon, 1.0 + epsilon};

  for (int t = 2; t <= T; ++t) {
    bool branch = false;
    for (int bp : spec.branch_periods) branch = branch || (bp == t);
    std::vector<std::pair<int, double>> next;
    for (auto [id, m] : frontier) {
      if (branch) {
        for (int k = 0; k < 2; ++k) {
          int c = tree.add_child(id, spec.branch_probs[k], mult[k] * inst.base_demand[t - 1]);
          next.emplace_back(c, mult[k]);
        }
      } else {
        int c = tree.add_child(id, 1.0, m * inst.base_demand[t - 1]);
        next.emplace_back(c, m);
      }
    }
    frontier = std::move(next);
  }
  tree.finalize();
  return tree;
}

std::vector<ScenarioPath> enumerate_paths(const ScenarioTree& tree) {
  std::vector<ScenarioPath> paths;
  paths.reserve(tree.leaves().size());
  for (int leaf : tree.leaves()) {
    ScenarioPath p;
    p.leaf = leaf;
    p.prob = tree.node(leaf).path_prob;
    for (int id = leaf; id != -1; id = tree.node(id).parent) p.nodes.push_back(id);
    std::reverse(p.nodes.begin(), p.nodes.end());
    paths.push_back(std::move(p));
  }
  return paths;
}

std::vector<double> total_demand_random_variable(const ScenarioTree& tree) {
  std::vector<double> totals;
  totals.reserve(tree.leaves().size());
  for (int leaf : tree.leaves()) {
    double sum = 0.0;
    for (int id = leaf; id != -1; id = tree.node(id).parent) sum += tree.node(id).demand;
    totals.push_back(sum);
  }
  return totals;
}

std::string dump_tree(const ScenarioTree& tree) {
  std::ostringstream out;
  char buf[160];
  for (const auto& n : tree.nodes()) {
    std::snprintf(buf, sizeof(buf), "%d\t%d\t%d\t%.12g\t%.12g\t%.12g\n", n.id, n.period, n.parent,
                  n.cond_prob, n.path_prob, n.demand);
    out << buf;
  }
  return out.str();
}

}  // namespace ruc
