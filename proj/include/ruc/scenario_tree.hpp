//
//  scenario_tree.hpp — ruc
//
//  Explicit node tree for the net-load filtration.  A node at period t is
//  an atom of the period-t sigma algebra; the root carries period 1 and the
//  deterministic first-period demand.  Trees are immutable after finalize()
//  and safe to share read-only.
//

#ifndef RUC_SCENARIO_TREE_HPP
#define RUC_SCENARIO_TREE_HPP

#include <string>
#include <vector>

#include "ruc/instance.hpp"

namespace ruc {

struct TreeNode {
  int id = -1;
  int period = 1;  // 1..T
  int parent = -1; // -1 for the root
  std::vector<int> children;
  double cond_prob = 1.0;
  double path_prob = 1.0;
  double demand = 0.0;  // MW net load realized at this node
};

class ScenarioTree {
 public:
  // Incremental construction (breadth-first id order is the convention used
  // by build_tree; any order with parents-before-children is accepted).
  int add_root(double demand);
  int add_child(int parent, double cond_prob, double demand);

  // Computes path probabilities, per-period indices and the leaf list, and
  // checks the structural invariants.  Throws ValidationError on violation.
  void finalize();

  bool finalized() const { return finalized_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  int horizon() const { return horizon_; }
  const TreeNode& node(int id) const { return nodes_[id]; }
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const std::vector<int>& stage(int period) const { return stages_[period - 1]; }
  const std::vector<int>& leaves() const { return leaves_; }
  int root() const { return 0; }

 private:
  std::vector<TreeNode> nodes_;
  std::vector<std::vector<int>> stages_;  // node ids by period (1-based outside)
  std::vector<int> leaves_;
  int horizon_ = 0;
  bool finalized_ = false;
};

// Materialize the +/- epsilon binary tree described by the instance's
// scenario spec.  Demands of the block starting at a branch period are the
// base demand scaled by (1-eps) for the low child and (1+eps) for the high
// child; blocks before the first branch are deterministic.  The low child
// is always created first, so leaves enumerate low-to-high.
// Throws ValidationError for epsilon >= 1 (nonpositive demand possible).
ScenarioTree build_tree(const Instance& inst, double epsilon);

struct ScenarioPath {
  int leaf = -1;
  std::vector<int> nodes;  // root..leaf, length = horizon
  double prob = 0.0;
};

std::vector<ScenarioPath> enumerate_paths(const ScenarioTree& tree);

// Total net load  D = sum_t d_t  along each leaf's path, in leaf order.
std::vector<double> total_demand_random_variable(const ScenarioTree& tree);

// Debug dump: one line per node,
// "node_id<TAB>period<TAB>parent<TAB>cond_prob<TAB>path_prob<TAB>demand".
std::string dump_tree(const ScenarioTree& tree);

}  // namespace ruc

#endif
