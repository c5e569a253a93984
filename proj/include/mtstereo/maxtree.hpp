#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "mtstereo/image.hpp"

namespace mts {

using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

struct MaxTreeNode {
    NodeId parent = kNoNode;
    int level = 0;
    int begin = 0;  // inclusive
    int end = 0;    // inclusive
    int coarseness = 0;
    int depth = 0;          // edges to the root
    NodeId last_descendant = kNoNode;  // subtree occupies ids [id, last_descendant]

    int width() const { return end - begin + 1; }
    int center() const { return (begin + end) / 2; }
    bool contains(int x) const { return begin <= x && x <= end; }
};

/// Canonical 1D max-tree of one scan-line: one node per connected component of
/// an upper threshold set, with each node's level strictly above its parent's.
/// Nodes are numbered in preorder (root is 0, children sorted by begin), so the
/// descendants of node n are exactly the ids in (n, last_descendant].
class MaxTree {
public:
    MaxTree() = default;

    int row() const { return row_; }
    int line_width() const { return static_cast<int>(deepest_.size()); }
    NodeId root() const { return 0; }
    std::size_t size() const { return nodes_.size(); }

    const MaxTreeNode& node(NodeId id) const { return nodes_[static_cast<std::size_t>(id)]; }
    std::span<const MaxTreeNode> nodes() const { return nodes_; }

    /// Node with the highest level containing column x (the leaf-most one).
    NodeId deepest_at(int x) const { return deepest_[static_cast<std::size_t>(x)]; }

    bool is_leaf(NodeId id) const { return node(id).last_descendant == id; }
    bool is_descendant(NodeId candidate, NodeId ancestor) const {
        return candidate > ancestor && candidate <= node(ancestor).last_descendant;
    }

    /// The `steps`-th ancestor of `id` (steps <= depth).
    NodeId ancestor(NodeId id, int steps) const;

    friend MaxTree build_scanline_tree(std::span<const std::uint16_t> levels, int row);

private:
    int row_ = 0;
    std::vector<MaxTreeNode> nodes_;
    std::vector<NodeId> deepest_;
};

MaxTree build_scanline_tree(std::span<const std::uint16_t> levels, int row = 0);

/// One tree per image row.
std::vector<MaxTree> build_trees(const QuantizedImage& img, int threads = 1);

/// Coarseness of every node: edges to its highest-level leaf descendant, with
/// ties between equally high leaves resolved to the nearest one. Leaves are 0.
/// build_scanline_tree already stores these in MaxTreeNode::coarseness.
std::vector<int> coarseness_levels(const MaxTree& tree);

/// Pairs (i-th ancestor of left_node, i-th ancestor of right_node) for
/// i = 1..min(depth_left, depth_right, max_pairs).
std::vector<std::pair<NodeId, NodeId>> matched_ancestors(
    const MaxTree& left, NodeId left_node, const MaxTree& right, NodeId right_node,
    int max_pairs = std::numeric_limits<int>::max());

/// Debug dump, one node per line: `id parent level begin end coarseness`.
void write_tree(std::ostream& out, const MaxTree& tree);

}  // namespace mts
