#include "mtstereo/maxtree.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "mtstereo/parallel.hpp"

namespace mts {

MaxTree build_scanline_tree(std::span<const std::uint16_t> levels, int row) {
    if (levels.empty()) {
        throw std::invalid_argument("cannot build a max-tree of an empty scan-line");
    }
    const int n = static_cast<int>(levels.size());

    // Single left-to-right pass with a stack of open components. A component is
    // closed when a lower value is seen; its parent is whichever component
    // remains open at the next lower level.
    std::vector<MaxTreeNode> raw;
    std::vector<NodeId> stack;
    std::vector<NodeId> deepest(levels.size());
    for (int x = 0; x <= n; ++x) {
        const int v = x < n ? levels[x] : -1;
        int begin = x;
        NodeId closed = kNoNode;
        while (!stack.empty() && raw[stack.back()].level > v) {
            const NodeId top = stack.back();
            stack.pop_back();
            raw[top].end = x - 1;
            begin = raw[top].begin;
            if (closed != kNoNode) {
                raw[closed].parent = top;
            }
            closed = top;
        }
        if (x == n) {
            break;
        }
        if (stack.empty() || raw[stack.back()].level < v) {
            MaxTreeNode fresh;
            fresh.level = v;
            fresh.begin = begin;
            raw.push_back(fresh);
            stack.push_back(static_cast<NodeId>(raw.size() - 1));
        }
        if (closed != kNoNode) {
            raw[closed].parent = stack.back();
        }
        deepest[x] = stack.back();
    }

    // Renumber in preorder: sorting by (begin, level) puts every parent before
    // its children and each subtree in a contiguous block.
    std::vector<NodeId> order(raw.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
        if (raw[a].begin != raw[b].begin) {
            return raw[a].begin < raw[b].begin;
        }
        return raw[a].level < raw[b].level;
    });
    std::vector<NodeId> new_id(raw.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        new_id[order[i]] = static_cast<NodeId>(i);
    }

    MaxTree tree;
    tree.row_ = row;
    tree.nodes_.resize(raw.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        MaxTreeNode node = raw[order[i]];
        node.parent = node.parent == kNoNode ? kNoNode : new_id[node.parent];
        node.last_descendant = static_cast<NodeId>(i);
        tree.nodes_[i] = node;
    }
    for (auto& d : deepest) {
        d = new_id[d];
    }
    tree.deepest_ = std::move(deepest);

    for (std::size_t i = 1; i < tree.nodes_.size(); ++i) {
        auto& node = tree.nodes_[i];
        node.depth = tree.nodes_[node.parent].depth + 1;
    }

    // Children follow parents, so a reverse sweep sees every subtree complete.
    std::vector<int> best_leaf_level(tree.nodes_.size());
    for (std::size_t i = tree.nodes_.size(); i-- > 0;) {
        auto& node = tree.nodes_[i];
        if (node.last_descendant == static_cast<NodeId>(i)) {
            best_leaf_level[i] = node.level;
            node.coarseness = 0;
        }
        if (node.parent == kNoNode) {
            continue;
        }
        auto& parent = tree.nodes_[node.parent];
        const auto p = static_cast<std::size_t>(node.parent);
        const bool first_child = parent.last_descendant == node.parent;
        parent.last_descendant = std::max(parent.last_descendant, node.last_descendant);
        const int candidate = node.coarseness + 1;
        if (first_child || best_leaf_level[i] > best_leaf_level[p]) {
            best_leaf_level[p] = best_leaf_level[i];
            parent.coarseness = candidate;
        } else if (best_leaf_level[i] == best_leaf_level[p]) {
            parent.coarseness = std::min(parent.coarseness, candidate);
        }
    }
    return tree;
}

NodeId MaxTree::ancestor(NodeId id, int steps) const {
    for (int i = 0; i < steps && id != kNoNode; ++i) {
        id = node(id).parent;
    }
    return id;
}

std::vector<MaxTree> build_trees(const QuantizedImage& img, int threads) {
    std::vector<MaxTree> trees(static_cast<std::size_t>(img.height()));
    parallel_for(0, img.height(), threads,
                 [&](int y) { trees[static_cast<std::size_t>(y)] = build_scanline_tree(img.row(y), y); });
    return trees;
}

std::vector<int> coarseness_levels(const MaxTree& tree) {
    std::vector<int> out;
    out.reserve(tree.size());
    for (const auto& node : tree.nodes()) {
        out.push_back(node.coarseness);
    }
    return out;
}

std::vector<std::pair<NodeId, NodeId>> matched_ancestors(const MaxTree& left, NodeId left_node,
                                                         const MaxTree& right, NodeId right_node,
                                                         int max_pairs) {
    const int count = std::min({left.node(left_node).depth, right.node(right_node).depth, max_pairs});
    std::vector<std::pair<NodeId, NodeId>> pairs;
    pairs.reserve(static_cast<std::size_t>(std::max(count, 0)));
    NodeId a = left_node;
    NodeId b = right_node;
    for (int i = 0; i < count; ++i) {
        a = left.node(a).parent;
        b = right.node(b).parent;
        pairs.emplace_back(a, b);
    }
    return pairs;
}

void write_tree(std::ostream& out, const MaxTree& tree) {
    for (std::size_t i = 0; i < tree.size(); ++i) {
        const auto& n = tree.node(static_cast<NodeId>(i));
        out << i << ' ' << n.parent << ' ' << n.level << ' ' << n.begin << ' ' << n.end << ' '
            << n.coarseness << '\n';
    }
}

}  // namespace mts
