#include "mtstereo/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "mtstereo/parallel.hpp"

namespace mts {

void MatchParams::validate() const {
    if (quantization_levels < 2 || quantization_levels > 256) {
        throw std::invalid_argument("q must be in [2, 256]");
    }
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw std::invalid_argument("alpha must be in [0, 1]");
    }
    if (coarseness.empty()) {
        throw std::invalid_argument("at least one coarseness level is required");
    }
    for (std::size_t i = 0; i < coarseness.size(); ++i) {
        if (coarseness[i] < 0) {
            throw std::invalid_argument("coarseness levels must be non-negative");
        }
        if (i > 0 && coarseness[i] >= coarseness[i - 1]) {
            throw std::invalid_argument("coarseness levels must be strictly decreasing");
        }
    }
    if (!(min_width >= 0.0)) {
        throw std::invalid_argument("omega_alpha must be non-negative");
    }
    if (!(max_width_fraction > 0.0 && max_width_fraction <= 1.0)) {
        throw std::invalid_argument("omega_beta must be in (0, 1]");
    }
    if (neighborhood_rows < 0) {
        throw std::invalid_argument("omega_gamma must be non-negative");
    }
    if (!(min_confidence >= 0.0)) {
        throw std::invalid_argument("omega_pi must be non-negative");
    }
    if (!(search_slack >= 0.0)) {
        throw std::invalid_argument("search slack must be non-negative");
    }
}

std::vector<NodeMatch> MatchResult::finest() const {
    std::vector<NodeMatch> out;
    for (const auto& m : matches) {
        if (m.coarseness == finest_coarseness) {
            out.push_back(m);
        }
    }
    return out;
}

double context_cost(const MaxTree& left, NodeId left_node, const MaxTree& right, NodeId right_node) {
    const auto pairs = matched_ancestors(left, left_node, right, right_node);
    if (pairs.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (const auto& [a, b] : pairs) {
        const double wa = left.node(a).width();
        const double wb = right.node(b).width();
        sum += std::abs(wa - wb) / std::max(wa, wb);
    }
    return sum / static_cast<double>(pairs.size());
}

double intensity_cost(const CostVolume& cv, int row, int begin, int end, double d_left,
                      double d_right) {
    double sum = 0.0;
    int count = 0;
    const double span = end - begin;
    for (int x = begin; x <= end; ++x) {
        const double t = span > 0 ? (x - begin) / span : 0.0;
        const long d = std::lround(d_left + (d_right - d_left) * t);
        if (d < 0 || d >= cv.max_disparity()) {
            continue;
        }
        const float c = cv.at(x, row, static_cast<int>(d));
        if (!CostVolume::is_valid(c)) {
            continue;
        }
        sum += c;
        ++count;
    }
    return count > 0 ? sum / count : static_cast<double>(CostVolume::kInvalid);
}

double intensity_cost(const CostVolume& cv, const MaxTree& left, NodeId left_node,
                      const MaxTree& right, NodeId right_node) {
    const auto& l = left.node(left_node);
    const auto& r = right.node(right_node);
    return intensity_cost(cv, left.row(), l.begin, l.end, l.begin - r.begin, l.end - r.end);
}

double pair_cost(double context, double normalized_intensity, double alpha) {
    return alpha * normalized_intensity + (1.0 - alpha) * context;
}

double aggregate_cost(std::span<const double> neighborhood_costs) {
    if (neighborhood_costs.empty()) {
        throw std::invalid_argument("a neighborhood contains at least its own pair");
    }
    return std::accumulate(neighborhood_costs.begin(), neighborhood_costs.end(), 0.0) /
           static_cast<double>(neighborhood_costs.size());
}

bool peak_ratio_ok(double best_cost, std::optional<double> second_cost, double min_confidence) {
    if (!second_cost) {
        return true;
    }
    constexpr double kEps = 1e-12;
    const double relative = (*second_cost - best_cost) / std::max(*second_cost, kEps);
    return relative * 100.0 > min_confidence;
}

ColumnIndex::ColumnIndex(std::span<const MaxTree> trees, const Predicate& eligible, int threads)
    : width_(trees.empty() ? 0 : trees.front().line_width()), rows_(static_cast<int>(trees.size())) {
    index_.assign(static_cast<std::size_t>(width_) * rows_, kNoNode);
    parallel_for(0, rows_, threads, [&](int y) {
        const MaxTree& tree = trees[static_cast<std::size_t>(y)];
        NodeId* row = index_.data() + static_cast<std::size_t>(y) * width_;
        // Preorder visits ancestors first, so the innermost node writes last.
        for (NodeId id = 0; id < static_cast<NodeId>(tree.size()); ++id) {
            if (!eligible(tree, id)) {
                continue;
            }
            const auto& n = tree.node(id);
            std::fill(row + n.begin, row + n.end + 1, id);
        }
    });
}

std::vector<NodePair> neighborhood(std::span<const MaxTree> left_trees,
                                   std::span<const MaxTree> right_trees,
                                   const ColumnIndex& left_index, const ColumnIndex& right_index,
                                   NodePair pair, int max_rows,
                                   const std::function<bool(const NodePair&)>& accept) {
    std::vector<NodePair> out{pair};
    for (int direction : {-1, 1}) {
        NodePair current = pair;
        for (int step = 0; step < max_rows; ++step) {
            const int y = current.row + direction;
            if (y < 0 || y >= left_index.rows()) {
                break;
            }
            const auto& cl = left_trees[static_cast<std::size_t>(current.row)].node(current.left);
            const auto& cr = right_trees[static_cast<std::size_t>(current.row)].node(current.right);
            const NodeId l = left_index.at(y, cl.center());
            const NodeId r = right_index.at(y, cr.center());
            if (l == kNoNode || r == kNoNode) {
                break;
            }
            const NodePair next{y, l, r};
            if (accept && !accept(next)) {
                break;
            }
            out.push_back(next);
            current = next;
        }
    }
    return out;
}

bool candidate_before(const Candidate& a, const Candidate& b) {
    if (a.cost != b.cost) {
        return a.cost < b.cost;
    }
    if (std::abs(a.d_left) != std::abs(b.d_left)) {
        return std::abs(a.d_left) < std::abs(b.d_left);
    }
    return a.other < b.other;
}

bool lr_consistent(NodeId left_node, std::span<const Candidate> right_candidates) {
    if (right_candidates.empty()) {
        return false;
    }
    const auto best = std::min_element(right_candidates.begin(), right_candidates.end(),
                                       candidate_before);
    return best->other == left_node;
}

bool eligible_node(const MaxTree& tree, NodeId node, int coarseness, const MatchParams& params) {
    const auto& n = tree.node(node);
    const double width = n.width();
    return n.coarseness == coarseness && width > params.min_width &&
           width < params.max_width_fraction * tree.line_width();
}

namespace {

struct PairEntry {
    NodeId left;
    NodeId right;
    float d_left;
    float d_right;
    double cost = 0.0;        // own pair cost
    double aggregated = 0.0;  // mean over the neighbourhood
    int parent = -1;          // accepted match of the previous level it descends from
};

struct Accepted {
    NodeMatch match;
    int parent = -1;
};

bool pair_less(const PairEntry& a, const PairEntry& b) {
    return a.left != b.left ? a.left < b.left : a.right < b.right;
}

class LevelMatcher {
public:
    LevelMatcher(std::span<const MaxTree> left, std::span<const MaxTree> right, const CostVolume& cv,
                 const MatchParams& params, int coarseness, int threads)
        : left_(left),
          right_(right),
          cv_(cv),
          params_(params),
          coarseness_(coarseness),
          threads_(threads),
          left_index_(left, [&](const MaxTree& t, NodeId n) { return eligible(t, n); }, threads),
          right_index_(right, [&](const MaxTree& t, NodeId n) { return eligible(t, n); }, threads) {
        const float max_cost = cv.max_valid_cost();
        inv_normalizer_ = max_cost > 0.0f ? 1.0 / max_cost : 0.0;
    }

    std::vector<std::vector<Accepted>> run(const std::vector<std::vector<Accepted>>* previous) {
        const int rows = static_cast<int>(left_.size());
        tables_.assign(static_cast<std::size_t>(rows), {});
        parallel_for(0, rows, threads_, [&](int y) { collect_pairs(y, previous); });
        parallel_for(0, rows, threads_, [&](int y) { aggregate_row(y); });
        std::vector<std::vector<Accepted>> accepted(static_cast<std::size_t>(rows));
        parallel_for(0, rows, threads_, [&](int y) { accepted[static_cast<std::size_t>(y)] = accept_row(y); });
        return accepted;
    }

private:
    bool eligible(const MaxTree& tree, NodeId node) const {
        return eligible_node(tree, node, coarseness_, params_);
    }

    bool disparity_ok(int d) const { return d >= 0 && d < cv_.max_disparity(); }

    // Own cost of a pair, or nullopt when the disparities or samples are unusable.
    std::optional<double> evaluate(int y, NodeId l, NodeId r) const {
        const MaxTree& lt = left_[static_cast<std::size_t>(y)];
        const MaxTree& rt = right_[static_cast<std::size_t>(y)];
        const auto& ln = lt.node(l);
        const auto& rn = rt.node(r);
        if (!disparity_ok(ln.begin - rn.begin) || !disparity_ok(ln.end - rn.end)) {
            return std::nullopt;
        }
        const double intensity = intensity_cost(cv_, y, ln.begin, ln.end, ln.begin - rn.begin,
                                                ln.end - rn.end);
        if (intensity >= CostVolume::kInvalid) {
            return std::nullopt;
        }
        return pair_cost(context_cost(lt, l, rt, r), intensity * inv_normalizer_, params_.alpha);
    }

    void add_pair(std::vector<PairEntry>& table, int y, NodeId l, NodeId r, int parent) const {
        const auto& ln = left_[static_cast<std::size_t>(y)].node(l);
        const auto& rn = right_[static_cast<std::size_t>(y)].node(r);
        PairEntry e{l, r, static_cast<float>(ln.begin - rn.begin),
                    static_cast<float>(ln.end - rn.end)};
        e.parent = parent;
        table.push_back(e);
    }

    void collect_pairs(int y, const std::vector<std::vector<Accepted>>* previous) {
        const MaxTree& lt = left_[static_cast<std::size_t>(y)];
        const MaxTree& rt = right_[static_cast<std::size_t>(y)];
        std::vector<PairEntry> table;
        const int dmax = cv_.max_disparity();

        if (previous == nullptr) {
            std::vector<NodeId> rights;
            for (NodeId id = 0; id < static_cast<NodeId>(rt.size()); ++id) {
                if (eligible(rt, id)) {
                    rights.push_back(id);
                }
            }
            for (NodeId l = 0; l < static_cast<NodeId>(lt.size()); ++l) {
                if (!eligible(lt, l)) {
                    continue;
                }
                const auto& ln = lt.node(l);
                // Preorder ids are sorted by begin.
                auto it = std::lower_bound(rights.begin(), rights.end(), ln.begin - dmax + 1,
                                           [&](NodeId r, int b) { return rt.node(r).begin < b; });
                for (; it != rights.end() && rt.node(*it).begin <= ln.begin; ++it) {
                    if (disparity_ok(ln.end - rt.node(*it).end)) {
                        add_pair(table, y, l, *it, -1);
                    }
                }
            }
        } else {
            const auto& parents = (*previous)[static_cast<std::size_t>(y)];
            for (std::size_t p = 0; p < parents.size(); ++p) {
                const NodeMatch& pm = parents[p].match;
                const double slack =
                    params_.search_slack * (pm.left_end - pm.left_begin + 1);
                const double lo = std::min(pm.d_left, pm.d_right) - slack;
                const double hi = std::max(pm.d_left, pm.d_right) + slack;
                const auto in_range = [&](int d) { return disparity_ok(d) && d >= lo && d <= hi; };

                std::vector<NodeId> lefts, rights;
                for (NodeId id = pm.left_node + 1; id <= lt.node(pm.left_node).last_descendant; ++id) {
                    if (eligible(lt, id)) {
                        lefts.push_back(id);
                    }
                }
                for (NodeId id = pm.right_node + 1; id <= rt.node(pm.right_node).last_descendant; ++id) {
                    if (eligible(rt, id)) {
                        rights.push_back(id);
                    }
                }
                for (NodeId l : lefts) {
                    for (NodeId r : rights) {
                        if (in_range(lt.node(l).begin - rt.node(r).begin) &&
                            in_range(lt.node(l).end - rt.node(r).end)) {
                            add_pair(table, y, l, r, static_cast<int>(p));
                        }
                    }
                }
            }
            // Nested parents can propose the same pair twice; keep the first.
            std::stable_sort(table.begin(), table.end(), pair_less);
            table.erase(std::unique(table.begin(), table.end(),
                                    [](const PairEntry& a, const PairEntry& b) {
                                        return a.left == b.left && a.right == b.right;
                                    }),
                        table.end());
        }

        std::sort(table.begin(), table.end(), pair_less);
        std::vector<PairEntry> kept;
        kept.reserve(table.size());
        for (auto& e : table) {
            if (auto c = evaluate(y, e.left, e.right)) {
                e.cost = *c;
                kept.push_back(e);
            }
        }
        tables_[static_cast<std::size_t>(y)] = std::move(kept);
    }

    std::optional<double> lookup(const NodePair& p) const {
        const auto& table = tables_[static_cast<std::size_t>(p.row)];
        const PairEntry key{p.left, p.right, 0.0f, 0.0f};
        auto it = std::lower_bound(table.begin(), table.end(), key, pair_less);
        if (it != table.end() && it->left == p.left && it->right == p.right) {
            return it->cost;
        }
        return evaluate(p.row, p.left, p.right);
    }

    void aggregate_row(int y) {
        std::vector<double> costs;
        for (auto& e : tables_[static_cast<std::size_t>(y)]) {
            costs.assign(1, e.cost);
            neighborhood(left_, right_, left_index_, right_index_, NodePair{y, e.left, e.right},
                         params_.neighborhood_rows, [&](const NodePair& p) {
                             const auto c = lookup(p);
                             if (c) {
                                 costs.push_back(*c);
                             }
                             return c.has_value();
                         });
            e.aggregated = aggregate_cost(costs);
        }
    }

    std::vector<Accepted> accept_row(int y) const {
        const auto& table = tables_[static_cast<std::size_t>(y)];
        const MaxTree& lt = left_[static_cast<std::size_t>(y)];
        std::vector<Accepted> out;
        if (table.empty()) {
            return out;
        }

        // Best left partner of every right node.
        std::vector<std::optional<Candidate>> best_left(right_[static_cast<std::size_t>(y)].size());
        for (const auto& e : table) {
            const Candidate c{e.left, e.aggregated, e.d_left};
            auto& slot = best_left[static_cast<std::size_t>(e.right)];
            if (!slot || candidate_before(c, *slot)) {
                slot = c;
            }
        }

        std::vector<Candidate> candidates;
        for (std::size_t i = 0; i < table.size();) {
            std::size_t j = i;
            candidates.clear();
            while (j < table.size() && table[j].left == table[i].left) {
                candidates.push_back({table[j].right, table[j].aggregated, table[j].d_left});
                ++j;
            }
            std::sort(candidates.begin(), candidates.end(), candidate_before);
            const Candidate& best = candidates.front();
            const NodeId l = table[i].left;
            const auto back = best_left[static_cast<std::size_t>(best.other)];
            const bool mutual = back && back->other == l;
            const std::optional<double> second =
                candidates.size() > 1 ? std::optional<double>(candidates[1].cost) : std::nullopt;
            if (mutual && peak_ratio_ok(best.cost, second, params_.min_confidence)) {
                const auto& entry = *std::find_if(table.begin() + static_cast<std::ptrdiff_t>(i),
                                                  table.begin() + static_cast<std::ptrdiff_t>(j),
                                                  [&](const PairEntry& e) { return e.right == best.other; });
                NodeMatch m;
                m.row = y;
                m.left_node = l;
                m.right_node = best.other;
                m.left_begin = lt.node(l).begin;
                m.left_end = lt.node(l).end;
                m.d_left = entry.d_left;
                m.d_right = entry.d_right;
                m.cost = static_cast<float>(best.cost);
                m.coarseness = coarseness_;
                out.push_back({m, entry.parent});
            }
            i = j;
        }
        return out;
    }

    std::span<const MaxTree> left_;
    std::span<const MaxTree> right_;
    const CostVolume& cv_;
    const MatchParams& params_;
    int coarseness_;
    int threads_;
    ColumnIndex left_index_;
    ColumnIndex right_index_;
    double inv_normalizer_ = 0.0;
    std::vector<std::vector<PairEntry>> tables_;
};

}  // namespace

MatchResult coarse_to_fine(std::span<const MaxTree> left_trees, std::span<const MaxTree> right_trees,
                           const CostVolume& cv, const MatchParams& params, int threads) {
    params.validate();
    if (left_trees.size() != right_trees.size() ||
        static_cast<int>(left_trees.size()) != cv.height()) {
        throw std::invalid_argument("tree and cost volume dimensions disagree");
    }
    for (std::size_t y = 0; y < left_trees.size(); ++y) {
        if (left_trees[y].line_width() != cv.width() || right_trees[y].line_width() != cv.width()) {
            throw std::invalid_argument("tree and cost volume dimensions disagree");
        }
    }

    std::vector<std::vector<std::vector<Accepted>>> levels;
    for (int c : params.coarseness) {
        LevelMatcher matcher(left_trees, right_trees, cv, params, c, threads);
        levels.push_back(matcher.run(levels.empty() ? nullptr : &levels.back()));
    }

    // Keep the finest matches and the chain of coarser matches they descend from.
    const std::size_t rows = left_trees.size();
    std::vector<std::vector<std::vector<bool>>> keep(levels.size());
    for (std::size_t k = 0; k < levels.size(); ++k) {
        keep[k].resize(rows);
        for (std::size_t y = 0; y < rows; ++y) {
            keep[k][y].assign(levels[k][y].size(), k + 1 == levels.size());
        }
    }
    for (std::size_t k = levels.size(); k-- > 1;) {
        for (std::size_t y = 0; y < rows; ++y) {
            for (std::size_t i = 0; i < levels[k][y].size(); ++i) {
                const int parent = levels[k][y][i].parent;
                if (keep[k][y][i] && parent >= 0) {
                    keep[k - 1][y][static_cast<std::size_t>(parent)] = true;
                }
            }
        }
    }

    MatchResult result;
    result.finest_coarseness = params.coarseness.back();
    for (std::size_t y = 0; y < rows; ++y) {
        for (std::size_t k = 0; k < levels.size(); ++k) {
            for (std::size_t i = 0; i < levels[k][y].size(); ++i) {
                if (keep[k][y][i]) {
                    result.matches.push_back(levels[k][y][i].match);
                }
            }
        }
    }
    std::sort(result.matches.begin(), result.matches.end(), [](const NodeMatch& a, const NodeMatch& b) {
        return a.row != b.row ? a.row < b.row : a.left_node < b.left_node;
    });
    return result;
}

void write_matches(std::ostream& out, std::span<const NodeMatch> matches) {
    for (const auto& m : matches) {
        out << m.row << ' ' << m.left_node << ' ' << m.right_node << ' ' << m.d_left << ' '
            << m.d_right << ' ' << m.cost << '\n';
    }
}

}  // namespace mts
