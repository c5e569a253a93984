#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "mtstereo/cost_volume.hpp"
#include "mtstereo/maxtree.hpp"

namespace mts {

struct MatchParams {
    int quantization_levels = 16;           // q
    double alpha = 0.8;                     // weight of the intensity cost
    std::vector<int> coarseness = {1, 0};   // S, matched from coarse to fine
    double min_width = 0.0;                 // omega_alpha, pixels (exclusive)
    double max_width_fraction = 0.5;        // omega_beta, of the image width (exclusive)
    int neighborhood_rows = 10;             // omega_gamma
    double min_confidence = 12.0;           // omega_Pi, percent
    double search_slack = 0.0;              // descendant disparity range slack, x parent width

    void validate() const;
};

struct NodeMatch {
    int row = 0;
    NodeId left_node = kNoNode;
    NodeId right_node = kNoNode;  // kNoNode for disparities assigned by extrapolation
    int left_begin = 0;
    int left_end = 0;
    float d_left = 0.0f;
    float d_right = 0.0f;
    float cost = 0.0f;
    int coarseness = 0;

    friend bool operator==(const NodeMatch&, const NodeMatch&) = default;
};

struct MatchResult {
    std::vector<NodeMatch> matches;  // sorted by (row, left_node)
    int finest_coarseness = 0;

    std::vector<NodeMatch> finest() const;
};

/// Mean relative width difference |wa - wb| / max(wa, wb) over matched_ancestors;
/// 0 when either node is a root.
double context_cost(const MaxTree& left, NodeId left_node, const MaxTree& right, NodeId right_node);

/// Mean cost-volume value along a left interval [begin, end] of `row`, with the
/// disparity linearly interpolated from d_left at `begin` to d_right at `end` and
/// rounded to the nearest level. Invalid samples are skipped; returns
/// CostVolume::kInvalid when no sample is valid.
double intensity_cost(const CostVolume& cv, int row, int begin, int end, double d_left,
                      double d_right);
double intensity_cost(const CostVolume& cv, const MaxTree& left, NodeId left_node,
                      const MaxTree& right, NodeId right_node);

/// alpha * normalized_intensity + (1 - alpha) * context.
double pair_cost(double context, double normalized_intensity, double alpha);

/// Mean of the pair costs of a neighborhood (which includes the pair itself).
double aggregate_cost(std::span<const double> neighborhood_costs);

/// True iff the best candidate beats the runner-up by more than `min_confidence`
/// percent of the runner-up's cost. A lone candidate always passes.
bool peak_ratio_ok(double best_cost, std::optional<double> second_cost, double min_confidence);

/// Innermost node per (row, column) among the nodes accepted by a predicate;
/// kNoNode where no such node covers the column.
class ColumnIndex {
public:
    using Predicate = std::function<bool(const MaxTree&, NodeId)>;

    ColumnIndex(std::span<const MaxTree> trees, const Predicate& eligible, int threads = 1);

    NodeId at(int row, int x) const {
        return index_[static_cast<std::size_t>(row) * width_ + x];
    }
    int rows() const { return rows_; }

private:
    int width_ = 0;
    int rows_ = 0;
    std::vector<NodeId> index_;
};

struct NodePair {
    int row;
    NodeId left;
    NodeId right;

    friend bool operator==(const NodePair&, const NodePair&) = default;
};

/// Vertical neighbourhood of `pair`: walking up (then down) one row at a time,
/// the next pair consists of the indexed nodes covering the centres of the
/// current left and right nodes. A walk stops after `max_rows` steps, when a
/// side has no node, or when `accept` rejects the pair. The result starts with
/// `pair`, followed by the upward then the downward pairs in walking order.
std::vector<NodePair> neighborhood(std::span<const MaxTree> left_trees,
                                   std::span<const MaxTree> right_trees,
                                   const ColumnIndex& left_index, const ColumnIndex& right_index,
                                   NodePair pair, int max_rows,
                                   const std::function<bool(const NodePair&)>& accept);

/// One side's view of a candidate pair.
struct Candidate {
    NodeId other;
    double cost;
    float d_left;
};

/// Candidates ordered best first: lower cost, then smaller |d_left|, then lower id.
bool candidate_before(const Candidate& a, const Candidate& b);

/// Left-right consistency: the best left partner of the chosen right node,
/// among `right_candidates`, is `left_node`.
bool lr_consistent(NodeId left_node, std::span<const Candidate> right_candidates);

/// Whether `node` of `tree` is matched at coarseness level `coarseness`.
bool eligible_node(const MaxTree& tree, NodeId node, int coarseness, const MatchParams& params);

/// Hierarchical node matching over all scan-lines. Returns the matches accepted
/// at the finest level of params.coarseness together with their accepted
/// ancestors at the coarser levels.
MatchResult coarse_to_fine(std::span<const MaxTree> left_trees, std::span<const MaxTree> right_trees,
                           const CostVolume& cv, const MatchParams& params, int threads = 1);

/// Text dump, one match per line: `row lnode rnode dleft dright cost`.
void write_matches(std::ostream& out, std::span<const NodeMatch> matches);

}  // namespace mts
