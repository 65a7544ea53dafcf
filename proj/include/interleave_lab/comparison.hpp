#pragma once

// Interleaving by per-position coin flips, A/B arm assignment, per-impression
// click scoring and preference inference.

#include <span>
#include <vector>

#include "interleave_lab/core.hpp"
#include "interleave_lab/random.hpp"

namespace ilab {

struct InterleavedItem {
    DocId doc_id;
    RelevanceGrade grade;
    Team team;

    bool operator==(const InterleavedItem&) const = default;
};

struct InterleavedRanking {
    std::vector<InterleavedItem> positions;

    std::size_t length() const noexcept { return positions.size(); }
    std::vector<Team> teams() const;
    std::vector<RelevanceGrade> grades() const;
};

// Per-impression click share of each ranker; both are divided by the display
// length, so score_a + score_b == clicks / |I|.
struct ImpressionScore {
    double score_a = 0.0;
    double score_b = 0.0;
};

class EvaluationAccumulator {
public:
    EvaluationAccumulator() = default;
    EvaluationAccumulator(std::size_t n, double sum_a, double sum_b);

    std::size_t n() const noexcept { return n_; }
    double sum_a() const noexcept { return sum_a_; }
    double sum_b() const noexcept { return sum_b_; }
    double mean_a() const noexcept { return n_ == 0 ? 0.0 : sum_a_ / static_cast<double>(n_); }
    double mean_b() const noexcept { return n_ == 0 ? 0.0 : sum_b_ / static_cast<double>(n_); }

    void add(const ImpressionScore& score) noexcept;
    // Combines two disjoint runs.
    void merge(const EvaluationAccumulator& other) noexcept;

private:
    std::size_t n_ = 0;
    double sum_a_ = 0.0;
    double sum_b_ = 0.0;
};

EvaluationAccumulator accumulate(EvaluationAccumulator acc, const ImpressionScore& score);

// Throws RankingTooShort or OverlappingItems when the inputs cannot be
// merged positionally over `display_length` slots.
void check_interleavable(const Ranking& a, const Ranking& b, std::size_t display_length);

// Position l takes the l-th item of whichever ranking its team names.
InterleavedRanking interleave_with_teams(const Ranking& a, const Ranking& b, std::span<const Team> teams);

// One fair coin per position: heads -> Team::A.
template <BitSource G>
void draw_teams(G& gen, std::span<Team> out) {
    for (auto& team : out) team = coin(gen) ? Team::A : Team::B;
}

template <BitSource G>
InterleavedRanking interleave_ima(const Ranking& a, const Ranking& b, std::size_t display_length, G& gen) {
    check_interleavable(a, b, display_length);
    std::vector<Team> teams(display_length);
    draw_teams(gen, std::span<Team>(teams));
    return interleave_with_teams(a, b, teams);
}

template <BitSource G>
Team assign_ab_arm(G& gen) {
    return coin(gen) ? Team::A : Team::B;
}

ImpressionScore score_impression(std::span<const Team> teams, const ClickVector& clicks);
ImpressionScore score_impression(const InterleavedRanking& ranking, const ClickVector& clicks);

// The whole impression showed `arm`, so every click is credited to it.
ImpressionScore score_ab_impression(Team arm, const ClickVector& clicks);

Preference infer_preference(const EvaluationAccumulator& acc);

}  // namespace ilab
