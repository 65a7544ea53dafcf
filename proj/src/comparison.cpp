#include "interleave_lab/comparison.hpp"

#include <unordered_set>

namespace ilab {

std::vector<Team> InterleavedRanking::teams() const {
    std::vector<Team> out;
    out.reserve(positions.size());
    for (const auto& p : positions) out.push_back(p.team);
    return out;
}

std::vector<RelevanceGrade> InterleavedRanking::grades() const {
    std::vector<RelevanceGrade> out;
    out.reserve(positions.size());
    for (const auto& p : positions) out.push_back(p.grade);
    return out;
}

EvaluationAccumulator::EvaluationAccumulator(std::size_t n, double sum_a, double sum_b)
    : n_(n), sum_a_(sum_a), sum_b_(sum_b) {
    if (sum_a < 0 || sum_b < 0 || sum_a > static_cast<double>(n) || sum_b > static_cast<double>(n)) {
        throw Error(ErrorCode::DomainError, "accumulator sums must lie in [0, n]");
    }
}

void EvaluationAccumulator::add(const ImpressionScore& score) noexcept {
    ++n_;
    sum_a_ += score.score_a;
    sum_b_ += score.score_b;
}

void EvaluationAccumulator::merge(const EvaluationAccumulator& other) noexcept {
    n_ += other.n_;
    sum_a_ += other.sum_a_;
    sum_b_ += other.sum_b_;
}

EvaluationAccumulator accumulate(EvaluationAccumulator acc, const ImpressionScore& score) {
    acc.add(score);
    return acc;
}

void check_interleavable(const Ranking& a, const Ranking& b, std::size_t display_length) {
    if (a.size() < display_length || b.size() < display_length) {
        throw Error(ErrorCode::RankingTooShort, "input rankings must hold at least " + std::to_string(display_length) +
                                                    " items (got " + std::to_string(a.size()) + " and " +
                                                    std::to_string(b.size()) + ")");
    }
    std::unordered_set<std::string_view> in_a;
    for (const auto& item : a.items) in_a.insert(item.doc_id);
    for (const auto& item : b.items) {
        if (in_a.contains(item.doc_id)) {
            throw Error(ErrorCode::OverlappingItems, "doc_id '" + item.doc_id + "' appears in both rankings");
        }
    }
}

InterleavedRanking interleave_with_teams(const Ranking& a, const Ranking& b, std::span<const Team> teams) {
    check_interleavable(a, b, teams.size());
    InterleavedRanking out;
    out.positions.reserve(teams.size());
    for (std::size_t l = 0; l < teams.size(); ++l) {
        const RankedItem& src = teams[l] == Team::A ? a.items[l] : b.items[l];
        out.positions.push_back({src.doc_id, src.grade, teams[l]});
    }
    return out;
}

ImpressionScore score_impression(std::span<const Team> teams, const ClickVector& clicks) {
    if (clicks.display_length() != teams.size()) {
        throw Error(ErrorCode::LengthMismatch, "click vector covers " + std::to_string(clicks.display_length()) +
                                                   " positions but the ranking has " + std::to_string(teams.size()));
    }
    std::size_t hits_a = 0;
    std::size_t hits_b = 0;
    for (std::size_t pos : clicks.positions()) {
        if (teams[pos - 1] == Team::A) {
            ++hits_a;
        } else {
            ++hits_b;
        }
    }
    const auto len = static_cast<double>(teams.size());
    return {static_cast<double>(hits_a) / len, static_cast<double>(hits_b) / len};
}

ImpressionScore score_impression(const InterleavedRanking& ranking, const ClickVector& clicks) {
    const auto teams = ranking.teams();
    return score_impression(std::span<const Team>(teams), clicks);
}

ImpressionScore score_ab_impression(Team arm, const ClickVector& clicks) {
    if (clicks.display_length() == 0) return {};
    const double share = static_cast<double>(clicks.count()) / static_cast<double>(clicks.display_length());
    return arm == Team::A ? ImpressionScore{share, 0.0} : ImpressionScore{0.0, share};
}

Preference infer_preference(const EvaluationAccumulator& acc) {
    if (acc.n() == 0) throw Error(ErrorCode::NoImpressions, "cannot infer a preference from zero impressions");
    if (acc.mean_a() > acc.mean_b()) return Preference::PreferA;
    if (acc.mean_a() < acc.mean_b()) return Preference::PreferB;
    return Preference::Tie;
}

}  // namespace ilab
