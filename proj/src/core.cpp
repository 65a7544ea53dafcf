#include "interleave_lab/core.hpp"

#include <algorithm>
#include <unordered_set>

namespace ilab {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::DuplicateItem: return "DuplicateItem";
        case ErrorCode::EmptyRanking: return "EmptyRanking";
        case ErrorCode::GradeOutOfRange: return "GradeOutOfRange";
        case ErrorCode::RankingTooShort: return "RankingTooShort";
        case ErrorCode::OverlappingItems: return "OverlappingItems";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::NoImpressions: return "NoImpressions";
        case ErrorCode::DomainError: return "DomainError";
        case ErrorCode::ZeroVariance: return "ZeroVariance";
        case ErrorCode::Undefined: return "Undefined";
        case ErrorCode::TheoremViolation: return "TheoremViolation";
        case ErrorCode::MalformedLine: return "MalformedLine";
        case ErrorCode::InconsistentFeatures: return "InconsistentFeatures";
        case ErrorCode::UnknownFeature: return "UnknownFeature";
        case ErrorCode::TooFewDocs: return "TooFewDocs";
        case ErrorCode::TooFewFeatures: return "TooFewFeatures";
        case ErrorCode::CutoffTooLarge: return "CutoffTooLarge";
        case ErrorCode::UndecidableTruth: return "UndecidableTruth";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::NoValidPairs: return "NoValidPairs";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message, std::optional<std::size_t> line)
    : std::runtime_error(message), code_(code), line_(line) {}

std::vector<RelevanceGrade> Ranking::grades() const {
    std::vector<RelevanceGrade> out;
    out.reserve(items.size());
    for (const auto& item : items) out.push_back(item.grade);
    return out;
}

const Ranking& validate_ranking(const Ranking& ranking, int max_grade) {
    if (ranking.items.empty()) throw Error(ErrorCode::EmptyRanking, "ranking for query '" + ranking.query_id + "' is empty");
    std::unordered_set<std::string_view> seen;
    for (std::size_t i = 0; i < ranking.items.size(); ++i) {
        const auto& item = ranking.items[i];
        if (item.grade.value < 0 || item.grade.value > max_grade) {
            throw Error(ErrorCode::GradeOutOfRange,
                        "grade " + std::to_string(item.grade.value) + " at position " + std::to_string(i + 1) +
                            " outside [0, " + std::to_string(max_grade) + "]");
        }
        if (!seen.insert(item.doc_id).second) {
            throw Error(ErrorCode::DuplicateItem, "duplicate doc_id '" + item.doc_id + "'");
        }
    }
    return ranking;
}

ClickVector::ClickVector(std::size_t display_length) : display_length_(display_length) {}

ClickVector::ClickVector(std::size_t display_length, std::vector<std::size_t> positions)
    : display_length_(display_length), positions_(std::move(positions)) {
    std::sort(positions_.begin(), positions_.end());
    positions_.erase(std::unique(positions_.begin(), positions_.end()), positions_.end());
    if (!positions_.empty() && (positions_.front() < 1 || positions_.back() > display_length_)) {
        throw Error(ErrorCode::DomainError, "click position outside [1, " + std::to_string(display_length_) + "]");
    }
}

bool ClickVector::contains(std::size_t position) const {
    return std::binary_search(positions_.begin(), positions_.end(), position);
}

void ClickVector::push_back(std::size_t position) {
    if (position < 1 || position > display_length_ || (!positions_.empty() && position <= positions_.back())) {
        throw Error(ErrorCode::DomainError, "click position " + std::to_string(position) + " out of order or range");
    }
    positions_.push_back(position);
}

void ClickVector::reset(std::size_t display_length) {
    display_length_ = display_length;
    positions_.clear();
}

std::string_view to_string(Team team) { return team == Team::A ? "A" : "B"; }

std::string_view to_string(Preference preference) {
    switch (preference) {
        case Preference::PreferA: return "PreferA";
        case Preference::PreferB: return "PreferB";
        case Preference::Tie: return "Tie";
    }
    return "Tie";
}

}  // namespace ilab
