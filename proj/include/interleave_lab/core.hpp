#pragma once

// Domain types shared by the comparison, click-model, data and harness code.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ilab {

enum class ErrorCode {
    DuplicateItem,
    EmptyRanking,
    GradeOutOfRange,
    RankingTooShort,
    OverlappingItems,
    LengthMismatch,
    NoImpressions,
    DomainError,
    ZeroVariance,
    Undefined,
    TheoremViolation,
    MalformedLine,
    InconsistentFeatures,
    UnknownFeature,
    TooFewDocs,
    TooFewFeatures,
    CutoffTooLarge,
    UndecidableTruth,
    ConfigError,
    NoValidPairs,
    IoError,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library. `line()` is set for parse errors.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::optional<std::size_t> line = std::nullopt);

    ErrorCode code() const noexcept { return code_; }
    std::optional<std::size_t> line() const noexcept { return line_; }

private:
    ErrorCode code_;
    std::optional<std::size_t> line_;
};

inline constexpr int kDefaultMaxGrade = 2;

// Graded relevance label: 0 irrelevant, 1 relevant, 2 highly relevant.
struct RelevanceGrade {
    int value = 0;

    constexpr auto operator<=>(const RelevanceGrade&) const = default;
};

using DocId = std::string;

struct RankedItem {
    DocId doc_id;
    RelevanceGrade grade;

    bool operator==(const RankedItem&) const = default;
};

struct Ranking {
    std::string query_id;
    std::vector<RankedItem> items;

    std::size_t size() const noexcept { return items.size(); }
    std::vector<RelevanceGrade> grades() const;

    bool operator==(const Ranking&) const = default;
};

// Checks distinct doc ids, non-emptiness and the grade range. Returns the
// ranking unchanged on success.
const Ranking& validate_ranking(const Ranking& ranking, int max_grade = kDefaultMaxGrade);

// 1-based clicked positions within a displayed ranking of `display_length()`
// items. Positions are kept sorted and unique.
class ClickVector {
public:
    ClickVector() = default;
    explicit ClickVector(std::size_t display_length);
    ClickVector(std::size_t display_length, std::vector<std::size_t> positions);

    std::size_t display_length() const noexcept { return display_length_; }
    const std::vector<std::size_t>& positions() const noexcept { return positions_; }
    std::size_t count() const noexcept { return positions_.size(); }
    bool empty() const noexcept { return positions_.empty(); }
    bool contains(std::size_t position) const;

    // Appends a click below every existing one. Used by top-down simulators.
    void push_back(std::size_t position);
    void reset(std::size_t display_length);

    bool operator==(const ClickVector&) const = default;

private:
    std::size_t display_length_ = 0;
    std::vector<std::size_t> positions_;
};

enum class Team : std::uint8_t { A, B };

enum class Preference { PreferA, PreferB, Tie };

std::string_view to_string(Team team);
std::string_view to_string(Preference preference);

}  // namespace ilab
