#pragma once

// LETOR-format datasets, feature-sorted rankings and nDCG.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "interleave_lab/core.hpp"

namespace ilab {

struct Document {
    DocId doc_id;
    RelevanceGrade grade;
    std::map<int, double> features;
};

struct QueryRecord {
    std::string query_id;
    std::vector<Document> docs;

    std::vector<RelevanceGrade> grades() const;
};

struct RankerPair {
    int feature_a = 0;
    int feature_b = 0;
    std::size_t cutoff = 5;

    bool operator==(const RankerPair&) const = default;
};

inline constexpr std::size_t kDefaultCutoff = 5;

struct LetorOptions {
    int max_grade = kDefaultMaxGrade;
};

// Lines look like "<grade> qid:<q> <i>:<v> ... [#comment]". Blank lines and
// lines starting with '#' are skipped. Queries keep the order of their first
// appearance; documents keep file order.
std::vector<QueryRecord> parse_letor(std::istream& in, const LetorOptions& opts = {});

// Reads a plain or gzip-compressed file. Errors carry the line number; the
// message is prefixed with the path.
std::vector<QueryRecord> load_letor_file(const std::string& path, const LetorOptions& opts = {});

void write_letor(std::ostream& out, std::span<const QueryRecord> queries);

// Feature indices present in every document of the dataset, ascending.
std::vector<int> feature_indices(std::span<const QueryRecord> queries);

// Top-`cutoff` documents by descending feature value; ties go to the
// lexicographically smaller doc id.
Ranking rank_by_feature(const QueryRecord& q, int feature, std::size_t cutoff);

std::vector<RankerPair> enumerate_pairs(std::span<const int> features, std::size_t cutoff);

double dcg(std::span<const RelevanceGrade> grades, std::size_t cutoff);
// DCG of the best arrangement of `available` at the cutoff.
double ideal_dcg(std::span<const RelevanceGrade> available, std::size_t cutoff);
// DCG / IDCG, or 0 when IDCG is 0.
double ndcg(std::span<const RelevanceGrade> ranking_grades, std::span<const RelevanceGrade> ideal_grades,
            std::size_t cutoff);
double ndcg(const Ranking& r, std::span<const RelevanceGrade> ideal_grades, std::size_t cutoff);

// Synthetic LETOR-like data. Feature k (1-based) is grade + N(0, noise[k-1]),
// so rankers built from low-noise features are better.
struct SyntheticSpec {
    std::size_t queries = 60;
    std::size_t docs_per_query = 30;
    std::vector<double> grade_weights{0.6, 0.25, 0.15};
    std::vector<double> feature_noise{0.3, 0.8, 1.6, 3.2};
    std::uint64_t seed = 7;
};

std::vector<QueryRecord> generate_synthetic(const SyntheticSpec& spec);

}  // namespace ilab
