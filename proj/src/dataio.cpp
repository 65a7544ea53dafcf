#include "interleave_lab/dataio.hpp"

#include <zlib.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include "interleave_lab/format.hpp"
#include "interleave_lab/random.hpp"

namespace ilab {

std::vector<RelevanceGrade> QueryRecord::grades() const {
    std::vector<RelevanceGrade> out;
    out.reserve(docs.size());
    for (const auto& d : docs) out.push_back(d.grade);
    return out;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        const std::size_t start = i;
        while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

// "docid = GX000-00-0000000 inc = 1" -> "GX000-00-0000000"
std::string doc_id_from_comment(std::string_view comment) {
    const auto pos = comment.find("docid");
    if (pos == std::string_view::npos) return {};
    auto rest = trim(comment.substr(pos + 5));
    if (rest.empty() || rest.front() != '=') return {};
    rest = trim(rest.substr(1));
    const auto end = rest.find_first_of(" \t");
    return std::string(rest.substr(0, end));
}

[[noreturn]] void malformed(std::size_t line_no, const std::string& why) {
    throw Error(ErrorCode::MalformedLine, "line " + std::to_string(line_no) + ": " + why, line_no);
}

bool same_keys(const std::map<int, double>& x, const std::map<int, double>& y) {
    return x.size() == y.size() &&
           std::equal(x.begin(), x.end(), y.begin(), [](const auto& l, const auto& r) { return l.first == r.first; });
}

}  // namespace

std::vector<QueryRecord> parse_letor(std::istream& in, const LetorOptions& opts) {
    std::vector<QueryRecord> queries;
    std::unordered_map<std::string, std::size_t> index_of;
    std::vector<std::unordered_set<std::string>> seen_ids;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;

        std::string_view comment;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            comment = line.substr(hash + 1);
            line = trim(line.substr(0, hash));
        }
        const auto tokens = split_ws(line);
        if (tokens.size() < 2) malformed(line_no, "expected '<grade> qid:<id> ...'");

        int grade = 0;
        if (!parse_number(tokens[0], grade)) malformed(line_no, "bad grade '" + std::string(tokens[0]) + "'");
        if (grade < 0 || grade > opts.max_grade) {
            throw Error(ErrorCode::GradeOutOfRange,
                        "line " + std::to_string(line_no) + ": grade " + std::to_string(grade) + " outside [0, " +
                            std::to_string(opts.max_grade) + "]",
                        line_no);
        }
        if (!tokens[1].starts_with("qid:") || tokens[1].size() == 4) malformed(line_no, "missing qid");
        const std::string qid(tokens[1].substr(4));

        Document doc;
        doc.grade = RelevanceGrade{grade};
        for (std::size_t t = 2; t < tokens.size(); ++t) {
            const auto colon = tokens[t].find(':');
            int key = 0;
            double value = 0.0;
            if (colon == std::string_view::npos || !parse_number(tokens[t].substr(0, colon), key) ||
                !parse_number(tokens[t].substr(colon + 1), value)) {
                malformed(line_no, "bad feature '" + std::string(tokens[t]) + "'");
            }
            if (!doc.features.emplace(key, value).second) {
                malformed(line_no, "feature " + std::to_string(key) + " repeated");
            }
        }
        doc.doc_id = doc_id_from_comment(comment);
        if (doc.doc_id.empty()) doc.doc_id = qid + ":" + std::to_string(line_no);

        auto [it, inserted] = index_of.emplace(qid, queries.size());
        if (inserted) {
            queries.push_back({qid, {}});
            seen_ids.emplace_back();
        }
        auto& q = queries[it->second];
        if (!q.docs.empty() && !same_keys(q.docs.front().features, doc.features)) {
            throw Error(ErrorCode::InconsistentFeatures,
                        "line " + std::to_string(line_no) + ": query " + qid + " mixes feature sets", line_no);
        }
        if (!seen_ids[it->second].insert(doc.doc_id).second) {
            throw Error(ErrorCode::DuplicateItem,
                        "line " + std::to_string(line_no) + ": duplicate doc_id '" + doc.doc_id + "' in query " + qid,
                        line_no);
        }
        q.docs.push_back(std::move(doc));
    }
    return queries;
}

std::vector<QueryRecord> load_letor_file(const std::string& path, const LetorOptions& opts) {
    // gzread passes uncompressed files through unchanged.
    gzFile file = gzopen(path.c_str(), "rb");
    if (file == nullptr) throw Error(ErrorCode::IoError, path + ": cannot open dataset file");
    std::string contents;
    char buf[1 << 16];
    int got = 0;
    while ((got = gzread(file, buf, sizeof buf)) > 0) contents.append(buf, static_cast<std::size_t>(got));
    const bool failed = got < 0;
    gzclose(file);
    if (failed) throw Error(ErrorCode::IoError, path + ": read error");

    std::istringstream in(contents);
    try {
        return parse_letor(in, opts);
    } catch (const Error& e) {
        throw Error(e.code(), path + ":" + e.what(), e.line());
    }
}

void write_letor(std::ostream& out, std::span<const QueryRecord> queries) {
    for (const auto& q : queries) {
        for (const auto& d : q.docs) {
            out << d.grade.value << " qid:" << q.query_id;
            for (const auto& [k, v] : d.features) out << ' ' << k << ':' << fmt_double(v);
            out << " #docid = " << d.doc_id << '\n';
        }
    }
}

std::vector<int> feature_indices(std::span<const QueryRecord> queries) {
    std::vector<int> out;
    bool first = true;
    for (const auto& q : queries) {
        for (const auto& d : q.docs) {
            std::vector<int> keys;
            for (const auto& kv : d.features) keys.push_back(kv.first);
            if (first) {
                out = std::move(keys);
                first = false;
            } else {
                std::vector<int> both;
                std::set_intersection(out.begin(), out.end(), keys.begin(), keys.end(), std::back_inserter(both));
                out = std::move(both);
            }
        }
    }
    return out;
}

Ranking rank_by_feature(const QueryRecord& q, int feature, std::size_t cutoff) {
    if (q.docs.size() < cutoff || q.docs.empty()) {
        throw Error(ErrorCode::TooFewDocs, "query " + q.query_id + " has " + std::to_string(q.docs.size()) +
                                               " documents, fewer than cutoff " + std::to_string(cutoff));
    }
    std::vector<std::pair<double, const Document*>> keyed;
    keyed.reserve(q.docs.size());
    for (const auto& d : q.docs) {
        const auto it = d.features.find(feature);
        if (it == d.features.end()) {
            throw Error(ErrorCode::UnknownFeature, "feature " + std::to_string(feature) + " missing in query " + q.query_id);
        }
        keyed.emplace_back(it->second, &d);
    }
    std::partial_sort(keyed.begin(), keyed.begin() + static_cast<std::ptrdiff_t>(cutoff), keyed.end(),
                      [](const auto& x, const auto& y) {
                          if (x.first != y.first) return x.first > y.first;
                          return x.second->doc_id < y.second->doc_id;
                      });
    Ranking r{q.query_id, {}};
    r.items.reserve(cutoff);
    for (std::size_t i = 0; i < cutoff; ++i) r.items.push_back({keyed[i].second->doc_id, keyed[i].second->grade});
    return r;
}

std::vector<RankerPair> enumerate_pairs(std::span<const int> features, std::size_t cutoff) {
    std::vector<int> unique(features.begin(), features.end());
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
    if (unique.size() < 2) throw Error(ErrorCode::TooFewFeatures, "need at least two distinct features to form pairs");
    if (cutoff < 1) throw Error(ErrorCode::DomainError, "cutoff must be >= 1");
    std::vector<RankerPair> pairs;
    for (std::size_t i = 0; i < unique.size(); ++i) {
        for (std::size_t j = i + 1; j < unique.size(); ++j) pairs.push_back({unique[i], unique[j], cutoff});
    }
    return pairs;
}

double dcg(std::span<const RelevanceGrade> grades, std::size_t cutoff) {
    if (cutoff > grades.size()) {
        throw Error(ErrorCode::CutoffTooLarge, "cutoff " + std::to_string(cutoff) + " exceeds ranking length " +
                                                   std::to_string(grades.size()));
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < cutoff; ++i) {
        sum += (std::exp2(grades[i].value) - 1.0) / std::log2(static_cast<double>(i) + 2.0);
    }
    return sum;
}

double ideal_dcg(std::span<const RelevanceGrade> available, std::size_t cutoff) {
    std::vector<RelevanceGrade> best(available.begin(), available.end());
    std::sort(best.begin(), best.end(), std::greater<>());
    // Fewer judged documents than the cutoff just contribute nothing more.
    return dcg(best, std::min(cutoff, best.size()));
}

double ndcg(std::span<const RelevanceGrade> ranking_grades, std::span<const RelevanceGrade> ideal_grades,
            std::size_t cutoff) {
    const double gain = dcg(ranking_grades, cutoff);
    const double ideal = ideal_dcg(ideal_grades, cutoff);
    if (ideal <= 0.0) return 0.0;
    return std::min(1.0, gain / ideal);
}

double ndcg(const Ranking& r, std::span<const RelevanceGrade> ideal_grades, std::size_t cutoff) {
    const auto g = r.grades();
    return ndcg(g, ideal_grades, cutoff);
}

std::vector<QueryRecord> generate_synthetic(const SyntheticSpec& spec) {
    if (spec.queries == 0 || spec.docs_per_query == 0) {
        throw Error(ErrorCode::ConfigError, "synthetic dataset needs at least one query and one document");
    }
    if (spec.grade_weights.empty() || spec.feature_noise.empty()) {
        throw Error(ErrorCode::ConfigError, "synthetic dataset needs grade weights and feature noise levels");
    }
    double total = 0.0;
    for (double w : spec.grade_weights) {
        if (!(w >= 0.0)) throw Error(ErrorCode::ConfigError, "grade weights must be non-negative");
        total += w;
    }
    if (!(total > 0.0)) throw Error(ErrorCode::ConfigError, "grade weights must not all be zero");

    RandomStream gen(spec.seed);
    auto gaussian = [&gen] {
        const double u1 = 1.0 - uniform01(gen);
        const double u2 = uniform01(gen);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    };

    std::vector<QueryRecord> out;
    out.reserve(spec.queries);
    for (std::size_t qi = 0; qi < spec.queries; ++qi) {
        QueryRecord q{std::to_string(qi + 1), {}};
        for (std::size_t di = 0; di < spec.docs_per_query; ++di) {
            double u = uniform01(gen) * total;
            int grade = static_cast<int>(spec.grade_weights.size()) - 1;
            for (std::size_t g = 0; g < spec.grade_weights.size(); ++g) {
                if (u < spec.grade_weights[g]) {
                    grade = static_cast<int>(g);
                    break;
                }
                u -= spec.grade_weights[g];
            }
            Document d;
            d.doc_id = "S" + q.query_id + "-" + std::to_string(di + 1);
            d.grade = RelevanceGrade{grade};
            for (std::size_t k = 0; k < spec.feature_noise.size(); ++k) {
                d.features.emplace(static_cast<int>(k) + 1, grade + spec.feature_noise[k] * gaussian());
            }
            q.docs.push_back(std::move(d));
        }
        out.push_back(std::move(q));
    }
    return out;
}

}  // namespace ilab
