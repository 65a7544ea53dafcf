#pragma once

// Cascade click model: scan top-down, click with P(click | grade), and after
// a click leave the ranking with P(stop | grade).

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "interleave_lab/core.hpp"
#include "interleave_lab/random.hpp"

namespace ilab {

class ClickModelSpec {
public:
    // Both tables are indexed by grade and must cover [0, max_grade].
    ClickModelSpec(std::string name, std::vector<double> click_prob, std::vector<double> stop_prob);

    const std::string& name() const noexcept { return name_; }
    int max_grade() const noexcept { return static_cast<int>(click_prob_.size()) - 1; }
    double click_prob(RelevanceGrade g) const { return click_prob_[index(g)]; }
    double stop_prob(RelevanceGrade g) const { return stop_prob_[index(g)]; }
    const std::vector<double>& click_table() const noexcept { return click_prob_; }
    const std::vector<double>& stop_table() const noexcept { return stop_prob_; }

private:
    std::size_t index(RelevanceGrade g) const {
        if (g.value < 0 || g.value > max_grade()) throw_grade_out_of_range(g);
        return static_cast<std::size_t>(g.value);
    }
    [[noreturn]] void throw_grade_out_of_range(RelevanceGrade g) const;

    std::string name_;
    std::vector<double> click_prob_;
    std::vector<double> stop_prob_;
};

ClickModelSpec perfect_spec();
ClickModelSpec navigational_spec();

// "perfect" or "navigational"; anything else is a ConfigError.
ClickModelSpec builtin_click_model(const std::string& name);

struct CascadeTrace {
    ClickVector clicks;
    // 1-based position whose click triggered abandonment, if any.
    std::optional<std::size_t> stop_position;
};

template <BitSource G>
void simulate_cascade_into(std::span<const RelevanceGrade> grades, const ClickModelSpec& spec, G& gen,
                           CascadeTrace& trace) {
    trace.clicks.reset(grades.size());
    trace.stop_position.reset();
    for (std::size_t i = 0; i < grades.size(); ++i) {
        if (!bernoulli(gen, spec.click_prob(grades[i]))) continue;
        trace.clicks.push_back(i + 1);
        if (bernoulli(gen, spec.stop_prob(grades[i]))) {
            trace.stop_position = i + 1;
            return;
        }
    }
}

template <BitSource G>
CascadeTrace simulate_cascade_traced(std::span<const RelevanceGrade> grades, const ClickModelSpec& spec, G& gen) {
    if (grades.empty()) throw Error(ErrorCode::EmptyRanking, "cannot simulate clicks on an empty ranking");
    CascadeTrace trace;
    simulate_cascade_into(grades, spec, gen, trace);
    return trace;
}

template <BitSource G>
ClickVector simulate_cascade(std::span<const RelevanceGrade> grades, const ClickModelSpec& spec, G& gen) {
    return simulate_cascade_traced(grades, spec, gen).clicks;
}

}  // namespace ilab
