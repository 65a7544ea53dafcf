#include "interleave_lab/clickmodel.hpp"

namespace ilab {

namespace {

void check_table(const std::vector<double>& table, const char* what) {
    for (double p : table) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw Error(ErrorCode::ConfigError, std::string(what) + " probabilities must lie in [0, 1]");
        }
    }
}

}  // namespace

ClickModelSpec::ClickModelSpec(std::string name, std::vector<double> click_prob, std::vector<double> stop_prob)
    : name_(std::move(name)), click_prob_(std::move(click_prob)), stop_prob_(std::move(stop_prob)) {
    if (click_prob_.empty() || click_prob_.size() != stop_prob_.size()) {
        throw Error(ErrorCode::ConfigError, "click model '" + name_ +
                                                "' needs click and stop tables of equal, non-zero length");
    }
    check_table(click_prob_, "click");
    check_table(stop_prob_, "stop");
}

void ClickModelSpec::throw_grade_out_of_range(RelevanceGrade g) const {
    throw Error(ErrorCode::GradeOutOfRange, "grade " + std::to_string(g.value) + " not covered by click model '" +
                                                name_ + "' (max grade " + std::to_string(max_grade()) + ")");
}

ClickModelSpec perfect_spec() { return {"perfect", {0.0, 0.5, 1.0}, {0.0, 0.0, 0.0}}; }

ClickModelSpec navigational_spec() { return {"navigational", {0.0, 0.5, 1.0}, {0.0, 0.5, 1.0}}; }

ClickModelSpec builtin_click_model(const std::string& name) {
    if (name == "perfect") return perfect_spec();
    if (name == "navigational") return navigational_spec();
    throw Error(ErrorCode::ConfigError, "unknown click model '" + name + "' (expected perfect or navigational)");
}

}  // namespace ilab
