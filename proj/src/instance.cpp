#include "prophet/instance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <sstream>

namespace prophet {

namespace {

std::string describe(const Violation& v) {
    std::ostringstream out;
    out.precision(17);
    out << "box " << v.box << ": ";
    switch (v.kind) {
        case Violation::Kind::empty_support: out << "empty support"; break;
        case Violation::Kind::bad_value: out << "value " << v.value << " is not finite and non-negative"; break;
        case Violation::Kind::bad_probability: out << "probability of value " << v.value << " outside (0, 1]"; break;
        case Violation::Kind::probability_sum: out << "probabilities sum to " << v.value; break;
        case Violation::Kind::duplicate_value: out << "duplicate value " << v.value; break;
        case Violation::Kind::shared_value:
            out << "value " << v.value << " shared with box " << v.other_box.value_or(0);
            break;
    }
    return out.str();
}

void push(ValidationReport& report, Violation v) {
    v.message = describe(v);
    report.violations.push_back(std::move(v));
}

RawBox merge_duplicates(RawBox box) {
    std::stable_sort(box.begin(), box.end(),
                     [](const Outcome& a, const Outcome& b) { return a.value < b.value; });
    RawBox merged;
    for (const auto& o : box) {
        if (!merged.empty() && merged.back().value == o.value) {
            merged.back().prob += o.prob;
        } else {
            merged.push_back(o);
        }
    }
    return merged;
}

}  // namespace

std::string ValidationReport::summary() const {
    if (violations.empty()) return "valid";
    std::string out;
    for (const auto& v : violations) {
        if (!out.empty()) out += "; ";
        out += v.message;
    }
    return out;
}

ValidationReport validate_instance(std::span<const RawBox> boxes, bool require_unique_max, double baseline) {
    ValidationReport report;
    if (boxes.empty()) {
        push(report, {Violation::Kind::empty_support, 0, std::nullopt, 0.0, {}});
        return report;
    }
    std::map<double, BoxId> owner;  // value -> first box holding it
    for (BoxId id = 0; id < boxes.size(); ++id) {
        const RawBox& box = boxes[id];
        if (box.empty()) {
            push(report, {Violation::Kind::empty_support, id, std::nullopt, 0.0, {}});
            continue;
        }
        double total = 0.0;
        std::vector<double> seen;
        for (const auto& o : box) {
            if (!std::isfinite(o.value) || o.value < 0.0) {
                push(report, {Violation::Kind::bad_value, id, std::nullopt, o.value, {}});
            }
            if (!std::isfinite(o.prob) || o.prob <= 0.0 || o.prob > 1.0) {
                push(report, {Violation::Kind::bad_probability, id, std::nullopt, o.value, {}});
            }
            total += o.prob;
            if (std::find(seen.begin(), seen.end(), o.value) != seen.end()) {
                push(report, {Violation::Kind::duplicate_value, id, std::nullopt, o.value, {}});
                continue;
            }
            seen.push_back(o.value);
            if (require_unique_max && o.value > baseline) {
                auto [it, inserted] = owner.emplace(o.value, id);
                if (!inserted) {
                    push(report, {Violation::Kind::shared_value, it->second, id, o.value, {}});
                }
            }
        }
        if (!(std::abs(total - 1.0) <= kProbabilitySumTolerance)) {
            push(report, {Violation::Kind::probability_sum, id, std::nullopt, total, {}});
        }
    }
    return report;
}

ValidationReport validate_instance(const Instance& instance, bool require_unique_max, double baseline) {
    const auto raw = instance.to_raw();
    return validate_instance(raw, require_unique_max, baseline);
}

Instance::Instance(std::vector<DiscreteDistribution> boxes) : boxes_(std::move(boxes)) {
    if (boxes_.empty()) throw ValidationError("instance needs at least one box");
}

Instance Instance::from_raw(std::span<const RawBox> boxes, bool require_unique_max, double baseline) {
    std::vector<RawBox> merged;
    merged.reserve(boxes.size());
    for (const auto& box : boxes) merged.push_back(merge_duplicates(box));
    const ValidationReport report = validate_instance(merged, require_unique_max, baseline);
    if (!report.valid()) throw ValidationError(report.summary());
    std::vector<DiscreteDistribution> dists;
    dists.reserve(merged.size());
    for (auto& box : merged) dists.push_back(DiscreteDistribution::from_outcomes(std::move(box)));
    return Instance(std::move(dists));
}

std::size_t Instance::profile_count() const {
    std::size_t count = 1;
    for (const auto& box : boxes_) {
        if (count > std::numeric_limits<std::size_t>::max() / box.size()) {
            return std::numeric_limits<std::size_t>::max();
        }
        count *= box.size();
    }
    return count;
}

std::vector<double> Instance::support_union() const {
    std::vector<double> values;
    for (const auto& box : boxes_) {
        for (const auto& o : box.outcomes()) values.push_back(o.value);
    }
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    return values;
}

std::vector<RawBox> Instance::to_raw() const {
    std::vector<RawBox> raw;
    raw.reserve(boxes_.size());
    for (const auto& box : boxes_) raw.emplace_back(box.outcomes().begin(), box.outcomes().end());
    return raw;
}

Order::Order(std::vector<BoxId> sequence, std::size_t n) : sequence_(std::move(sequence)) {
    if (sequence_.size() != n) {
        throw ValidationError("order has " + std::to_string(sequence_.size()) + " entries for " +
                              std::to_string(n) + " boxes");
    }
    std::vector<bool> seen(n, false);
    for (BoxId id : sequence_) {
        if (id >= n) throw ValidationError("order names unknown box " + std::to_string(id));
        if (seen[id]) throw ValidationError("order repeats box " + std::to_string(id));
        seen[id] = true;
    }
}

Order Order::identity(std::size_t n) {
    std::vector<BoxId> seq(n);
    for (std::size_t i = 0; i < n; ++i) seq[i] = i;
    return Order(std::move(seq), n);
}

std::string Order::to_string() const {
    std::string out;
    for (BoxId id : sequence_) {
        if (!out.empty()) out += ' ';
        out += std::to_string(id);
    }
    return out;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

ValueProfile sample_profile(const Instance& instance, std::uint64_t rng_seed) {
    std::mt19937_64 rng(rng_seed);
    ValueProfile profile;
    profile.values.reserve(instance.size());
    for (const auto& box : instance.boxes()) {
        // 53 random bits -> uniform in [0, 1); avoids implementation-defined distributions.
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        profile.values.push_back(box.quantile_draw(u));
    }
    return profile;
}

}  // namespace prophet
