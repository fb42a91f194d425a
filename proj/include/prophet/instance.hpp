#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "prophet/distribution.hpp"

namespace prophet {

using BoxId = std::size_t;

/// Unvalidated box as read from a file: (value, probability) pairs.
using RawBox = std::vector<Outcome>;

struct Violation {
    enum class Kind { empty_support, bad_value, bad_probability, probability_sum, duplicate_value, shared_value };

    Kind kind;
    BoxId box;
    std::optional<BoxId> other_box;  // set for shared_value
    double value = 0.0;              // offending value, or the sum for probability_sum
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool valid() const { return violations.empty(); }
    std::string summary() const;
};

/// Checks raw boxes against the distribution and instance invariants.
///
/// With `require_unique_max`, no value strictly above `baseline` may appear in
/// the supports of two different boxes. Values at or below the baseline can
/// never be "the maximum that exceeds the baseline", so they may be shared.
ValidationReport validate_instance(std::span<const RawBox> boxes, bool require_unique_max,
                                   double baseline = 0.0);

/// The n boxes of a game. Box ids are the indices 0..n-1.
class Instance {
public:
    /// Throws ValidationError when `boxes` is empty.
    explicit Instance(std::vector<DiscreteDistribution> boxes);

    /// Loader path: merges duplicate values within a box, renormalizes, then
    /// validates. Throws ValidationError carrying every violation.
    static Instance from_raw(std::span<const RawBox> boxes, bool require_unique_max = false,
                             double baseline = 0.0);

    std::size_t size() const { return boxes_.size(); }
    const DiscreteDistribution& box(BoxId id) const { return boxes_.at(id); }
    std::span<const DiscreteDistribution> boxes() const { return boxes_; }

    /// Product of the support sizes, saturating at SIZE_MAX.
    std::size_t profile_count() const;

    /// Sorted distinct values over all supports.
    std::vector<double> support_union() const;

    std::vector<RawBox> to_raw() const;

private:
    std::vector<DiscreteDistribution> boxes_;
};

/// Same check as the raw overload, on an already canonical instance.
ValidationReport validate_instance(const Instance& instance, bool require_unique_max,
                                   double baseline = 0.0);

/// Arrival permutation of box ids.
class Order {
public:
    /// Throws ValidationError unless `sequence` is a permutation of 0..n-1.
    Order(std::vector<BoxId> sequence, std::size_t n);

    static Order identity(std::size_t n);

    std::size_t size() const { return sequence_.size(); }
    BoxId operator[](std::size_t position) const { return sequence_[position]; }
    std::span<const BoxId> sequence() const { return sequence_; }

    /// Boxes arriving strictly after `position`.
    std::span<const BoxId> after(std::size_t position) const {
        return std::span<const BoxId>(sequence_).subspan(position + 1);
    }

    std::string to_string() const;

    friend bool operator==(const Order&, const Order&) = default;

private:
    std::vector<BoxId> sequence_;
};

/// Realized values indexed by box id.
struct ValueProfile {
    std::vector<double> values;
};

/// Draws one value per box. The same seed always yields the same profile.
ValueProfile sample_profile(const Instance& instance, std::uint64_t rng_seed);

/// splitmix64 step, used to derive independent per-task seeds from one master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace prophet
