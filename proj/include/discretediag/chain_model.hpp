#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace discretediag
{

/// A raw category label as it appears in sampler output.
using Label = std::variant<std::int64_t, std::string>;

std::string to_string(const Label& label);

/// Dense category index in [0, r).
using Category = int;
using Sequence = std::vector<Category>;

/// Ordered set of distinct labels; position in the list is the dense index.
/// Integer labels sort numerically, text labels lexicographically.
class CategoryAlphabet
{
public:
    CategoryAlphabet() = default;
    explicit CategoryAlphabet(std::vector<Label> labels);

    /// Integer labels 1..r, the alphabet used by the simulators.
    static CategoryAlphabet indexed(std::size_t size);

    std::size_t size() const noexcept { return labels_.size(); }
    const Label& label(Category j) const { return labels_.at(static_cast<std::size_t>(j)); }
    const std::vector<Label>& labels() const noexcept { return labels_; }
    std::optional<Category> index_of(const Label& label) const;

    bool operator==(const CategoryAlphabet&) const = default;

private:
    std::vector<Label> labels_;
};

/// The s independent categorical segments being compared.
///
/// Every segment has at least two points and every value lies in
/// [0, alphabet.size()). Construction validates both.
class SegmentSet
{
public:
    SegmentSet() = default;
    SegmentSet(CategoryAlphabet alphabet, std::vector<Sequence> segments,
               std::vector<std::string> names = {});

    std::size_t count() const noexcept { return segments_.size(); }
    std::size_t categories() const noexcept { return alphabet_.size(); }
    std::size_t length(std::size_t i) const { return segments_.at(i).size(); }
    std::size_t total_length() const noexcept;
    std::size_t min_length() const noexcept;

    const Sequence& segment(std::size_t i) const { return segments_.at(i); }
    const std::vector<Sequence>& segments() const noexcept { return segments_; }
    const CategoryAlphabet& alphabet() const noexcept { return alphabet_; }

    /// Display name of segment i; "1", "2", ... unless names were given.
    const std::string& name(std::size_t i) const { return names_.at(i); }
    const std::vector<std::string>& names() const noexcept { return names_; }

private:
    CategoryAlphabet alphabet_;
    std::vector<Sequence> segments_;
    std::vector<std::string> names_;
};

/// Build the alphabet from the union of observed labels and encode each
/// sequence. All labels must be of one kind (integer or text).
SegmentSet encode(const std::vector<std::vector<Label>>& raw,
                  std::vector<std::string> names = {});

std::vector<std::vector<Label>> decode(const SegmentSet& set);

/// Category counts per segment and pooled.
struct FrequencyTable
{
    std::size_t segments = 0;
    std::size_t categories = 0;
    std::vector<std::int64_t> counts;          // segments x categories, row-major
    std::vector<std::int64_t> segment_totals;  // n_i
    std::vector<std::int64_t> pooled_counts;   // N_j
    std::int64_t total = 0;                    // n
    std::vector<double> pooled_proportions;    // N_j / n
    std::vector<Category> support;             // {j : N_j > 0}

    std::int64_t count(std::size_t i, std::size_t j) const { return counts[i * categories + j]; }
    double proportion(std::size_t i, std::size_t j) const
    {
        return static_cast<double>(count(i, j)) / static_cast<double>(segment_totals[i]);
    }
};

FrequencyTable frequency_table(const SegmentSet& set);

/// First-order transition counts, counted within each segment only.
struct TransitionTable
{
    std::size_t segments = 0;
    std::size_t categories = 0;
    std::vector<std::int64_t> counts;             // segments x r x r
    std::vector<std::int64_t> row_totals;         // segments x r, f_j^(i)
    std::vector<std::int64_t> pooled_counts;      // r x r
    std::vector<std::int64_t> pooled_row_totals;  // r

    std::int64_t count(std::size_t i, std::size_t j, std::size_t k) const
    {
        return counts[(i * categories + j) * categories + k];
    }
    std::int64_t row_total(std::size_t i, std::size_t j) const { return row_totals[i * categories + j]; }

    /// Per-segment transition probability; empty when segment i never leaves j.
    std::optional<double> segment_probability(std::size_t i, std::size_t j, std::size_t k) const;
    /// Pooled transition probability; 0 for a row with no transitions.
    double pooled_probability(std::size_t j, std::size_t k) const;

    /// A_j: segments with at least one transition out of j.
    std::vector<std::size_t> active_segments(std::size_t j) const;
    /// B_j (= R_j): targets with positive pooled probability from j.
    std::vector<Category> support(std::size_t j) const;
};

TransitionTable transition_table(const SegmentSet& set);

/// Bounds of the head and tail windows used by the within-chain diagnostic.
struct WindowSplit
{
    std::size_t window = 0;      // points in each window
    std::size_t tail_start = 0;  // 0-based index of the first tail point
};

/// Head and tail windows of floor(fraction * n) points each; the middle is
/// dropped. Requires 0 < fraction < 0.5 and both windows of at least 2.
WindowSplit within_windows(std::size_t length, double fraction);

SegmentSet split_within(std::span<const Category> chain, const CategoryAlphabet& alphabet,
                        double fraction);

/// First `length` points of every segment.
SegmentSet prefix(const SegmentSet& set, std::size_t length);

} // namespace discretediag
